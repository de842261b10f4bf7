//! The temporal-depth classifier.
//!
//! ```text
//! flow clip (3, D, H, W)
//!   -> max-pool (1, 4, 4)
//!   -> conv3d, 6 kernels of (3, N, 3, 3), valid
//!   -> ReLU
//!   -> max-pool (2, 4, 4)
//!   -> flatten -> dense 16 -> ReLU -> dense 1 -> sigmoid
//! ```
//!
//! `N`, the number of flow frames one kernel spans, is the only
//! architectural knob.

use alloc::vec::Vec;

use rand::Rng;

use crate::flow::FlowClip;
use crate::nn::{
    conv3d_forward, conv3d_param_grads, dense_backward, dense_forward, maxpool3d, maxpool3d_backward, relu,
    relu_backward, sigmoid, sigmoid_bce, Conv3dLayer, DenseLayer, Pool3d, PoolArgmax, FILTERS, KERNEL_HW,
};
use crate::seed::{self, tag};
use crate::{Error, Real, Result, Tensor};

pub const INPUT_POOL: Pool3d = Pool3d::new(1, 4, 4);
pub const FEATURE_POOL: Pool3d = Pool3d::new(2, 4, 4);
pub const HIDDEN: usize = 16;
pub const CHANNELS: usize = 3;

/// Number of flattened features entering the hidden layer, or
/// `ArchitectureUnderflow` when some pooled extent would be empty.
pub fn flat_size(n_frames: usize, input_dims: [usize; 4]) -> Result<usize> {
    let [c, d, h, w] = input_dims;
    if c != CHANNELS {
        return Err(Error::ShapeMismatch("model input must have 3 channels"));
    }
    if n_frames == 0 {
        return Err(Error::ConfigInvalid("temporal depth must be at least 1"));
    }
    let (ph, pw) = (h / INPUT_POOL.height, w / INPUT_POOL.width);
    if d < n_frames || ph < KERNEL_HW || pw < KERNEL_HW {
        return Err(Error::ArchitectureUnderflow);
    }
    let (cd, ch, cw) = (d - n_frames + 1, ph - KERNEL_HW + 1, pw - KERNEL_HW + 1);
    let pooled = [cd / FEATURE_POOL.depth, ch / FEATURE_POOL.height, cw / FEATURE_POOL.width];
    if pooled.contains(&0) {
        return Err(Error::ArchitectureUnderflow);
    }
    Ok(FILTERS * pooled.iter().product::<usize>())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T = f32> {
    pub conv: Conv3dLayer<T>,
    pub fc1: DenseLayer<T>,
    pub fc2: DenseLayer<T>,
    /// `(3, flow depth, H, W)` the model was built for.
    pub input_dims: [usize; 4],
}

/// Gradients in the canonical parameter order: conv kernels, conv bias,
/// fc1 weights, fc1 bias, fc2 weights, fc2 bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrads<T = f32>(pub [Tensor<T>; 6]);

impl<T: Real> ParamGrads<T> {
    pub fn zeros_like(params: &ModelParams<T>) -> Self {
        ParamGrads(params.tensors().map(|t| Tensor::zeros(t.shape())))
    }

    pub fn accumulate(&mut self, other: &ParamGrads<T>) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            for (x, &y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: T) {
        for t in &mut self.0 {
            for x in t.data_mut() {
                *x *= factor;
            }
        }
    }
}

impl<T: Real> ModelParams<T> {
    /// All-zero parameters for an architecture; useful as a neutral model.
    pub fn zeros(n_frames: usize, input_dims: [usize; 4]) -> Result<Self> {
        let flat = flat_size(n_frames, input_dims)?;
        Ok(ModelParams {
            conv: Conv3dLayer::zeros(CHANNELS, n_frames),
            fc1: DenseLayer::zeros(HIDDEN, flat),
            fc2: DenseLayer::zeros(1, HIDDEN),
            input_dims,
        })
    }

    /// Reassembles parameters from tensors in canonical order, checking every
    /// shape against the architecture.
    pub fn from_tensors(n_frames: usize, input_dims: [usize; 4], tensors: [Tensor<T>; 6]) -> Result<Self> {
        let template = Self::zeros(n_frames, input_dims)?;
        for (t, want) in tensors.iter().zip(template.tensors()) {
            if t.shape() != want.shape() {
                return Err(Error::ShapeMismatch("parameter tensor shape"));
            }
        }
        let [k, kb, w1, b1, w2, b2] = tensors;
        Ok(ModelParams {
            conv: Conv3dLayer::new(k, kb)?,
            fc1: DenseLayer::new(w1, b1)?,
            fc2: DenseLayer::new(w2, b2)?,
            input_dims,
        })
    }

    pub fn n_frames(&self) -> usize {
        self.conv.depth()
    }

    pub fn tensors(&self) -> [&Tensor<T>; 6] {
        [
            &self.conv.kernels,
            &self.conv.bias,
            &self.fc1.weights,
            &self.fc1.bias,
            &self.fc2.weights,
            &self.fc2.bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor<T>; 6] {
        [
            &mut self.conv.kernels,
            &mut self.conv.bias,
            &mut self.fc1.weights,
            &mut self.fc1.bias,
            &mut self.fc2.weights,
            &mut self.fc2.bias,
        ]
    }

    pub fn cast<U: Real>(&self) -> ModelParams<U> {
        ModelParams {
            conv: self.conv.cast(),
            fc1: self.fc1.cast(),
            fc2: self.fc2.cast(),
            input_dims: self.input_dims,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.all_finite())
    }
}

/// He-uniform weights (`±sqrt(6 / fan_in)`) and zero biases, fully
/// determined by `seed`.
pub fn build_model(n_frames: usize, input_dims: [usize; 4], seed: u64) -> Result<ModelParams> {
    let mut params = ModelParams::zeros(n_frames, input_dims)?;
    let mut rng = seed::rng(seed::derive(seed, tag::MODEL_INIT));
    let flat = params.fc1.inputs();
    let fans = [CHANNELS * n_frames * KERNEL_HW * KERNEL_HW, flat, HIDDEN];
    let weights = [&mut params.conv.kernels, &mut params.fc1.weights, &mut params.fc2.weights];
    for (t, fan_in) in weights.into_iter().zip(fans) {
        let bound = libm::sqrt(6.0 / fan_in as f64);
        for w in t.data_mut() {
            *w = rng.random_range(-bound..bound) as f32;
        }
    }
    Ok(params)
}

/// Applies the parameter-free input pooling after checking the clip's
/// dimensions against the model.
pub fn pool_input<T: Real>(params: &ModelParams<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
    if x.shape() != params.input_dims {
        return Err(Error::ShapeMismatch("flow clip dims differ from the model's input dims"));
    }
    Ok(maxpool3d(x, INPUT_POOL)?.0)
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct Trace<T = f32> {
    pooled_input: Tensor<T>,
    conv_pre: Tensor<T>,
    feature_argmax: PoolArgmax,
    flat: Tensor<T>,
    hidden_pre: Tensor<T>,
    hidden: Tensor<T>,
    pub logit: T,
}

/// Forward pass from an already pooled input.
pub fn forward_pooled<T: Real>(params: &ModelParams<T>, pooled_input: &Tensor<T>) -> Result<Trace<T>> {
    let conv_pre = conv3d_forward(pooled_input, &params.conv)?;
    let (features, feature_argmax) = maxpool3d(&relu(&conv_pre), FEATURE_POOL)?;
    let flat = features.reshape(&[params.fc1.inputs()])?;
    let hidden_pre = dense_forward(&flat, &params.fc1)?;
    let hidden = relu(&hidden_pre);
    let logit = dense_forward(&hidden, &params.fc2)?.data()[0];
    Ok(Trace {
        pooled_input: pooled_input.clone(),
        conv_pre,
        feature_argmax,
        flat,
        hidden_pre,
        hidden,
        logit,
    })
}

pub fn logit<T: Real>(params: &ModelParams<T>, x: &Tensor<T>) -> Result<T> {
    Ok(forward_pooled(params, &pool_input(params, x)?)?.logit)
}

/// Probability that the clip is fight-like.
///
/// Evaluated in 64-bit from the logit and kept strictly inside `(0, 1)`
/// even for saturated logits.
pub fn forward(params: &ModelParams, x: &FlowClip) -> Result<f64> {
    let z = logit(params, x.tensor())?;
    Ok(probability(z as f64))
}

pub(crate) fn probability(z: f64) -> f64 {
    sigmoid(z).clamp(1e-15, 1.0 - 1e-15)
}

/// Gradients of a scalar loss given `dloss/dlogit`.
pub fn backward<T: Real>(params: &ModelParams<T>, trace: &Trace<T>, dlogit: T) -> Result<ParamGrads<T>> {
    let g_logit = Tensor::from_vec(&[1], alloc::vec![dlogit])?;
    let fc2 = dense_backward(&trace.hidden, &params.fc2, &g_logit)?;
    let g_hidden_pre = relu_backward(&trace.hidden_pre, &fc2.input)?;
    let fc1 = dense_backward(&trace.flat, &params.fc1, &g_hidden_pre)?;
    let pooled_shape: Vec<usize> = {
        let s = trace.conv_pre.shape();
        Vec::from([s[0], s[1] / FEATURE_POOL.depth, s[2] / FEATURE_POOL.height, s[3] / FEATURE_POOL.width])
    };
    let g_features = fc1.input.reshape(&pooled_shape)?;
    let g_relu = maxpool3d_backward(&trace.feature_argmax, &g_features)?;
    let g_conv = relu_backward(&trace.conv_pre, &g_relu)?;
    let (g_k, g_kb) = conv3d_param_grads(&trace.pooled_input, &params.conv, &g_conv)?;
    Ok(ParamGrads([g_k, g_kb, fc1.weights, fc1.bias, fc2.weights, fc2.bias]))
}

/// Binary cross-entropy of one pooled sample, with its parameter gradients.
pub fn loss_and_grads<T: Real>(params: &ModelParams<T>, pooled_input: &Tensor<T>, label: u8) -> Result<(T, ParamGrads<T>)> {
    let trace = forward_pooled(params, pooled_input)?;
    let (loss, dlogit) = sigmoid_bce(trace.logit, label);
    Ok((loss, backward(params, &trace, dlogit)?))
}
