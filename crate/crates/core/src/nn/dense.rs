use crate::{Error, Real, Result, Tensor};

/// Fully connected layer `y = W x + b` with `W` shaped `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T = f32> {
    pub weights: Tensor<T>,
    pub bias: Tensor<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrads<T = f32> {
    pub input: Tensor<T>,
    pub weights: Tensor<T>,
    pub bias: Tensor<T>,
}

impl<T: Real> DenseLayer<T> {
    pub fn new(weights: Tensor<T>, bias: Tensor<T>) -> Result<Self> {
        if weights.rank() != 2 || bias.shape() != [weights.shape()[0]] {
            return Err(Error::ShapeMismatch("dense weights (out, in) and bias (out)"));
        }
        Ok(DenseLayer { weights, bias })
    }

    pub fn zeros(outputs: usize, inputs: usize) -> Self {
        DenseLayer {
            weights: Tensor::zeros(&[outputs, inputs]),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn outputs(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn inputs(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn cast<U: Real>(&self) -> DenseLayer<U> {
        DenseLayer {
            weights: self.weights.cast(),
            bias: self.bias.cast(),
        }
    }
}

pub fn dense_forward<T: Real>(x: &Tensor<T>, layer: &DenseLayer<T>) -> Result<Tensor<T>> {
    if x.len() != layer.inputs() {
        return Err(Error::ShapeMismatch("dense input length"));
    }
    let n_in = layer.inputs();
    let w = layer.weights.data();
    let y = layer
        .bias
        .data()
        .iter()
        .enumerate()
        .map(|(o, &b)| {
            let row = &w[o * n_in..(o + 1) * n_in];
            let acc = row.iter().zip(x.data()).fold(T::ZERO, |acc, (&wv, &xv)| acc + wv * xv);
            b + acc
        })
        .collect();
    Tensor::from_vec(&[layer.outputs()], y)
}

/// Returns `(W^T g, g ⊗ x, g)`.
pub fn dense_backward<T: Real>(x: &Tensor<T>, layer: &DenseLayer<T>, grad_out: &Tensor<T>) -> Result<DenseGrads<T>> {
    if x.len() != layer.inputs() || grad_out.len() != layer.outputs() {
        return Err(Error::ShapeMismatch("dense backward shapes"));
    }
    let n_in = layer.inputs();
    let w = layer.weights.data();
    let mut gx = Tensor::zeros(x.shape());
    let mut gw = Tensor::zeros(layer.weights.shape());
    for (o, &g) in grad_out.data().iter().enumerate() {
        let row = &w[o * n_in..(o + 1) * n_in];
        for (gxv, &wv) in gx.data_mut().iter_mut().zip(row) {
            *gxv += wv * g;
        }
        for (gwv, &xv) in gw.data_mut()[o * n_in..(o + 1) * n_in].iter_mut().zip(x.data()) {
            *gwv = g * xv;
        }
    }
    Ok(DenseGrads {
        input: gx,
        weights: gw,
        bias: Tensor::from_vec(&[layer.outputs()], grad_out.data().to_vec())?,
    })
}
