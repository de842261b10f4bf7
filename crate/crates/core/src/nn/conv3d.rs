use crate::{Error, Real, Result, Tensor};

/// Number of filters in the temporal convolution.
pub const FILTERS: usize = 6;
/// Spatial kernel extent (both height and width).
pub const KERNEL_HW: usize = 3;

/// 3D convolution with `FILTERS` kernels of shape `(C, N, 3, 3)`.
///
/// `N` is the temporal depth: how many consecutive frames one kernel reads.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv3dLayer<T = f32> {
    pub kernels: Tensor<T>,
    pub bias: Tensor<T>,
}

impl<T: Real> Conv3dLayer<T> {
    pub fn new(kernels: Tensor<T>, bias: Tensor<T>) -> Result<Self> {
        let ks = kernels.shape();
        if ks.len() != 5 || ks[0] != FILTERS || ks[3] != KERNEL_HW || ks[4] != KERNEL_HW {
            return Err(Error::ShapeMismatch("conv kernels must be (6, C, N, 3, 3)"));
        }
        if ks[2] == 0 || ks[1] == 0 {
            return Err(Error::ShapeMismatch("conv kernel has an empty extent"));
        }
        if bias.shape() != [FILTERS] {
            return Err(Error::ShapeMismatch("conv bias must be (6)"));
        }
        Ok(Conv3dLayer { kernels, bias })
    }

    pub fn zeros(channels: usize, depth: usize) -> Self {
        Conv3dLayer {
            kernels: Tensor::zeros(&[FILTERS, channels, depth, KERNEL_HW, KERNEL_HW]),
            bias: Tensor::zeros(&[FILTERS]),
        }
    }

    pub fn channels(&self) -> usize {
        self.kernels.shape()[1]
    }

    pub fn depth(&self) -> usize {
        self.kernels.shape()[2]
    }

    pub fn cast<U: Real>(&self) -> Conv3dLayer<U> {
        Conv3dLayer {
            kernels: self.kernels.cast(),
            bias: self.bias.cast(),
        }
    }

    /// Output extents `(F, D-N+1, H-2, W-2)` for an input `(C, D, H, W)`.
    pub fn output_shape(&self, input: &[usize]) -> Result<[usize; 4]> {
        if input.len() != 4 {
            return Err(Error::ShapeMismatch("conv input must be (C, D, H, W)"));
        }
        let [c, d, h, w] = [input[0], input[1], input[2], input[3]];
        if c != self.channels() {
            return Err(Error::ShapeMismatch("conv input channel count"));
        }
        if self.depth() > d {
            return Err(Error::KernelTooDeep {
                depth: self.depth(),
                input: d,
            });
        }
        if h < KERNEL_HW || w < KERNEL_HW {
            return Err(Error::ShapeMismatch("conv input smaller than 3x3"));
        }
        Ok([FILTERS, d - self.depth() + 1, h - KERNEL_HW + 1, w - KERNEL_HW + 1])
    }
}

/// Valid, stride-1 cross-correlation:
/// `out[f,d,h,w] = bias[f] + sum_{c,n,i,j} x[c,d+n,h+i,w+j] * k[f,c,n,i,j]`.
///
/// Every output element accumulates its terms in `(c, n, i, j)` order.
pub fn conv3d_forward<T: Real>(x: &Tensor<T>, layer: &Conv3dLayer<T>) -> Result<Tensor<T>> {
    let out_shape = layer.output_shape(x.shape())?;
    let [_, d_in, h_in, w_in] = x.dims4();
    let [f_out, d_out, h_out, w_out] = out_shape;
    let (c_in, depth) = (layer.channels(), layer.depth());
    let xs = x.data();
    let ks = layer.kernels.data();
    let mut out = Tensor::zeros(&out_shape);
    let os = out.data_mut();
    let out_frame = h_out * w_out;
    let out_filter = d_out * out_frame;

    for f in 0..f_out {
        let o_f = &mut os[f * out_filter..(f + 1) * out_filter];
        for c in 0..c_in {
            for n in 0..depth {
                for i in 0..KERNEL_HW {
                    for j in 0..KERNEL_HW {
                        let k = ks[(((f * c_in + c) * depth + n) * KERNEL_HW + i) * KERNEL_HW + j];
                        for d in 0..d_out {
                            for h in 0..h_out {
                                let xo = ((c * d_in + d + n) * h_in + h + i) * w_in + j;
                                let oo = d * out_frame + h * w_out;
                                let xrow = &xs[xo..xo + w_out];
                                for (o, &xv) in o_f[oo..oo + w_out].iter_mut().zip(xrow) {
                                    *o += xv * k;
                                }
                            }
                        }
                    }
                }
            }
        }
        let b = layer.bias.data()[f];
        for o in o_f.iter_mut() {
            *o = b + *o;
        }
    }
    Ok(out)
}

fn check_grad_shape<T: Real>(x: &Tensor<T>, layer: &Conv3dLayer<T>, grad_out: &Tensor<T>) -> Result<[usize; 4]> {
    let out_shape = layer.output_shape(x.shape())?;
    if grad_out.shape() != out_shape {
        return Err(Error::ShapeMismatch("conv grad_out shape"));
    }
    Ok(out_shape)
}

/// Kernel and bias gradients only; skips the input gradient, which the model
/// never needs because the convolution reads parameter-free input.
pub fn conv3d_param_grads<T: Real>(
    x: &Tensor<T>,
    layer: &Conv3dLayer<T>,
    grad_out: &Tensor<T>,
) -> Result<(Tensor<T>, Tensor<T>)> {
    let [f_out, d_out, h_out, w_out] = check_grad_shape(x, layer, grad_out)?;
    let [_, d_in, h_in, w_in] = x.dims4();
    let (c_in, depth) = (layer.channels(), layer.depth());
    let xs = x.data();
    let gs = grad_out.data();
    let mut grad_k = Tensor::zeros(layer.kernels.shape());
    let mut grad_b = Tensor::zeros(&[FILTERS]);
    let out_frame = h_out * w_out;
    let out_filter = d_out * out_frame;

    {
        let gk = grad_k.data_mut();
        for f in 0..f_out {
            let g_f = &gs[f * out_filter..(f + 1) * out_filter];
            for c in 0..c_in {
                for n in 0..depth {
                    for i in 0..KERNEL_HW {
                        for j in 0..KERNEL_HW {
                            let mut acc = T::ZERO;
                            for d in 0..d_out {
                                for h in 0..h_out {
                                    let xo = ((c * d_in + d + n) * h_in + h + i) * w_in + j;
                                    let go = d * out_frame + h * w_out;
                                    for (&g, &xv) in g_f[go..go + w_out].iter().zip(&xs[xo..xo + w_out]) {
                                        acc += g * xv;
                                    }
                                }
                            }
                            gk[(((f * c_in + c) * depth + n) * KERNEL_HW + i) * KERNEL_HW + j] = acc;
                        }
                    }
                }
            }
        }
    }
    for (f, b) in grad_b.data_mut().iter_mut().enumerate() {
        *b = gs[f * out_filter..(f + 1) * out_filter]
            .iter()
            .fold(T::ZERO, |acc, &g| acc + g);
    }
    Ok((grad_k, grad_b))
}

/// Returns `(grad_x, grad_kernels, grad_bias)` for the forward map above.
pub fn conv3d_backward<T: Real>(
    x: &Tensor<T>,
    layer: &Conv3dLayer<T>,
    grad_out: &Tensor<T>,
) -> Result<(Tensor<T>, Tensor<T>, Tensor<T>)> {
    let (grad_k, grad_b) = conv3d_param_grads(x, layer, grad_out)?;
    let [f_out, d_out, h_out, w_out] = grad_out.dims4();
    let [_, d_in, h_in, w_in] = x.dims4();
    let (c_in, depth) = (layer.channels(), layer.depth());
    let ks = layer.kernels.data();
    let gs = grad_out.data();
    let mut grad_x = Tensor::zeros(x.shape());
    let gx = grad_x.data_mut();
    let out_frame = h_out * w_out;
    let out_filter = d_out * out_frame;

    for f in 0..f_out {
        for c in 0..c_in {
            for n in 0..depth {
                for i in 0..KERNEL_HW {
                    for j in 0..KERNEL_HW {
                        let k = ks[(((f * c_in + c) * depth + n) * KERNEL_HW + i) * KERNEL_HW + j];
                        for d in 0..d_out {
                            for h in 0..h_out {
                                let xo = ((c * d_in + d + n) * h_in + h + i) * w_in + j;
                                let go = f * out_filter + d * out_frame + h * w_out;
                                for (gxv, &g) in gx[xo..xo + w_out].iter_mut().zip(&gs[go..go + w_out]) {
                                    *gxv += g * k;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((grad_x, grad_k, grad_b))
}

/// Straight seven-loop reference used by tests.
#[cfg(test)]
pub(crate) fn conv3d_naive(x: &Tensor<f64>, k: &Tensor<f64>, b: &Tensor<f64>) -> Tensor<f64> {
    let [c_in, d_in, h_in, w_in] = x.dims4();
    let ksh = k.shape();
    let (f_out, depth) = (ksh[0], ksh[2]);
    let shape = [f_out, d_in - depth + 1, h_in - 2, w_in - 2];
    let mut out = Tensor::zeros(&shape);
    for f in 0..shape[0] {
        for d in 0..shape[1] {
            for h in 0..shape[2] {
                for w in 0..shape[3] {
                    let mut acc = 0.0;
                    for c in 0..c_in {
                        for n in 0..depth {
                            for i in 0..3 {
                                for j in 0..3 {
                                    acc += x.get(&[c, d + n, h + i, w + j]) * k.get(&[f, c, n, i, j]);
                                }
                            }
                        }
                    }
                    out.set(&[f, d, h, w], b.data()[f] + acc);
                }
            }
        }
    }
    out
}
