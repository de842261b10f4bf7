use alloc::vec::Vec;

use crate::{Error, Real, Result, Tensor};

/// Disjoint max-pool window `(depth, height, width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pool3d {
    pub depth: usize,
    pub height: usize,
    pub width: usize,
}

impl Pool3d {
    pub const fn new(depth: usize, height: usize, width: usize) -> Self {
        Pool3d { depth, height, width }
    }

    /// Pooled extents of a `(C, D, H, W)` input; remainders are dropped.
    pub fn output_shape(&self, input: &[usize]) -> Result<[usize; 4]> {
        if input.len() != 4 {
            return Err(Error::ShapeMismatch("pool input must be (C, D, H, W)"));
        }
        if self.depth == 0 || self.height == 0 || self.width == 0 {
            return Err(Error::PoolTooLarge);
        }
        let out = [input[0], input[1] / self.depth, input[2] / self.height, input[3] / self.width];
        if out[1] == 0 || out[2] == 0 || out[3] == 0 {
            return Err(Error::PoolTooLarge);
        }
        Ok(out)
    }
}

/// Flat input offsets of each pooled maximum, plus the input shape they
/// index into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolArgmax {
    pub input_shape: [usize; 4],
    pub indices: Vec<usize>,
}

/// Max over disjoint windows. Ties resolve to the lowest flat input index.
pub fn maxpool3d<T: Real>(x: &Tensor<T>, pool: Pool3d) -> Result<(Tensor<T>, PoolArgmax)> {
    let out_shape = pool.output_shape(x.shape())?;
    let [c_n, d_in, h_in, w_in] = x.dims4();
    let [_, d_out, h_out, w_out] = out_shape;
    let xs = x.data();
    let mut out = Vec::with_capacity(out_shape.iter().product());
    let mut indices = Vec::with_capacity(out.capacity());

    for c in 0..c_n {
        for d in 0..d_out {
            for h in 0..h_out {
                for w in 0..w_out {
                    // windows are visited in row-major order, so a strict `>`
                    // keeps the lowest flat index on ties
                    let mut best_i = ((c * d_in + d * pool.depth) * h_in + h * pool.height) * w_in + w * pool.width;
                    let mut best = xs[best_i];
                    for pd in 0..pool.depth {
                        for ph in 0..pool.height {
                            let row = ((c * d_in + d * pool.depth + pd) * h_in + h * pool.height + ph) * w_in
                                + w * pool.width;
                            for (pw, &v) in xs[row..row + pool.width].iter().enumerate() {
                                if v > best {
                                    best = v;
                                    best_i = row + pw;
                                }
                            }
                        }
                    }
                    out.push(best);
                    indices.push(best_i);
                }
            }
        }
    }
    Ok((
        Tensor::from_vec(&out_shape, out)?,
        PoolArgmax {
            input_shape: [c_n, d_in, h_in, w_in],
            indices,
        },
    ))
}

/// Routes each output gradient to its recorded argmax; all other positions
/// receive zero.
pub fn maxpool3d_backward<T: Real>(argmax: &PoolArgmax, grad_out: &Tensor<T>) -> Result<Tensor<T>> {
    if grad_out.len() != argmax.indices.len() {
        return Err(Error::ShapeMismatch("pool grad_out does not match argmax"));
    }
    let mut grad_x = Tensor::zeros(&argmax.input_shape);
    if argmax.indices.iter().any(|&i| i >= grad_x.len()) {
        return Err(Error::ShapeMismatch("argmax index outside input"));
    }
    let gx = grad_x.data_mut();
    for (&i, &g) in argmax.indices.iter().zip(grad_out.data()) {
        gx[i] += g;
    }
    Ok(grad_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::{pool_naive, random_tensor};
    use alloc::vec;

    #[test]
    fn unit_pool_is_identity() {
        let x = random_tensor::<f32>(&[2, 3, 4, 5], 1);
        let (y, arg) = maxpool3d(&x, Pool3d::new(1, 1, 1)).unwrap();
        assert_eq!(y, x);
        assert_eq!(arg.indices, (0..x.len()).collect::<Vec<_>>());
    }

    #[test]
    fn constant_input_picks_first_of_window() {
        let x = Tensor::<f32>::filled(&[1, 2, 4, 4], 0.25);
        let (y, arg) = maxpool3d(&x, Pool3d::new(2, 2, 2)).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.25));
        assert_eq!(arg.indices, vec![0, 2, 8, 10]);
    }

    #[test]
    fn matches_brute_force_window_max() {
        let x = random_tensor::<f32>(&[3, 6, 8, 8], 2);
        let pool = Pool3d::new(2, 4, 4);
        let (y, _) = maxpool3d(&x, pool).unwrap();
        assert_eq!(y, pool_naive(&x, pool));
    }

    #[test]
    fn remainder_is_dropped_and_oversize_rejected() {
        let x = random_tensor::<f32>(&[1, 5, 9, 7], 3);
        let (y, _) = maxpool3d(&x, Pool3d::new(2, 4, 4)).unwrap();
        assert_eq!(y.shape(), &[1, 2, 2, 1]);
        assert_eq!(maxpool3d(&x, Pool3d::new(6, 1, 1)).unwrap_err(), Error::PoolTooLarge);
        assert_eq!(maxpool3d(&x, Pool3d::new(1, 1, 8)).unwrap_err(), Error::PoolTooLarge);
    }

    #[test]
    fn backward_routes_to_argmax() {
        let x = random_tensor::<f32>(&[3, 6, 8, 8], 4);
        let pool = Pool3d::new(2, 4, 4);
        let (y, arg) = maxpool3d(&x, pool).unwrap();

        let ones = Tensor::filled(y.shape(), 1.0f32);
        let gx = maxpool3d_backward(&arg, &ones).unwrap();
        assert_eq!(gx.shape(), x.shape());
        assert_eq!(gx.data().iter().filter(|&&v| v == 1.0).count(), y.len());
        assert_eq!(gx.data().iter().filter(|&&v| v != 0.0).count(), y.len());
        for (&i, &v) in arg.indices.iter().zip(y.data()) {
            assert_eq!(x.data()[i], v);
        }

        let zeros = Tensor::<f32>::zeros(y.shape());
        assert!(maxpool3d_backward(&arg, &zeros).unwrap().data().iter().all(|&v| v == 0.0));

        assert!(maxpool3d_backward(&arg, &Tensor::<f32>::zeros(&[3])).is_err());
    }

    #[test]
    fn backward_conserves_gradient_mass() {
        let x = random_tensor::<f64>(&[3, 6, 8, 8], 5);
        let (y, arg) = maxpool3d(&x, Pool3d::new(2, 4, 4)).unwrap();
        // dyadic values keep every partial sum exact
        let g = random_tensor::<f64>(y.shape(), 6).map(|v| (v * 64.0).round() / 64.0);
        let gx = maxpool3d_backward(&arg, &g).unwrap();
        assert_eq!(gx.sum(), g.sum());
    }
}
