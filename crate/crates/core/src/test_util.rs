use rand::Rng;

use crate::nn::Pool3d;
use crate::{Real, Tensor};

pub(crate) use crate::nn::relative_error;

/// Uniform values in [-1, 1), deterministic in `seed`.
pub(crate) fn random_tensor<T: Real>(shape: &[usize], seed: u64) -> Tensor<T> {
    let mut rng = crate::seed::rng(seed);
    let len = shape.iter().product();
    Tensor::from_vec(shape, (0..len).map(|_| T::from_f64(rng.random_range(-1.0..1.0))).collect()).unwrap()
}

/// Window max by explicit enumeration of every window element.
pub(crate) fn pool_naive(x: &Tensor<f32>, pool: Pool3d) -> Tensor<f32> {
    let s = x.shape();
    let out = [s[0], s[1] / pool.depth, s[2] / pool.height, s[3] / pool.width];
    let mut y = Tensor::zeros(&out);
    for c in 0..out[0] {
        for d in 0..out[1] {
            for h in 0..out[2] {
                for w in 0..out[3] {
                    let mut best = f32::NEG_INFINITY;
                    for a in 0..pool.depth {
                        for b in 0..pool.height {
                            for e in 0..pool.width {
                                best = best.max(x.get(&[c, d * pool.depth + a, h * pool.height + b, w * pool.width + e]));
                            }
                        }
                    }
                    y.set(&[c, d, h, w], best);
                }
            }
        }
    }
    y
}
