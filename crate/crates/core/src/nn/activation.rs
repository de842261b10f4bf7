use crate::{Real, Tensor};

pub fn relu<T: Real>(x: &Tensor<T>) -> Tensor<T> {
    x.map(|v| if v > T::ZERO { v } else { T::ZERO })
}

/// Passes `grad_out` where `x > 0`; the subgradient at exactly zero is 0.
pub fn relu_backward<T: Real>(x: &Tensor<T>, grad_out: &Tensor<T>) -> crate::Result<Tensor<T>> {
    if x.shape() != grad_out.shape() {
        return Err(crate::Error::ShapeMismatch("relu grad shape"));
    }
    let mut g = grad_out.clone();
    for (gv, &xv) in g.data_mut().iter_mut().zip(x.data()) {
        if xv <= T::ZERO {
            *gv = T::ZERO;
        }
    }
    Ok(g)
}

pub fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::ZERO {
        T::ONE / (T::ONE + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::ONE + e)
    }
}

/// Binary cross-entropy of a sigmoid output, returned with its derivative
/// with respect to the logit.
///
/// Uses `max(z,0) - z*y + ln(1 + e^-|z|)`, which never overflows.
pub fn sigmoid_bce<T: Real>(logit: T, label: u8) -> (T, T) {
    debug_assert!(label <= 1);
    let y = if label == 1 { T::ONE } else { T::ZERO };
    let loss = logit.max(T::ZERO) - logit * y + (-logit.abs()).exp().ln_1p();
    (loss, sigmoid(logit) - y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn relu_values_and_zero_subgradient() {
        let x = Tensor::from_vec(&[3], vec![-1.0f32, 2.0, 0.0]).unwrap();
        assert_eq!(relu(&x).data(), &[0.0, 2.0, 0.0]);
        let g = relu_backward(&x, &Tensor::filled(&[3], 1.0)).unwrap();
        assert_eq!(g.data(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn bce_at_zero_logit() {
        for label in [0, 1] {
            let (loss, _) = sigmoid_bce(0.0f64, label);
            assert!((loss - core::f64::consts::LN_2).abs() < 1e-12);
        }
        assert_eq!(sigmoid_bce(0.0f64, 1).1, -0.5);
        assert_eq!(sigmoid_bce(0.0f64, 0).1, 0.5);
    }

    #[test]
    fn bce_saturated_logits() {
        let (loss, grad) = sigmoid_bce(30.0f32, 1);
        assert!(loss >= 0.0 && loss < 1e-12);
        assert!(grad.is_finite());
        let (loss, grad) = sigmoid_bce(-30.0f32, 1);
        // ln(1 + e^30) = 30 + ln(1 + e^-30)
        assert!((loss - 30.0).abs() < 1e-5);
        assert!((grad + 1.0).abs() < 1e-6);
        let (loss, _) = sigmoid_bce(-1e4f32, 1);
        assert!(loss.is_finite());
    }

    #[test]
    fn sigmoid_is_stable_and_bounded() {
        assert_eq!(sigmoid(0.0f32), 0.5);
        assert!(sigmoid(-100.0f64) > 0.0);
        assert!(sigmoid(100.0f64) <= 1.0);
        assert!(sigmoid(-1000.0f32).is_finite());
    }
}
