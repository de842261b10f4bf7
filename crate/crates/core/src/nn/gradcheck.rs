//! Central-difference gradient estimates, evaluated in 64-bit.

use alloc::vec::Vec;

/// `(f(θ + h·e_i) - f(θ - h·e_i)) / 2h` for every coordinate `i`.
pub fn finite_diff_gradient(mut loss: impl FnMut(&[f64]) -> f64, params: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut probe = params.to_vec();
    (0..params.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = loss(&probe);
            probe[i] = orig - h;
            let down = loss(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)` in the Euclidean norm; zero when both vanish.
pub fn relative_error<T: crate::Real>(analytic: &[T], estimate: &[f64]) -> f64 {
    assert_eq!(analytic.len(), estimate.len());
    let (mut diff, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&a, &b) in analytic.iter().zip(estimate) {
        let a = a.to_f64();
        diff += (a - b) * (a - b);
        na += a * a;
        nb += b * b;
    }
    let scale = libm::sqrt(na.max(nb));
    if scale == 0.0 {
        0.0
    } else {
        libm::sqrt(diff) / scale
    }
}
