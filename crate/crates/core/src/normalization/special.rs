//! Special functions for the Beta-function norm integrals.

pub use statrs::function::beta::ln_beta;
pub use statrs::function::gamma::{digamma, ln_gamma};

/// Trigamma `psi'(x)` for `x > 0`: upward recurrence to `x >= 20`, then the
/// asymptotic series in `1/x`.
pub fn trigamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    let mut z = x;
    while z < 20.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let r = 1.0 / z;
    let r2 = r * r;
    // 1/z + 1/2z^2 + sum B_2k / z^(2k+1)
    let series = r
        + 0.5 * r2
        + r * r2
            * (1.0 / 6.0
                - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 * (1.0 / 30.0 - r2 * (5.0 / 66.0)))));
    acc + series
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trigamma_reference_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-13);
        // psi'(x) - psi'(x+1) = 1/x^2
        for x in [0.1, 0.77, 3.2, 14.0, 250.0] {
            assert!((trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)).abs() < 1e-13 * trigamma(x));
        }
    }

    #[test]
    fn trigamma_is_derivative_of_digamma() {
        for x in [0.3, 1.5, 7.0, 42.0] {
            let h = 1e-5 * x;
            let fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
            assert!((fd - trigamma(x)).abs() < 1e-7 * trigamma(x), "{x}");
        }
    }

    #[test]
    fn beta_small_integers() {
        // B(1, 2) = 1/2, B(2, 3) = 1/12
        assert!((ln_beta(1.0, 2.0).exp() - 0.5).abs() < 1e-14);
        assert!((ln_beta(2.0, 3.0).exp() - 1.0 / 12.0).abs() < 1e-14);
    }
}
