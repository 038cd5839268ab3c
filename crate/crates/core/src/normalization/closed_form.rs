use serde::{Deserialize, Serialize};

use super::special::{digamma, ln_beta, trigamma};
use super::Endpoint;
use crate::analytic::ProfileSpec;

/// Finite norm or the endpoint(s) where the integral diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormValue {
    Finite { value: f64 },
    Divergent { endpoint: Endpoint },
}

impl NormValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, NormValue::Finite { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            NormValue::Finite { value } => Some(*value),
            NormValue::Divergent { .. } => None,
        }
    }

    pub fn endpoint(&self) -> Option<Endpoint> {
        match self {
            NormValue::Finite { .. } => None,
            NormValue::Divergent { endpoint } => Some(*endpoint),
        }
    }
}

/// Exponents `(a, b)` such that the norm integrand is
/// `|amp|^2 rho^(2a-1) (1 + rho^2/c^2)^(-b)` up to the eigenvector weight.
pub fn beta_exponents(spec: &ProfileSpec) -> (f64, f64) {
    let a = spec.radial_power() + 1.0;
    let b = 2.0 - 2.0 * spec.f_exponent().re;
    (a, b)
}

/// Convergence verdict implied by `0 < a < b`.
pub fn convergence(a: f64, b: f64) -> Option<Endpoint> {
    match (a > 0.0, b - a > 0.0) {
        (true, true) => None,
        (false, true) => Some(Endpoint::Origin),
        (true, false) => Some(Endpoint::Infinity),
        (false, false) => Some(Endpoint::Both),
    }
}

/// Norm integral from `∫ rho^(2a-1) (1 + rho^2/c^2)^-b drho = (c^(2a)/2) B(a, b-a)`,
/// `c = 2 rho0`. The secular solution picks up the first and second
/// `b`-derivatives of the Beta function for its `ln f` factors.
pub fn norm_closed_form(spec: &ProfileSpec) -> NormValue {
    let (a, b) = beta_exponents(spec);
    if let Some(endpoint) = convergence(a, b) {
        return NormValue::Divergent { endpoint };
    }
    let amp2 = spec.amplitude.norm_sqr();
    if amp2 == 0.0 {
        return NormValue::Finite { value: 0.0 };
    }
    let c = 2.0 * spec.params.rho0();
    let base = amp2 * (2.0 * a * c.ln() - std::f64::consts::LN_2 + ln_beta(a, b - a)).exp();
    let v = spec.eigenvector();
    let v2 = v[0].norm_sqr() + v[1].norm_sqr();
    let value = if spec.secular {
        let w = spec.partner_vector();
        let w2 = w[0].norm_sqr() + w[1].norm_sqr();
        let cross = (v[0] * w[0].conj() + v[1] * w[1].conj()).re;
        // moments of ln f against the Beta weight
        let m1 = digamma(b) - digamma(b - a);
        let m2 = m1 * m1 + trigamma(b - a) - trigamma(b);
        base * (v2 * m2 + 2.0 * cross * m1 + w2)
    } else {
        base * v2
    };
    NormValue::Finite { value }
}
