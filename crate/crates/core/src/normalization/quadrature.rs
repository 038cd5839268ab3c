//! Direct quadrature of the norm integral `∫ rho f^-2 |P|^2 drho` over `(0, ∞)`.
//!
//! The half line is compactified by `t = rho / (rho + 2 rho0)` and `t` is in
//! turn parameterized by its logit `s = ln(t / (1 - t)) = ln(rho / 2 rho0)`,
//! which keeps both ends of `[0, 1)` resolved without cancellation. In `s` the
//! integrand `G(s) = rho^2 f^-2 |P|^2` is evaluated in log space, so profiles
//! whose powers overflow at extreme radii are still handled.
//!
//! Divergence is decided per endpoint from partial integrals over successive
//! doublings (halvings at the origin) of the radius: an endpoint diverges when
//! the increments stop shrinking.

use serde::{Deserialize, Serialize};

use super::Endpoint;
use crate::analytic::ProfileSpec;
use crate::error::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Knobs of [`norm_quadrature_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    /// Radius (in units of `rho0`) where the doubling test at infinity starts.
    pub far_probe: f64,
    /// Radius (in units of `rho0`) where the halving test at the origin starts.
    pub near_probe: f64,
    /// Number of consecutive increment ratios inspected.
    pub doublings: usize,
    /// Increment ratio at or above which an endpoint counts as divergent.
    pub divergence_ratio: f64,
    /// Subinterval budget of each adaptive Gauss-Kronrod call.
    pub max_subintervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            far_probe: 1e8,
            near_probe: 1e-8,
            doublings: 5,
            divergence_ratio: 1.0 - 1e-9,
            max_subintervals: 4000,
        }
    }
}

/// Outcome of the quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuadOutcome {
    Finite { value: f64, error: f64 },
    Divergent { endpoint: Endpoint },
}

impl QuadOutcome {
    pub fn is_finite(&self) -> bool {
        matches!(self, QuadOutcome::Finite { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            QuadOutcome::Finite { value, .. } => Some(*value),
            QuadOutcome::Divergent { .. } => None,
        }
    }
}

// 21-point Kronrod extension of 10-point Gauss-Legendre (QUADPACK qk21)
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One Gauss-Kronrod panel: `(kronrod, |kronrod - gauss|)`.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss-Kronrod on `[a, b]`, starting from `pieces` equal panels.
pub(crate) fn adaptive_gk<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    pieces: usize,
    max_subintervals: usize,
) -> (f64, f64) {
    let pieces = pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * width, if i + 1 == pieces { b } else { a + (i + 1) as f64 * width });
            let (v, e) = gk21(f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= rel_tol * total.abs() || panels.len() >= max_subintervals {
            return (total, err);
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one panel");
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // panel cannot be split further in floating point
            return (total, err);
        }
        let (v1, e1) = gk21(f, lo, mid);
        let (v2, e2) = gk21(f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Integrand in the logit variable, `ln G(s)`.
struct LogIntegrand<'a> {
    spec: &'a ProfileSpec,
    ln_c: f64,
}

impl LogIntegrand<'_> {
    fn ln_g(&self, s: f64) -> f64 {
        let ln_rho = s + self.ln_c;
        let ln_f = crate::params::ln_f_from_ln_rho(ln_rho, self.spec.params.rho0());
        2.0 * ln_rho - 2.0 * ln_f + self.spec.ln_modulus_sq(ln_rho)
    }

    /// `ln ∫_lo^hi G ds` together with the relative error of the inner integral.
    fn ln_integral(&self, lo: f64, hi: f64, rel_tol: f64, max_sub: usize) -> (f64, f64) {
        let shift = self.ln_g(lo).max(self.ln_g(hi)).max(self.ln_g(0.5 * (lo + hi)));
        let g = |s: f64| (self.ln_g(s) - shift).exp();
        let (v, e) = adaptive_gk(&g, lo, hi, rel_tol, 4, max_sub);
        (shift + v.ln(), e / v)
    }

    /// Ratios of successive partial integrals over intervals stepping away from
    /// `start` by `ln 2` in direction `dir`; all at or above the threshold means
    /// the endpoint diverges.
    fn endpoint_diverges(&self, start: f64, dir: f64, opts: &QuadOptions) -> bool {
        let increments: Vec<f64> = (0..=opts.doublings)
            .map(|k| {
                let a = start + dir * k as f64 * LN2;
                let b = a + dir * LN2;
                self.ln_integral(a.min(b), a.max(b), 1e-13, opts.max_subintervals).0
            })
            .collect();
        increments
            .windows(2)
            .all(|w| (w[1] - w[0]).exp() >= opts.divergence_ratio)
    }

    /// Local logarithmic slope `d ln G / ds`.
    fn slope(&self, s: f64) -> f64 {
        let h = 0.25;
        (self.ln_g(s + h) - self.ln_g(s - h)) / (2.0 * h)
    }
}

pub fn norm_quadrature(spec: &ProfileSpec, tol: f64) -> Result<QuadOutcome> {
    norm_quadrature_with(spec, tol, &QuadOptions::default())
}

/// Quadrature of the norm integral to relative tolerance `tol`.
///
/// Returns [`Error::ToleranceNotMet`] with the best estimate if the error bound
/// stays above `tol * value`.
pub fn norm_quadrature_with(spec: &ProfileSpec, tol: f64, opts: &QuadOptions) -> Result<QuadOutcome> {
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if spec.amplitude == num_complex::Complex64::new(0.0, 0.0) {
        return Ok(QuadOutcome::Finite { value: 0.0, error: 0.0 });
    }
    let rho0 = spec.params.rho0();
    let ln_c = (2.0 * rho0).ln();
    let integrand = LogIntegrand { spec, ln_c };
    let s_near = (opts.near_probe * rho0).ln() - ln_c;
    let s_far = (opts.far_probe * rho0).ln() - ln_c;

    let origin = integrand.endpoint_diverges(s_near, -1.0, opts);
    let infinity = integrand.endpoint_diverges(s_far, 1.0, opts);
    match (origin, infinity) {
        (true, true) => return Ok(QuadOutcome::Divergent { endpoint: Endpoint::Both }),
        (true, false) => return Ok(QuadOutcome::Divergent { endpoint: Endpoint::Origin }),
        (false, true) => return Ok(QuadOutcome::Divergent { endpoint: Endpoint::Infinity }),
        (false, false) => {}
    }

    // common scale so that exp stays representable
    let shift = (0..=256)
        .map(|i| integrand.ln_g(s_near + (s_far - s_near) * i as f64 / 256.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let g = |s: f64| (integrand.ln_g(s) - shift).exp();
    let inner_tol = 1e-2 * tol;

    let (mut value, mut error) = adaptive_gk(&g, s_near, s_far, inner_tol, 64, opts.max_subintervals);

    // extend each side until the extrapolated exponential tail is negligible
    for dir in [1.0, -1.0] {
        let mut edge = if dir > 0.0 { s_far } else { s_near };
        let mut width = 8.0;
        let mut settled = false;
        for _ in 0..64 {
            let slope = integrand.slope(edge);
            let decaying = slope * dir < 0.0;
            let tail = if decaying { g(edge) / slope.abs() } else { f64::INFINITY };
            if tail <= 1e-3 * tol * value.abs() {
                value += tail;
                error += tail;
                settled = true;
                break;
            }
            let (lo, hi) = if dir > 0.0 { (edge, edge + width) } else { (edge - width, edge) };
            let (v, e) = adaptive_gk(&g, lo, hi, inner_tol, 8, opts.max_subintervals);
            value += v;
            error += e;
            edge += dir * width;
            width *= 2.0;
        }
        if !settled {
            return Err(Error::ToleranceNotMet {
                value: value * shift.exp(),
                error: f64::INFINITY,
            });
        }
    }

    let scale = shift.exp();
    let (value, error) = (value * scale, error * scale);
    if !(error <= tol * value.abs()) {
        return Err(Error::ToleranceNotMet { value, error });
    }
    Ok(QuadOutcome::Finite { value, error })
}
