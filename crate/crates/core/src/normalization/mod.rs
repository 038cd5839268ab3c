//! Normalizability of the massless profiles with respect to `∫ rho f^-2 |P|^2 drho`.
//!
//! Three verdicts are produced for each profile: the inequality windows on the
//! mode index, a Beta-function closed form, and direct quadrature. Quadrature
//! is treated as ground truth; the other two are predictions checked against it.
//!
//! Sign bookkeeping: the windows are written with a `±` in front of
//! `sqrt(D)`. For branch A the window carrying `+` belongs to the profile with
//! `alpha = -sqrt(D)` (the upper bound is `2(F56 + F̃56 - Re alpha)`), while for
//! branch B the `±` of the window matches the sign of `alpha`. See
//! [`window_sign_for_mode`].

mod closed_form;
mod quadrature;
pub mod special;

pub use closed_form::{beta_exponents, convergence, norm_closed_form, NormValue};
pub use quadrature::{norm_quadrature, norm_quadrature_with, QuadOptions, QuadOutcome};

use serde::{Deserialize, Serialize};

use crate::analytic::{Branch, ProfileSpec};
use crate::eigen::{discriminant, Sign};
use crate::error::Result;
use crate::params::{vielbein, CouplingParams};

/// Relative quadrature tolerance used by [`classify_mode`].
pub const CLASSIFY_QUAD_TOL: f64 = 1e-10;
/// Relative agreement demanded between closed form and quadrature.
pub const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Origin,
    Infinity,
    Both,
}

/// Reading of the printed B window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// The inequality is a condition on `n` exactly as printed.
    PaperLiteral,
    /// The printed variable is the B subscript `n + 1`.
    ShiftedIndex,
}

impl Convention {
    pub const BOTH: [Convention; 2] = [Convention::PaperLiteral, Convention::ShiftedIndex];

    pub fn as_str(self) -> &'static str {
        match self {
            Convention::PaperLiteral => "paper_literal",
            Convention::ShiftedIndex => "shifted_index",
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "paper_literal" | "literal" => Ok(Convention::PaperLiteral),
            "shifted_index" | "shifted" => Ok(Convention::ShiftedIndex),
            other => Err(format!(
                "unknown convention `{other}` (expected paper_literal or shifted_index)"
            )),
        }
    }
}

/// Open interval `lower < n < upper` of normalizable mode indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowInterval {
    pub branch: Branch,
    /// The `±` in front of the square root.
    pub sign: Sign,
    /// Only set for branch B.
    pub convention: Option<Convention>,
    pub lower: f64,
    pub upper: f64,
}

impl WindowInterval {
    pub fn contains(&self, n: f64) -> bool {
        self.lower < n && n < self.upper
    }

    /// Integers in `[n_min, n_max]` strictly inside the window.
    pub fn integers_inside(&self, n_min: i64, n_max: i64) -> Vec<i64> {
        (n_min..=n_max).filter(|&n| self.contains(n as f64)).collect()
    }
}

impl std::fmt::Display for WindowInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}

/// `sqrt(D)` for `D >= 0`, otherwise `Re alpha = 0`.
fn root_real_part(c: &CouplingParams) -> f64 {
    let d = discriminant(c);
    if d >= 0.0 {
        d.sqrt()
    } else {
        0.0
    }
}

/// `-1 < n < 2(F56 + F̃56 ± sqrt(D))`.
pub fn window_a(c: &CouplingParams, sign: Sign) -> WindowInterval {
    WindowInterval {
        branch: Branch::A,
        sign,
        convention: None,
        lower: -1.0,
        upper: 2.0 * (c.f56() + c.ft56() + sign.factor() * root_real_part(c)),
    }
}

/// `2(F56 - F̃56 ± sqrt(D)) < n < 1`, shifted down by one under
/// [`Convention::ShiftedIndex`].
pub fn window_b(c: &CouplingParams, sign: Sign, convention: Convention) -> WindowInterval {
    let lower = 2.0 * (c.f56() - c.ft56() + sign.factor() * root_real_part(c));
    let shift = match convention {
        Convention::PaperLiteral => 0.0,
        Convention::ShiftedIndex => 1.0,
    };
    WindowInterval {
        branch: Branch::B,
        sign,
        convention: Some(convention),
        lower: lower - shift,
        upper: 1.0 - shift,
    }
}

/// Window `±` that describes the profile whose exponent has sign `mode_sign`.
pub fn window_sign_for_mode(branch: Branch, mode_sign: Sign) -> Sign {
    match branch {
        Branch::A => mode_sign.flip(),
        Branch::B => mode_sign,
    }
}

/// `rho f^-2 (|I|^2 + |II|^2)`.
pub fn norm_integrand(spec: &ProfileSpec, rho: f64) -> Result<f64> {
    let (p1, p2) = spec.eval(rho)?;
    let f = vielbein(rho, spec.params.rho0())?.f;
    Ok(rho / (f * f) * (p1.norm_sqr() + p2.norm_sqr()))
}

/// Rescales the amplitude to unit norm. `None` when the norm integral
/// diverges or vanishes.
pub fn unit_normalized(spec: &ProfileSpec) -> Option<ProfileSpec> {
    let norm = norm_closed_form(spec).value()?;
    if !(norm > 0.0) {
        return None;
    }
    Some(spec.with_amplitude(spec.amplitude / norm.sqrt()))
}

/// Which B readings agree with quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionResolution {
    NotApplicable,
    PaperLiteral,
    ShiftedIndex,
    Both,
    Neither,
}

impl ConventionResolution {
    fn from_matches(literal: bool, shifted: bool) -> Self {
        match (literal, shifted) {
            (true, true) => Self::Both,
            (true, false) => Self::PaperLiteral,
            (false, true) => Self::ShiftedIndex,
            (false, false) => Self::Neither,
        }
    }
}

/// Window, closed-form and quadrature verdicts for one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub branch: Branch,
    /// Sign of the exponent `alpha` of the classified profile.
    pub sign: Sign,
    pub n: f64,
    /// Window used for `window_verdict` (shifted reading for branch B).
    pub window: WindowInterval,
    pub window_verdict: bool,
    /// Branch B only: verdict of the literal reading.
    pub literal_verdict: Option<bool>,
    pub closed_form: NormValue,
    pub quadrature: QuadOutcome,
    pub agree: bool,
    pub convention_used: ConventionResolution,
}

fn values_agree(closed: &NormValue, quad: &QuadOutcome) -> bool {
    match (closed, quad) {
        (NormValue::Finite { value: cf }, QuadOutcome::Finite { value: q, error }) => {
            (cf - q).abs() <= (AGREEMENT_TOL * cf.abs()).max(*error)
        }
        (NormValue::Divergent { endpoint: e1 }, QuadOutcome::Divergent { endpoint: e2 }) => e1 == e2,
        _ => false,
    }
}

/// Builds the report for an explicit profile; `tol` is the relative quadrature tolerance.
pub fn classify_profile(spec: &ProfileSpec, tol: f64, opts: &QuadOptions) -> Result<NormReport> {
    let c = &spec.params;
    let n = c.n();
    let window_sign = window_sign_for_mode(spec.branch, spec.mode.sign);
    let closed_form = norm_closed_form(spec);
    let quadrature = norm_quadrature_with(spec, tol, opts)?;
    let truth = quadrature.is_finite();
    let consistent = values_agree(&closed_form, &quadrature);

    let (window, literal_verdict, convention_used) = match spec.branch {
        Branch::A => (window_a(c, window_sign), None, ConventionResolution::NotApplicable),
        Branch::B => {
            let literal = window_b(c, window_sign, Convention::PaperLiteral).contains(n);
            let shifted = window_b(c, window_sign, Convention::ShiftedIndex);
            let resolution = ConventionResolution::from_matches(literal == truth, shifted.contains(n) == truth);
            (shifted, Some(literal), resolution)
        }
    };
    let window_verdict = window.contains(n);
    Ok(NormReport {
        branch: spec.branch,
        sign: spec.mode.sign,
        n,
        window,
        window_verdict,
        literal_verdict,
        closed_form,
        quadrature,
        agree: consistent && window_verdict == truth && closed_form.is_finite() == truth,
        convention_used,
    })
}

/// Reports for the A and B profiles of one eigen-branch.
pub fn classify_mode(c: &CouplingParams, sign: Sign) -> Result<(NormReport, NormReport)> {
    classify_mode_with(c, sign, CLASSIFY_QUAD_TOL, &QuadOptions::default())
}

pub fn classify_mode_with(
    c: &CouplingParams,
    sign: Sign,
    tol: f64,
    opts: &QuadOptions,
) -> Result<(NormReport, NormReport)> {
    let a = classify_profile(&ProfileSpec::new(*c, Branch::A, sign), tol, opts)?;
    let b = classify_profile(&ProfileSpec::new(*c, Branch::B, sign), tol, opts)?;
    Ok((a, b))
}

/// Verdict for a superposition of the two eigen-branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionReport {
    pub plus: NormValue,
    pub minus: NormValue,
    /// Branch with the larger `Re alpha`, which controls the large-radius tail.
    pub dominant: Sign,
    pub normalizable: bool,
}

/// Classifies `plus + minus` by its dominant branch. Both branches share the
/// small-radius behavior, and the window shrinks monotonically with `Re alpha`,
/// so the dominant branch decides.
pub fn classify_superposition(plus: &ProfileSpec, minus: &ProfileSpec) -> Result<SuperpositionReport> {
    if plus.params != minus.params || plus.branch != minus.branch || plus.mode.sign == minus.mode.sign {
        return Err(crate::error::Error::MismatchedSpecs);
    }
    let (p, m) = (norm_closed_form(plus), norm_closed_form(minus));
    let dominant = if plus.f_exponent().re >= minus.f_exponent().re {
        plus.mode.sign
    } else {
        minus.mode.sign
    };
    let normalizable = if dominant == plus.mode.sign { p.is_finite() } else { m.is_finite() };
    Ok(SuperpositionReport {
        plus: p,
        minus: m,
        dominant,
        normalizable,
    })
}
