use serde::{Deserialize, Serialize};

use super::{integrate_toward, massless_residual_for};
use crate::analytic::{Branch, ProfileSpec, SpinorState};
use crate::eigen::{eigen_mode, EigenMode, Sign};
use crate::error::{Error, Result};
use crate::params::CouplingParams;

/// `count` log-spaced radii in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// 100 log-spaced radii in `[1e-3, 20] rho0`.
pub fn default_grid(rho0: f64) -> Vec<f64> {
    log_grid(1e-3 * rho0, 20.0 * rho0, 100)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Local tolerance handed to the propagator.
    pub integrator_tol: f64,
    /// Allowed relative endpoint deviation of the propagated profile.
    pub propagation_tol: f64,
    pub propagate: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            integrator_tol: 1e-10,
            propagation_tol: 1e-6,
            propagate: true,
        }
    }
}

/// Checks of one closed-form profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCheck {
    pub branch: Branch,
    pub secular: bool,
    /// Largest relative massless residual over the grid.
    pub max_residual: f64,
    /// Relative deviation of the propagated state from the closed form.
    pub propagation_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub sign: Sign,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub degenerate: bool,
    pub checks: Vec<BranchCheck>,
    pub tol: f64,
    pub propagation_tol: f64,
    pub pass: bool,
}

impl VerifyReport {
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    pub fn max_propagation_deviation(&self) -> Option<f64> {
        self.checks
            .iter()
            .filter_map(|c| c.propagation_deviation)
            .reduce(f64::max)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::DomainError("verification grid is empty".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) || !grid.iter().all(|r| r.is_finite()) {
        return Err(Error::DomainError(
            "verification grid must be strictly positive and ascending".into(),
        ));
    }
    Ok(())
}

fn relative_state_deviation(got: &SpinorState, want: &SpinorState) -> f64 {
    let diff: f64 = got
        .as_array()
        .iter()
        .zip(want.as_array())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    diff / want.norm()
}

fn branch_state(spec: &ProfileSpec, rho: f64) -> Result<SpinorState> {
    match spec.branch {
        Branch::A => SpinorState::from_profiles(Some(spec), None, rho),
        Branch::B => SpinorState::from_profiles(None, Some(spec), rho),
    }
}

fn check_profile(spec: &ProfileSpec, grid: &[f64], opts: &VerifyOptions) -> Result<BranchCheck> {
    let mut max_residual: f64 = 0.0;
    for &rho in grid {
        let r = massless_residual_for(spec.branch, spec.eval(rho)?, spec.derivative(rho)?, &spec.params, rho)?;
        max_residual = max_residual.max(r.relative());
    }
    let propagation_deviation = if opts.propagate && grid.len() > 1 {
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        // integrate along the direction in which this solution dominates its partner
        let (from, to) = if spec.mode.alpha.re < 0.0 && !spec.secular {
            (hi, lo)
        } else {
            (lo, hi)
        };
        let init = branch_state(spec, from)?;
        let path = integrate_toward(&spec.params, 0.0, &init, to, opts.integrator_tol)?;
        let end = path.last().expect("path holds the initial state");
        Some(relative_state_deviation(end, &branch_state(spec, to)?))
    } else {
        None
    };
    Ok(BranchCheck {
        branch: spec.branch,
        secular: spec.secular,
        max_residual,
        propagation_deviation,
    })
}

/// Verifies the closed forms built from an explicit `mode` (which may be
/// deliberately wrong) on both branches.
pub fn verify_mode(
    c: &CouplingParams,
    mode: EigenMode,
    grid: &[f64],
    tol: f64,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    check_grid(grid)?;
    let mut checks = Vec::new();
    for branch in Branch::BOTH {
        let spec = ProfileSpec::new(*c, branch, mode.sign).with_mode(mode);
        checks.push(check_profile(&spec, grid, opts)?);
        if let Some(secular) = spec.secular() {
            checks.push(check_profile(&secular, grid, opts)?);
        }
    }
    let pass = checks.iter().all(|ch| {
        ch.max_residual <= tol && ch.propagation_deviation.is_none_or(|d| d <= opts.propagation_tol)
    });
    Ok(VerifyReport {
        sign: mode.sign,
        alpha_re: mode.alpha.re,
        alpha_im: mode.alpha.im,
        degenerate: mode.degenerate,
        checks,
        tol,
        propagation_tol: opts.propagation_tol,
        pass,
    })
}

/// Residual and propagation checks of the closed-form solutions for one sign.
pub fn verify_analytic(c: &CouplingParams, sign: Sign, grid: &[f64], tol: f64) -> Result<VerifyReport> {
    verify_mode(c, eigen_mode(c, sign), grid, tol, &VerifyOptions::default())
}
