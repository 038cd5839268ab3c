//! Residual operators for the massless and massive radial systems, the
//! massive system solved for the radial derivatives, and an adaptive
//! propagator used to cross-check the closed forms.

mod integrator;
mod verify;

pub use integrator::{integrate, integrate_toward, STEP_FLOOR_REL};
pub use verify::{
    default_grid, log_grid, verify_analytic, verify_mode, BranchCheck, VerifyOptions, VerifyReport,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{Branch, SpinorState};
use crate::error::{Error, Result};
use crate::params::{vielbein, CouplingParams, VielbeinSample};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Left-hand sides of one massless 2x2 system at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasslessResidual {
    pub r1: Complex64,
    pub r2: Complex64,
    /// Largest individual term magnitude.
    pub scale: f64,
}

impl MasslessResidual {
    /// `max(|r1|, |r2|) / scale`, zero for an identically vanishing input.
    pub fn relative(&self) -> f64 {
        let r = self.r1.norm().max(self.r2.norm());
        if r == 0.0 {
            0.0
        } else {
            r / self.scale
        }
    }
}

/// Left-hand sides of the four massive equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledResidual {
    pub r_a1: Complex64,
    pub r_a2: Complex64,
    pub r_b1: Complex64,
    pub r_b2: Complex64,
    pub m: f64,
    /// Largest term magnitude of the two A equations.
    pub scale_a: f64,
    /// Largest term magnitude of the two B equations.
    pub scale_b: f64,
}

impl CoupledResidual {
    /// Each component relative to the largest term of its own equation pair.
    pub fn components_relative(&self) -> [f64; 4] {
        let rel = |z: Complex64, scale: f64| if z.norm() == 0.0 { 0.0 } else { z.norm() / scale };
        [
            rel(self.r_a1, self.scale_a),
            rel(self.r_a2, self.scale_a),
            rel(self.r_b1, self.scale_b),
            rel(self.r_b2, self.scale_b),
        ]
    }

    pub fn relative(&self) -> f64 {
        self.components_relative().into_iter().fold(0.0, f64::max)
    }
}

/// Radial coefficients shared by the equations of one branch.
struct Coefficients {
    /// `-n/rho` (A) or `(n+1)/rho` (B), as it appears inside the bracket.
    radial: f64,
    /// `(1/2f) f'` times the bracket factor of component I.
    diag_i: f64,
    diag_ii: f64,
    /// `(1/2f) f' 2F̃⊞` and `(1/2f) f' 2F̃⊟`.
    mix_plus: f64,
    mix_minus: f64,
}

impl Coefficients {
    fn new(c: &CouplingParams, branch: Branch, vb: &VielbeinSample) -> Self {
        let (radial, two_k) = match branch {
            Branch::A => (-c.n() / vb.rho, 1.0 - 2.0 * c.f56() - 2.0 * c.ft56()),
            Branch::B => ((c.n() + 1.0) / vb.rho, 1.0 + 2.0 * c.f56() - 2.0 * c.ft56()),
        };
        let h = vb.half_dlogf;
        Self {
            radial,
            diag_i: h * (two_k - 2.0 * c.ft3()),
            diag_ii: h * (two_k + 2.0 * c.ft3()),
            mix_plus: h * 2.0 * c.ftp(),
            mix_minus: h * 2.0 * c.ftm(),
        }
    }

    /// The two massless bracket expressions plus the largest term magnitude.
    fn brackets(
        &self,
        x: (Complex64, Complex64),
        dx: (Complex64, Complex64),
    ) -> (Complex64, Complex64, f64) {
        let t1 = [dx.0, x.0 * self.radial, -x.0 * self.diag_i, -x.1 * self.mix_plus];
        let t2 = [dx.1, x.1 * self.radial, -x.1 * self.diag_ii, -x.0 * self.mix_minus];
        let scale = t1.iter().chain(&t2).map(|z| z.norm()).fold(0.0, f64::max);
        (t1.iter().sum(), t2.iter().sum(), scale)
    }

    /// Derivatives solving the massless bracket equations.
    fn massless_derivative(&self, x: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (
            x.0 * (self.diag_i - self.radial) + x.1 * self.mix_plus,
            x.1 * (self.diag_ii - self.radial) + x.0 * self.mix_minus,
        )
    }
}

fn positive_radius(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("radius must be positive, got {rho}")))
    }
}

fn massless_residual(
    branch: Branch,
    values: (Complex64, Complex64),
    derivs: (Complex64, Complex64),
    c: &CouplingParams,
    rho: f64,
) -> Result<MasslessResidual> {
    positive_radius(rho)?;
    let vb = vielbein(rho, c.rho0())?;
    let (r1, r2, scale) = Coefficients::new(c, branch, &vb).brackets(values, derivs);
    Ok(MasslessResidual { r1, r2, scale })
}

/// Massless A system evaluated on `(𝒜ᴵ, 𝒜ᴵᴵ)` and their derivatives.
pub fn massless_residual_a(
    values: (Complex64, Complex64),
    derivs: (Complex64, Complex64),
    c: &CouplingParams,
    rho: f64,
) -> Result<MasslessResidual> {
    massless_residual(Branch::A, values, derivs, c, rho)
}

/// Massless B system evaluated on `(ℬᴵ, ℬᴵᴵ)` and their derivatives.
pub fn massless_residual_b(
    values: (Complex64, Complex64),
    derivs: (Complex64, Complex64),
    c: &CouplingParams,
    rho: f64,
) -> Result<MasslessResidual> {
    massless_residual(Branch::B, values, derivs, c, rho)
}

/// Dispatches on `branch`.
pub fn massless_residual_for(
    branch: Branch,
    values: (Complex64, Complex64),
    derivs: (Complex64, Complex64),
    c: &CouplingParams,
    rho: f64,
) -> Result<MasslessResidual> {
    massless_residual(branch, values, derivs, c, rho)
}

/// The four massive equations `-i f {bracket} + m (partner) = 0`.
pub fn coupled_residual(
    state: &SpinorState,
    derivs: &[Complex64; 4],
    c: &CouplingParams,
    m: f64,
    rho: f64,
) -> Result<CoupledResidual> {
    positive_radius(rho)?;
    let vb = vielbein(rho, c.rho0())?;
    let (a1, a2, sa) = Coefficients::new(c, Branch::A, &vb)
        .brackets((state.a_i, state.a_ii), (derivs[0], derivs[1]));
    let (b1, b2, sb) = Coefficients::new(c, Branch::B, &vb)
        .brackets((state.b_i, state.b_ii), (derivs[2], derivs[3]));
    let pf = -I * vb.f;
    let mass_a = state.b_i.norm().max(state.b_ii.norm()) * m.abs();
    let mass_b = state.a_i.norm().max(state.a_ii.norm()) * m.abs();
    Ok(CoupledResidual {
        r_a1: pf * a1 + state.b_i * m,
        r_a2: pf * a2 + state.b_ii * m,
        r_b1: pf * b1 + state.a_i * m,
        r_b2: pf * b2 + state.a_ii * m,
        m,
        scale_a: (vb.f * sa).max(mass_a),
        scale_b: (vb.f * sb).max(mass_b),
    })
}

/// Radial derivatives `(d𝒜ᴵ, d𝒜ᴵᴵ, dℬᴵ, dℬᴵᴵ)/drho` of the massive system.
///
/// The `-i f` prefactor is divided out, so the mass terms enter as `-i (m/f)`
/// times the partner component.
pub fn coupled_rhs(state: &SpinorState, c: &CouplingParams, m: f64, rho: f64) -> Result<[Complex64; 4]> {
    positive_radius(rho)?;
    let vb = vielbein(rho, c.rho0())?;
    Ok(rhs_with(&vb, c, m, &state.as_array()))
}

pub(crate) fn rhs_with(vb: &VielbeinSample, c: &CouplingParams, m: f64, y: &[Complex64; 4]) -> [Complex64; 4] {
    let (da1, da2) = Coefficients::new(c, Branch::A, vb).massless_derivative((y[0], y[1]));
    let (db1, db2) = Coefficients::new(c, Branch::B, vb).massless_derivative((y[2], y[3]));
    let mass = -I * (m / vb.f);
    [da1 + mass * y[2], da2 + mass * y[3], db1 + mass * y[0], db2 + mass * y[1]]
}

/// Jacobian of [`coupled_rhs`] with respect to the state; column `j` is the
/// response to the `j`-th unit vector. The system is linear, so this is exact.
pub fn rhs_jacobian(c: &CouplingParams, m: f64, rho: f64) -> Result<[[Complex64; 4]; 4]> {
    positive_radius(rho)?;
    let vb = vielbein(rho, c.rho0())?;
    let mut jac = [[Complex64::new(0.0, 0.0); 4]; 4];
    for j in 0..4 {
        let mut e = [Complex64::new(0.0, 0.0); 4];
        e[j] = Complex64::new(1.0, 0.0);
        let col = rhs_with(&vb, c, m, &e);
        for i in 0..4 {
            jac[i][j] = col[i];
        }
    }
    Ok(jac)
}
