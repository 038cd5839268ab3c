//! Closed-form massless profiles and their exact radial derivatives.
//!
//! Branch A (`𝒜ₙ`) is `a rho^n f^(k_A + alpha) v` with `k_A = (1 - 2F56 - 2F̃56)/2`,
//! branch B (`ℬₙ₊₁`) is `b rho^(-n-1) f^(k_B + alpha) v` with
//! `k_B = (1 + 2F56 - 2F̃56)/2`, where `v` is the unit eigenvector of the
//! mixing problem. In the degenerate case the partner solution
//! `f^k (ln f * v + w)`, `M w = v`, is available through [`ProfileSpec::secular`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigen_mode, generalized_vector, EigenMode, Sign};
use crate::error::{Error, Result};
use crate::params::{ln_f_from_ln_rho, vielbein, CouplingParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    A,
    B,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::A, Branch::B];

    pub fn as_char(self) -> char {
        match self {
            Branch::A => 'A',
            Branch::B => 'B',
        }
    }

    /// Power of `rho` multiplying the profile.
    pub fn radial_power(self, c: &CouplingParams) -> f64 {
        match self {
            Branch::A => c.n(),
            Branch::B => -c.n() - 1.0,
        }
    }

    /// Real part of the `f` exponent before the mixing exponent is added.
    pub fn base_exponent(self, c: &CouplingParams) -> f64 {
        match self {
            Branch::A => 0.5 * (1.0 - 2.0 * c.f56() - 2.0 * c.ft56()),
            Branch::B => 0.5 * (1.0 + 2.0 * c.f56() - 2.0 * c.ft56()),
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Branch::A),
            "B" | "b" => Ok(Branch::B),
            other => Err(format!("unknown branch `{other}` (expected A or B)")),
        }
    }
}

/// One massless solution: branch, eigen-branch, overall constant and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub branch: Branch,
    pub mode: EigenMode,
    /// Overall constant multiplying the unit eigenvector.
    pub amplitude: Complex64,
    pub params: CouplingParams,
    /// Use the `ln f` partner solution of a degenerate mode.
    pub secular: bool,
}

impl ProfileSpec {
    pub fn new(params: CouplingParams, branch: Branch, sign: Sign) -> Self {
        Self {
            branch,
            mode: eigen_mode(&params, sign),
            amplitude: Complex64::new(1.0, 0.0),
            params,
            secular: false,
        }
    }

    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_mode(mut self, mode: EigenMode) -> Self {
        self.mode = mode;
        self
    }

    /// The `ln f` partner of a degenerate mode; `None` if the mode is not degenerate.
    pub fn secular(self) -> Option<Self> {
        self.mode.degenerate.then_some(Self {
            secular: true,
            ..self
        })
    }

    pub fn radial_power(&self) -> f64 {
        self.branch.radial_power(&self.params)
    }

    /// Complex `f` exponent `k + alpha` (just `k` for the secular solution).
    pub fn f_exponent(&self) -> Complex64 {
        let k = self.branch.base_exponent(&self.params);
        if self.secular {
            Complex64::new(k, 0.0)
        } else {
            self.mode.alpha + k
        }
    }

    /// Unit eigenvector `(amp_i, amp_ii)`.
    pub fn eigenvector(&self) -> [Complex64; 2] {
        [self.mode.amp_i, self.mode.amp_ii]
    }

    /// `w` with `M w = v`, the constant part of the secular solution.
    pub fn partner_vector(&self) -> [Complex64; 2] {
        generalized_vector(&self.params, self.eigenvector())
    }

    fn singular(&self) -> Error {
        Error::SingularOrigin {
            branch: self.branch.as_char(),
            n: self.params.n(),
        }
    }

    /// `rho^p`, with the origin allowed for `p >= 0`.
    fn radial_factor(&self, rho: f64) -> Result<f64> {
        let p = self.radial_power();
        if rho > 0.0 {
            Ok(rho.powf(p))
        } else if p > 0.0 {
            Ok(0.0)
        } else if p == 0.0 {
            Ok(1.0)
        } else {
            Err(self.singular())
        }
    }

    /// `d(rho^p)/drho`, finite at the origin only for `p = 0` or `p >= 1`.
    fn radial_factor_derivative(&self, rho: f64) -> Result<f64> {
        let p = self.radial_power();
        if rho > 0.0 {
            Ok(p * rho.powf(p - 1.0))
        } else if p == 0.0 || p > 1.0 {
            Ok(0.0)
        } else if p == 1.0 {
            Ok(1.0)
        } else {
            Err(self.singular())
        }
    }

    /// Profile value `(component I, component II)` at `rho`.
    pub fn eval(&self, rho: f64) -> Result<(Complex64, Complex64)> {
        let vb = vielbein(rho, self.params.rho0())?;
        let radial = self.radial_factor(rho)?;
        let fpow = (self.f_exponent() * vb.ln_f).exp();
        let u = if self.secular {
            let (v, w) = (self.eigenvector(), self.partner_vector());
            [v[0] * vb.ln_f + w[0], v[1] * vb.ln_f + w[1]]
        } else {
            self.eigenvector()
        };
        let scale = self.amplitude * fpow * radial;
        Ok((scale * u[0], scale * u[1]))
    }

    /// Exact `d/drho` of [`ProfileSpec::eval`].
    pub fn derivative(&self, rho: f64) -> Result<(Complex64, Complex64)> {
        let vb = vielbein(rho, self.params.rho0())?;
        let radial = self.radial_factor(rho)?;
        let dradial = self.radial_factor_derivative(rho)?;
        let e = self.f_exponent();
        let fpow = (e * vb.ln_f).exp();
        let dlogf = 2.0 * vb.half_dlogf;
        let v = self.eigenvector();
        // d/drho [rho^p f^e u] = f^e [rho^p' u + rho^p (e f'/f u + u')]
        let (u, du) = if self.secular {
            let w = self.partner_vector();
            (
                [v[0] * vb.ln_f + w[0], v[1] * vb.ln_f + w[1]],
                [v[0] * dlogf, v[1] * dlogf],
            )
        } else {
            (v, [Complex64::new(0.0, 0.0); 2])
        };
        let component = |i: usize| {
            self.amplitude * fpow * (u[i] * dradial + (e * dlogf * u[i] + du[i]) * radial)
        };
        Ok((component(0), component(1)))
    }

    /// `ln(|I|^2 + |II|^2)` evaluated from `ln rho`, valid at radii whose powers
    /// would overflow a direct evaluation.
    pub fn ln_modulus_sq(&self, ln_rho: f64) -> f64 {
        let ln_f = ln_f_from_ln_rho(ln_rho, self.params.rho0());
        let e = self.f_exponent().re;
        let vec_sq = if self.secular {
            let (v, w) = (self.eigenvector(), self.partner_vector());
            (v[0] * ln_f + w[0]).norm_sqr() + (v[1] * ln_f + w[1]).norm_sqr()
        } else {
            self.mode.amp_i.norm_sqr() + self.mode.amp_ii.norm_sqr()
        };
        2.0 * self.amplitude.norm().ln() + 2.0 * self.radial_power() * ln_rho + 2.0 * e * ln_f + vec_sq.ln()
    }
}

/// `(𝒜ₙᴵ, 𝒜ₙᴵᴵ)` at `rho`.
pub fn massless_profile_a(spec: &ProfileSpec, rho: f64) -> Result<(Complex64, Complex64)> {
    if spec.branch != Branch::A {
        return Err(Error::DomainError("expected a branch-A profile".into()));
    }
    spec.eval(rho)
}

/// `(ℬₙ₊₁ᴵ, ℬₙ₊₁ᴵᴵ)` at `rho`.
pub fn massless_profile_b(spec: &ProfileSpec, rho: f64) -> Result<(Complex64, Complex64)> {
    if spec.branch != Branch::B {
        return Err(Error::DomainError("expected a branch-B profile".into()));
    }
    spec.eval(rho)
}

pub fn profile_derivative(spec: &ProfileSpec, rho: f64) -> Result<(Complex64, Complex64)> {
    spec.derivative(rho)
}

/// Sum of the two eigen-branches of one profile family at `rho`.
pub fn superpose(plus: &ProfileSpec, minus: &ProfileSpec, rho: f64) -> Result<(Complex64, Complex64)> {
    if plus.params != minus.params || plus.branch != minus.branch || plus.mode.sign == minus.mode.sign {
        return Err(Error::MismatchedSpecs);
    }
    let (p1, p2) = plus.eval(rho)?;
    let (m1, m2) = minus.eval(rho)?;
    Ok((p1 + m1, p2 + m2))
}

/// The four radial functions `(𝒜ₙᴵ, 𝒜ₙᴵᴵ, ℬₙ₊₁ᴵ, ℬₙ₊₁ᴵᴵ)` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorState {
    pub a_i: Complex64,
    pub a_ii: Complex64,
    pub b_i: Complex64,
    pub b_ii: Complex64,
    pub rho: f64,
}

impl SpinorState {
    pub fn zero(rho: f64) -> Self {
        Self::from_array([Complex64::new(0.0, 0.0); 4], rho)
    }

    pub fn from_array(v: [Complex64; 4], rho: f64) -> Self {
        Self {
            a_i: v[0],
            a_ii: v[1],
            b_i: v[2],
            b_ii: v[3],
            rho,
        }
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.a_i, self.a_ii, self.b_i, self.b_ii]
    }

    /// State built from closed-form profiles; either block may be left at zero.
    pub fn from_profiles(a: Option<&ProfileSpec>, b: Option<&ProfileSpec>, rho: f64) -> Result<Self> {
        let mut s = Self::zero(rho);
        if let Some(spec) = a {
            (s.a_i, s.a_ii) = massless_profile_a(spec, rho)?;
        }
        if let Some(spec) = b {
            (s.b_i, s.b_ii) = massless_profile_b(spec, rho)?;
        }
        Ok(s)
    }

    /// Euclidean norm of the four components.
    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
