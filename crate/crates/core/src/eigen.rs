//! The 2x2 mixing problem behind the massless ansatz.
//!
//! Substituting `rho^n f^k f^alpha (a1, a2)` into the massless A system leaves
//! `M (a1, a2) = alpha (a1, a2)` with
//!
//! ```text
//!     M = [ -ft3   ftp ]
//!         [  ftm   ft3 ]
//! ```
//!
//! so `alpha = ±sqrt(ft3^2 + ftp*ftm)`. The same matrix governs the B system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::CouplingParams;

/// Relative size of the radicand below which it is treated as zero.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Branch of the square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" | "p" => Ok(Sign::Plus),
            "minus" | "-" | "m" => Ok(Sign::Minus),
            other => Err(format!("unknown sign `{other}` (expected plus or minus)")),
        }
    }
}

/// One eigen-branch of the mixing problem.
///
/// `(amp_i, amp_ii)` is unit-normalized, with the larger component real and
/// positive. There is no separate exponent for the second ansatz term: it
/// coincides with `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub alpha: Complex64,
    pub amp_i: Complex64,
    pub amp_ii: Complex64,
    /// Radicand vanishes while the mixing matrix does not.
    pub degenerate: bool,
    pub sign: Sign,
}

impl EigenMode {
    /// Same amplitudes with a shifted exponent. Used to build deliberately wrong
    /// profiles in sensitivity checks.
    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// Mixing matrix `M` with `M v = alpha v`.
pub fn mixing_matrix(c: &CouplingParams) -> [[f64; 2]; 2] {
    [[-c.ft3(), c.ftp()], [c.ftm(), c.ft3()]]
}

/// Radicand `D = ft3^2 + ftp*ftm`; negative values give imaginary `alpha`.
pub fn discriminant(c: &CouplingParams) -> f64 {
    c.ft3() * c.ft3() + c.ftp() * c.ftm()
}

fn discriminant_scale(c: &CouplingParams) -> f64 {
    c.ft3() * c.ft3() + (c.ftp() * c.ftm()).abs()
}

/// True when the radicand vanishes (to [`DEGENERACY_TOL`]) but `M != 0`.
pub fn is_degenerate(c: &CouplingParams) -> bool {
    let scale = discriminant_scale(c);
    let coupled = c.ftp() != 0.0 || c.ftm() != 0.0;
    coupled && discriminant(c).abs() <= DEGENERACY_TOL * scale
}

/// `(alpha_plus, alpha_minus)` with `alpha_minus = -alpha_plus`.
pub fn alpha_branches(c: &CouplingParams) -> (Complex64, Complex64) {
    let d = discriminant(c);
    let plus = if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    };
    (plus, -plus)
}

fn normalized(v: [Complex64; 2]) -> [Complex64; 2] {
    let (m0, m1) = (v[0].norm(), v[1].norm());
    let norm = m0.hypot(m1);
    let anchor = if m0 >= m1 { v[0] } else { v[1] };
    // divide out the anchor's phase so the larger component is real positive
    let phase = anchor / anchor.norm();
    [v[0] / (phase * norm), v[1] / (phase * norm)]
}

/// Eigenvector and exponent for one branch.
///
/// Of the two equivalent ratio forms `a2/a1 = (alpha + ft3)/ftp = ftm/(alpha - ft3)`
/// the one with the larger denominator is used.
pub fn eigen_mode(c: &CouplingParams, sign: Sign) -> EigenMode {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (ft3, ftp, ftm) = (c.ft3(), c.ftp(), c.ftm());

    if ftp == 0.0 && ftm == 0.0 {
        let alpha = sign.factor() * ft3.abs();
        // (1,0) has eigenvalue -ft3; with ft3 = 0 the minus branch takes it
        let first = if ft3 == 0.0 { sign == Sign::Minus } else { alpha == -ft3 };
        let (amp_i, amp_ii) = if first { (one, zero) } else { (zero, one) };
        return EigenMode {
            alpha: Complex64::new(alpha, 0.0),
            amp_i,
            amp_ii,
            degenerate: false,
            sign,
        };
    }

    if is_degenerate(c) {
        // nilpotent M: the kernel is orthogonal to its larger row
        let row0 = (-ft3).hypot(ftp);
        let row1 = ftm.hypot(ft3);
        let v = if row0 >= row1 {
            [Complex64::new(ftp, 0.0), Complex64::new(ft3, 0.0)]
        } else {
            [Complex64::new(ft3, 0.0), Complex64::new(-ftm, 0.0)]
        };
        let [amp_i, amp_ii] = normalized(v);
        return EigenMode {
            alpha: zero,
            amp_i,
            amp_ii,
            degenerate: true,
            sign,
        };
    }

    let (plus, minus) = alpha_branches(c);
    let alpha = match sign {
        Sign::Plus => plus,
        Sign::Minus => minus,
    };
    let v = if ftp.abs() >= (alpha - ft3).norm() {
        [Complex64::new(ftp, 0.0), alpha + ft3]
    } else {
        [alpha - ft3, Complex64::new(ftm, 0.0)]
    };
    let [amp_i, amp_ii] = normalized(v);
    EigenMode {
        alpha,
        amp_i,
        amp_ii,
        degenerate: false,
        sign,
    }
}

/// Generalized eigenvector `w` with `M w = v` for the nilpotent case.
///
/// `M` has rank one there, so `M^T v / |M|_F^2` is the minimum-norm
/// least-squares solution.
pub fn generalized_vector(c: &CouplingParams, v: [Complex64; 2]) -> [Complex64; 2] {
    let m = mixing_matrix(c);
    let frob2: f64 = m.iter().flatten().map(|x| x * x).sum();
    if frob2 == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [
        (v[0] * m[0][0] + v[1] * m[1][0]) / frob2,
        (v[0] * m[0][1] + v[1] * m[1][1]) / frob2,
    ]
}

/// `M v`.
pub fn apply_mixing(c: &CouplingParams, v: [Complex64; 2]) -> [Complex64; 2] {
    let m = mixing_matrix(c);
    [v[0] * m[0][0] + v[1] * m[0][1], v[0] * m[1][0] + v[1] * m[1][1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ft3: f64, ftp: f64, ftm: f64) -> CouplingParams {
        CouplingParams::new(0.0, 0.0, ft3, ftp, ftm, 0.0, 1.0).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&params(3.0, 2.0, 8.0)), 25.0);
        assert_eq!(discriminant(&params(0.0, 1.0, -1.0)), -1.0);
        assert_eq!(discriminant(&params(0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn alpha_branch_examples() {
        let (p, m) = alpha_branches(&params(3.0, 2.0, 8.0));
        assert_eq!((p, m), (Complex64::new(5.0, 0.0), Complex64::new(-5.0, 0.0)));
        let (p, m) = alpha_branches(&params(0.0, 1.0, -1.0));
        assert_eq!((p, m), (Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)));
        let (p, m) = alpha_branches(&params(0.0, 0.0, 0.0));
        assert_eq!(p.norm() + m.norm(), 0.0);
    }

    #[test]
    fn both_ratio_forms_agree_on_generic_example() {
        let mode = eigen_mode(&params(3.0, 2.0, 8.0), Sign::Plus);
        assert_eq!(mode.alpha, Complex64::new(5.0, 0.0));
        let ratio = mode.amp_ii / mode.amp_i;
        assert!(close(ratio, Complex64::new(4.0, 0.0), 1e-14));
        assert!(close(Complex64::new(8.0, 0.0) / (mode.alpha - 3.0), ratio, 1e-14));
        assert!(!mode.degenerate);
    }

    #[test]
    fn diagonal_case_picks_unit_vectors() {
        let mode = eigen_mode(&params(1.0, 0.0, 0.0), Sign::Minus);
        assert_eq!(mode.alpha, Complex64::new(-1.0, 0.0));
        assert_eq!((mode.amp_i, mode.amp_ii), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
        let mode = eigen_mode(&params(1.0, 0.0, 0.0), Sign::Plus);
        assert_eq!((mode.amp_i, mode.amp_ii), (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)));
        // negative ft3: plus branch has alpha = +1 = -ft3, i.e. the first component
        let mode = eigen_mode(&params(-1.0, 0.0, 0.0), Sign::Plus);
        assert_eq!(mode.alpha, Complex64::new(1.0, 0.0));
        assert_eq!(mode.amp_i, Complex64::new(1.0, 0.0));
        let zero = eigen_mode(&params(0.0, 0.0, 0.0), Sign::Minus);
        assert_eq!(zero.amp_i, Complex64::new(1.0, 0.0));
        assert!(!zero.degenerate);
    }

    #[test]
    fn vanishing_plus_denominator_uses_minus_form() {
        // M = [[-1, 0], [-2, 1]]: alpha = +1 -> (0, 1); alpha = -1 -> (1, 1)/sqrt2
        let c = params(1.0, 0.0, -2.0);
        let plus = eigen_mode(&c, Sign::Plus);
        assert_eq!(plus.alpha, Complex64::new(1.0, 0.0));
        assert!(close(plus.amp_i, Complex64::new(0.0, 0.0), 1e-15));
        assert!(close(plus.amp_ii, Complex64::new(1.0, 0.0), 1e-15));
        let minus = eigen_mode(&c, Sign::Minus);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(minus.amp_i, Complex64::new(h, 0.0), 1e-15));
        assert!(close(minus.amp_ii, Complex64::new(h, 0.0), 1e-15));
    }

    #[test]
    fn degenerate_case_flags_and_returns_kernel() {
        for c in [params(0.0, 1.0, 0.0), params(1.0, 1.0, -1.0), params(0.0, 0.0, 2.5)] {
            let mode = eigen_mode(&c, Sign::Plus);
            assert!(mode.degenerate);
            assert_eq!(mode.alpha, Complex64::new(0.0, 0.0));
            let mv = apply_mixing(&c, [mode.amp_i, mode.amp_ii]);
            assert!(mv[0].norm() + mv[1].norm() < 1e-15);
            assert_eq!(eigen_mode(&c, Sign::Minus).amp_i, mode.amp_i);
            let w = generalized_vector(&c, [mode.amp_i, mode.amp_ii]);
            let mw = apply_mixing(&c, w);
            assert!(close(mw[0], mode.amp_i, 1e-14) && close(mw[1], mode.amp_ii, 1e-14));
        }
    }

    #[test]
    fn imaginary_alpha_eigenvector() {
        let c = params(0.3, 1.0, -2.0);
        for sign in Sign::BOTH {
            let mode = eigen_mode(&c, sign);
            assert!(mode.alpha.re.abs() < 1e-15 && mode.alpha.im != 0.0);
            let mv = apply_mixing(&c, [mode.amp_i, mode.amp_ii]);
            assert!(close(mv[0], mode.alpha * mode.amp_i, 1e-14));
            assert!(close(mv[1], mode.alpha * mode.amp_ii, 1e-14));
            assert!(((mode.amp_i.norm_sqr() + mode.amp_ii.norm_sqr()) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sign_parses() {
        assert_eq!("plus".parse::<Sign>().unwrap(), Sign::Plus);
        assert_eq!("-".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("sideways".parse::<Sign>().is_err());
    }
}
