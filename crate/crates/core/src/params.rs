//! Coupling parameters and the vielbein of the curled disc.
//!
//! The disc carries the conformal factor `f = 1 + rho^2 / (2 rho0)^2`. All radial
//! coefficients of the equations are built from `f` and its derivative, so the
//! helpers here evaluate them in closed form rather than by differencing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance to the nearest integer below which `n` is treated as an integer mode.
pub const INTEGER_INTENT_TOL: f64 = 1e-9;

/// Unvalidated parameter record, as read from flags, config files or grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub f56: f64,
    pub ft56: f64,
    pub ft3: f64,
    pub ftp: f64,
    pub ftm: f64,
    pub n: f64,
    pub rho0: f64,
}

impl RawParams {
    pub fn new(f56: f64, ft56: f64, ft3: f64, ftp: f64, ftm: f64, n: f64, rho0: f64) -> Self {
        Self {
            f56,
            ft56,
            ft3,
            ftp,
            ftm,
            n,
            rho0,
        }
    }
}

/// Validated spin-connection strengths, mode index and disc scale.
///
/// `ft3`, `ftp` and `ftm` are the three family-mixing strengths (the `3`, `⊞`
/// and `⊟` components). Fields are private so every instance satisfies the
/// invariants checked by [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct CouplingParams {
    f56: f64,
    ft56: f64,
    ft3: f64,
    ftp: f64,
    ftm: f64,
    n: f64,
    rho0: f64,
    n_integer: bool,
}

/// Validates a raw record.
///
/// A mode index within [`INTEGER_INTENT_TOL`] of an integer is snapped onto it and
/// flagged as integer-intent.
pub fn validate_params(raw: RawParams) -> Result<CouplingParams> {
    let fields = [
        ("f56", raw.f56),
        ("ft56", raw.ft56),
        ("ft3", raw.ft3),
        ("ftp", raw.ftp),
        ("ftm", raw.ftm),
        ("n", raw.n),
        ("rho0", raw.rho0),
    ];
    for (field, value) in fields {
        if !value.is_finite() {
            return Err(Error::NonFinite { field, value });
        }
    }
    if raw.rho0 <= 0.0 {
        return Err(Error::NonPositiveScale(raw.rho0));
    }
    let nearest = raw.n.round();
    let n_integer = (raw.n - nearest).abs() <= INTEGER_INTENT_TOL;
    Ok(CouplingParams {
        f56: raw.f56,
        ft56: raw.ft56,
        ft3: raw.ft3,
        ftp: raw.ftp,
        ftm: raw.ftm,
        n: if n_integer { nearest } else { raw.n },
        rho0: raw.rho0,
        n_integer,
    })
}

impl TryFrom<RawParams> for CouplingParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        validate_params(raw)
    }
}

impl From<CouplingParams> for RawParams {
    fn from(c: CouplingParams) -> Self {
        c.raw()
    }
}

impl CouplingParams {
    /// Shorthand for `validate_params(RawParams::new(..))`.
    pub fn new(f56: f64, ft56: f64, ft3: f64, ftp: f64, ftm: f64, n: f64, rho0: f64) -> Result<Self> {
        validate_params(RawParams::new(f56, ft56, ft3, ftp, ftm, n, rho0))
    }

    pub fn f56(&self) -> f64 {
        self.f56
    }
    pub fn ft56(&self) -> f64 {
        self.ft56
    }
    pub fn ft3(&self) -> f64 {
        self.ft3
    }
    pub fn ftp(&self) -> f64 {
        self.ftp
    }
    pub fn ftm(&self) -> f64 {
        self.ftm
    }
    pub fn n(&self) -> f64 {
        self.n
    }
    pub fn rho0(&self) -> f64 {
        self.rho0
    }
    pub fn n_is_integer(&self) -> bool {
        self.n_integer
    }

    pub fn raw(&self) -> RawParams {
        RawParams::new(self.f56, self.ft56, self.ft3, self.ftp, self.ftm, self.n, self.rho0)
    }

    /// Copy with a different mode index.
    pub fn with_n(&self, n: f64) -> Result<Self> {
        validate_params(RawParams { n, ..self.raw() })
    }

    pub fn with_f56(&self, f56: f64) -> Result<Self> {
        validate_params(RawParams { f56, ..self.raw() })
    }

    pub fn with_rho0(&self, rho0: f64) -> Result<Self> {
        validate_params(RawParams { rho0, ..self.raw() })
    }

    pub fn with_mixing(&self, ft3: f64, ftp: f64, ftm: f64) -> Result<Self> {
        validate_params(RawParams {
            ft3,
            ftp,
            ftm,
            ..self.raw()
        })
    }

    /// Parameters of the B system written as an A system: `n -> -n-1`, `F56 -> -F56`.
    ///
    /// The second group of four equations (the other chirality pairing) is
    /// handled by the same relabeling idea and needs no separate code.
    pub fn mirrored(&self) -> Self {
        validate_params(RawParams {
            n: -self.n - 1.0,
            f56: -self.f56,
            ..self.raw()
        })
        .expect("mirroring preserves validity")
    }

    /// True when all three mixing strengths vanish.
    pub fn is_unmixed(&self) -> bool {
        self.ft3 == 0.0 && self.ftp == 0.0 && self.ftm == 0.0
    }
}

/// Vielbein and its radial derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VielbeinSample {
    pub rho: f64,
    pub f: f64,
    /// `df/drho`
    pub df: f64,
    /// `(1/2f) df/drho`
    pub half_dlogf: f64,
    /// `ln f`, accurate for small `rho`.
    pub ln_f: f64,
}

pub fn vielbein(rho: f64, rho0: f64) -> Result<VielbeinSample> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::DomainError(format!("radius must be finite and >= 0, got {rho}")));
    }
    if !(rho0 > 0.0) {
        return Err(Error::NonPositiveScale(rho0));
    }
    let x = rho / (2.0 * rho0);
    let f = 1.0 + x * x;
    let df = rho / (2.0 * rho0 * rho0);
    Ok(VielbeinSample {
        rho,
        f,
        df,
        half_dlogf: df / (2.0 * f),
        ln_f: (x * x).ln_1p(),
    })
}

/// `ln f` as a function of `ln rho`, usable far outside the range where `rho`
/// itself is representable.
pub fn ln_f_from_ln_rho(ln_rho: f64, rho0: f64) -> f64 {
    let ln_x2 = 2.0 * (ln_rho - (2.0 * rho0).ln());
    if ln_x2 < 30.0 {
        ln_x2.exp().ln_1p()
    } else {
        ln_x2 + (-ln_x2).exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_accepts_well_formed_input() {
        let c = validate_params(RawParams::new(0.5, 0.25, 0.0, 0.0, 0.0, 1.0, 1.0)).unwrap();
        assert!(c.n_is_integer());
        assert_eq!(c.n(), 1.0);
        assert_eq!(c.f56(), 0.5);
    }

    #[test]
    fn validate_rejects_bad_scale_and_nan() {
        assert_eq!(
            validate_params(RawParams::new(0.5, 0.25, 0.0, 0.0, 0.0, 1.0, 0.0)),
            Err(Error::NonPositiveScale(0.0))
        );
        assert!(matches!(
            validate_params(RawParams::new(0.5, 0.25, f64::NAN, 0.0, 0.0, 1.0, 1.0)),
            Err(Error::NonFinite { field: "ft3", .. })
        ));
        assert!(matches!(
            validate_params(RawParams::new(0.5, 0.25, 0.0, f64::INFINITY, 0.0, 1.0, 1.0)),
            Err(Error::NonFinite { field: "ftp", .. })
        ));
        assert!(matches!(
            validate_params(RawParams::new(0.5, 0.25, 0.0, 0.0, 0.0, 1.0, -2.0)),
            Err(Error::NonPositiveScale(_))
        ));
    }

    #[test]
    fn integer_intent_snaps_within_tolerance() {
        let c = CouplingParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 2.0 + 5e-10, 1.0).unwrap();
        assert!(c.n_is_integer());
        assert_eq!(c.n(), 2.0);
        let c = CouplingParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 1.0).unwrap();
        assert!(!c.n_is_integer());
        assert_eq!(c.n(), 0.5);
    }

    #[test]
    fn vielbein_closed_form_values() {
        let v = vielbein(0.0, 1.0).unwrap();
        assert_eq!((v.f, v.df, v.half_dlogf), (1.0, 0.0, 0.0));
        let v = vielbein(2.0, 1.0).unwrap();
        assert_eq!((v.f, v.df, v.half_dlogf), (2.0, 1.0, 0.25));
        for rho0 in [0.1, 0.7, 3.0, 250.0] {
            assert_eq!(vielbein(2.0 * rho0, rho0).unwrap().f, 2.0);
        }
        assert!(matches!(vielbein(-1.0, 1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn ln_f_paths_agree() {
        for rho in [1e-6, 0.3, 2.0, 40.0, 1e5, 1e9] {
            let direct = vielbein(rho, 1.3).unwrap().ln_f;
            let via_log = ln_f_from_ln_rho(rho.ln(), 1.3);
            assert!((direct - via_log).abs() <= 1e-14 * direct.abs().max(1e-300) + 1e-30, "{rho}");
        }
    }

    #[test]
    fn serde_goes_through_validation() {
        let json = r#"{"f56":0.1,"ft56":0.2,"ft3":0.0,"ftp":0.0,"ftm":0.0,"n":1.0,"rho0":-1.0}"#;
        assert!(serde_json::from_str::<CouplingParams>(json).is_err());
        let c = CouplingParams::new(0.1, 0.2, 0.3, 0.4, 0.5, 2.0, 1.5).unwrap();
        let back: CouplingParams = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
