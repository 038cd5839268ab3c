//! Parameter generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use zeromodes::{Branch, CouplingParams};

pub type C = Complex64;

pub fn c64(re: f64) -> C {
    C::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Positive,
    Negative,
    Zero,
}

pub const REGIMES: [Regime; 3] = [Regime::Positive, Regime::Negative, Regime::Zero];

fn nonzero<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let mag = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

/// Mixing couplings `(ft3, ftp, ftm)` with the requested sign of `D`.
pub fn mixing<R: Rng>(rng: &mut R, regime: Regime) -> (f64, f64, f64) {
    match regime {
        Regime::Positive => loop {
            let (a, b, c) = (
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            );
            if a * a + b * c > 0.05 {
                return (a, b, c);
            }
        },
        Regime::Negative => {
            let ft3 = rng.gen_range(-1.0..1.0);
            let ftp = nonzero(rng, 0.2, 1.5);
            let d = rng.gen_range(0.05..2.0);
            (ft3, ftp, -(ft3 * ft3 + d) / ftp)
        }
        Regime::Zero => {
            if rng.gen_bool(0.2) {
                (0.0, 0.0, nonzero(rng, 0.2, 1.5))
            } else {
                let ft3 = nonzero(rng, 0.1, 1.2);
                let ftp = nonzero(rng, 0.2, 1.5);
                (ft3, ftp, -ft3 * ft3 / ftp)
            }
        }
    }
}

pub fn random_params<R: Rng>(rng: &mut R, regime: Regime, n: f64) -> CouplingParams {
    let (ft3, ftp, ftm) = mixing(rng, regime);
    CouplingParams::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        ft3,
        ftp,
        ftm,
        n,
        rng.gen_range(0.5..2.0),
    )
    .unwrap()
}

/// `(f, f')` at `rho`.
pub fn oracle_f(rho: f64, rho0: f64) -> (f64, f64) {
    let c = 2.0 * rho0;
    (1.0 + (rho / c) * (rho / c), 2.0 * rho / (c * c))
}

/// Left-hand sides of the massless pair for one branch, transcribed term by
/// term, with the largest term magnitude of each equation.
pub fn oracle_massless(
    c: &CouplingParams,
    branch: Branch,
    rho: f64,
    p: (C, C),
    dp: (C, C),
) -> ([C; 2], [f64; 2]) {
    let (f, df) = oracle_f(rho, c.rho0());
    let h = df / (2.0 * f);
    let (radial, base) = match branch {
        Branch::A => (-c.n() / rho, 1.0 - 2.0 * c.f56() - 2.0 * c.ft56()),
        Branch::B => ((c.n() + 1.0) / rho, 1.0 + 2.0 * c.f56() - 2.0 * c.ft56()),
    };
    let t1 = [dp.0, p.0 * radial, -p.0 * h * (base - 2.0 * c.ft3()), -p.1 * h * 2.0 * c.ftp()];
    let t2 = [dp.1, p.1 * radial, -p.1 * h * (base + 2.0 * c.ft3()), -p.0 * h * 2.0 * c.ftm()];
    let sum = |t: &[C; 4]| t.iter().sum::<C>();
    let big = |t: &[C; 4]| t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    ([sum(&t1), sum(&t2)], [big(&t1), big(&t2)])
}

pub fn relative(res: &([C; 2], [f64; 2])) -> f64 {
    let (r, s) = res;
    (0..2)
        .map(|i| if r[i].norm() == 0.0 { 0.0 } else { r[i].norm() / s[i] })
        .fold(0.0, f64::max)
}

/// Eigenpairs of `[[-ft3, ftp], [ftm, ft3]]` solved by hand: `alpha = ±sqrt(D)`
/// and an eigenvector from whichever row is not degenerate.
pub fn oracle_eigen(ft3: f64, ftp: f64, ftm: f64, plus: bool) -> (C, [C; 2]) {
    let d = ft3 * ft3 + ftp * ftm;
    let root = if d >= 0.0 { c64(d.sqrt()) } else { C::new(0.0, (-d).sqrt()) };
    let alpha = if plus { root } else { -root };
    let v = if ftp != 0.0 && (alpha + ft3).norm() > 0.0 {
        [c64(ftp), alpha + ft3]
    } else if ftm != 0.0 || (alpha - ft3).norm() > 0.0 {
        [alpha - ft3, c64(ftm)]
    } else if ftp == 0.0 && ft3 != 0.0 {
        [c64(0.0), c64(1.0)]
    } else {
        [c64(1.0), c64(0.0)]
    };
    (alpha, v)
}

pub fn rel_diff(a: (C, C), b: (C, C)) -> f64 {
    let diff = ((a.0 - b.0).norm_sqr() + (a.1 - b.1).norm_sqr()).sqrt();
    let scale = (b.0.norm_sqr() + b.1.norm_sqr()).sqrt();
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

pub fn log_radii(rho0: f64) -> Vec<f64> {
    let (a, b) = ((1e-3 * rho0).ln(), (20.0 * rho0).ln());
    (0..100).map(|i| (a + (b - a) * i as f64 / 99.0).exp()).collect()
}
