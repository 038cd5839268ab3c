use num_complex::Complex64;

use super::rhs_with;
use crate::analytic::SpinorState;
use crate::error::{Error, Result};
use crate::params::{vielbein, CouplingParams};

/// Smallest admissible step, relative to `rho0`.
pub const STEP_FLOOR_REL: f64 = 1e-14;

const MAX_STEPS: usize = 2_000_000;
const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [Complex64; 4];

fn inf_norm(y: &State) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn is_finite(y: &State) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

struct Stepper<'a> {
    c: &'a CouplingParams,
    m: f64,
}

impl Stepper<'_> {
    fn rhs(&self, rho: f64, y: &State) -> State {
        let vb = vielbein(rho, self.c.rho0()).expect("radius stays positive");
        rhs_with(&vb, self.c, self.m, y)
    }

    /// One trial step; returns the new state, its derivative (FSAL) and the
    /// scaled error norm.
    fn attempt(&self, rho: f64, y: &State, k1: &State, h: f64, tol: f64) -> (State, State, f64) {
        let mut k = [[Complex64::new(0.0, 0.0); 4]; 7];
        k[0] = *k1;
        let mut y_new = *y;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..4 {
                        ys[i] += kj[i] * (h * a);
                    }
                }
            }
            k[s] = self.rhs(rho + C[s] * h, &ys);
            if s == 6 {
                y_new = ys;
            }
        }
        let mut err = [Complex64::new(0.0, 0.0); 4];
        for (s, ks) in k.iter().enumerate() {
            for i in 0..4 {
                err[i] += ks[i] * (h * E[s]);
            }
        }
        let err_norm = inf_norm(&err);
        let scale = tol * inf_norm(y).max(inf_norm(&y_new));
        let ratio = if err_norm == 0.0 {
            0.0
        } else if scale == 0.0 {
            f64::INFINITY
        } else {
            err_norm / scale
        };
        (y_new, k[6], ratio)
    }
}

/// Propagates the massive system from `init.rho` to `rho_end` (either
/// direction) with Dormand-Prince 5(4) and per-step error control relative to
/// the state norm. Returns every accepted state, endpoints included.
pub fn integrate_toward(
    c: &CouplingParams,
    m: f64,
    init: &SpinorState,
    rho_end: f64,
    tol: f64,
) -> Result<Vec<SpinorState>> {
    let rho_start = init.rho;
    if !(rho_start > 0.0 && rho_end > 0.0 && rho_start.is_finite() && rho_end.is_finite()) {
        return Err(Error::DomainError(format!(
            "integration range must be strictly positive, got [{rho_start}, {rho_end}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    if !init.is_finite() {
        return Err(Error::NonFiniteState { rho: rho_start });
    }
    let mut out = vec![*init];
    if rho_start == rho_end {
        return Ok(out);
    }

    let stepper = Stepper { c, m };
    let dir = (rho_end - rho_start).signum();
    let floor = STEP_FLOOR_REL * c.rho0();
    let span = (rho_end - rho_start).abs();
    // near the regular singular point the natural length scale is rho itself
    let mut h = (1e-2 * rho_start.min(rho_end)).min(span).max(floor);
    let mut rho = rho_start;
    let mut y = init.as_array();
    let mut k1 = stepper.rhs(rho, &y);

    for _ in 0..MAX_STEPS {
        let remaining = (rho_end - rho).abs();
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let (y_new, k_new, err) = stepper.attempt(rho, &y, &k1, dir * step, tol);

        let finite = err.is_finite() && is_finite(&y_new);
        if finite && err <= 1.0 {
            rho = if last { rho_end } else { rho + dir * step };
            y = y_new;
            k1 = k_new;
            out.push(SpinorState::from_array(y, rho));
            if last {
                return Ok(out);
            }
        }

        let factor = if !finite {
            MIN_SCALE
        } else if err == 0.0 {
            MAX_SCALE
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
        };
        h = step * factor;
        if h < floor {
            if !finite {
                return Err(Error::NonFiniteState { rho: rho + dir * step });
            }
            return Err(Error::StepSizeUnderflow {
                rho,
                floor,
                last_good: Box::new(SpinorState::from_array(y, rho)),
            });
        }
    }
    Err(Error::StepSizeUnderflow {
        rho,
        floor,
        last_good: Box::new(SpinorState::from_array(y, rho)),
    })
}

/// Forward propagation, `0 < init.rho < rho_end`.
pub fn integrate(
    c: &CouplingParams,
    m: f64,
    init: &SpinorState,
    rho_end: f64,
    tol: f64,
) -> Result<Vec<SpinorState>> {
    if !(init.rho > 0.0 && init.rho < rho_end) {
        return Err(Error::DomainError(format!(
            "forward integration needs 0 < rho_start < rho_end, got {} and {rho_end}",
            init.rho
        )));
    }
    integrate_toward(c, m, init, rho_end, tol)
}
