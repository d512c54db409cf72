use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// PI controller integral gain (0 gives the classic controller).
    pub beta: f64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            h_init: 1e-3,
            h_max: 0.5,
            h_min: 1e-14,
            max_steps: 2_000_000,
            beta: 0.04,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

/// An accepted step: the state reached, the step size used and the
/// normalized local error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    pub h: f64,
    pub err: f64,
}

/// Dormand-Prince 5(4) with PI step-size control.
pub struct Dopri5<const D: usize, F> {
    f: F,
    pub opts: Dopri5Options,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl<const D: usize, F: Fn(f64, &[f64; D]) -> [f64; D]> Dopri5<D, F> {
    pub fn new(f: F, opts: Dopri5Options) -> Self {
        Self { f, opts }
    }

    pub fn rhs(&self, t: f64, y: &[f64; D]) -> [f64; D] {
        (self.f)(t, y)
    }

    /// One step of size `h` from `(t, y)` given `k1 = f(t, y)`. Returns the
    /// new state, its derivative and the normalized error.
    pub fn step(&self, t: f64, y: &[f64; D], k1: &[f64; D], h: f64) -> ([f64; D], [f64; D], f64) {
        let mut k = [[0.0; D]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..D {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            if s == 6 {
                // Stage 7 is evaluated at the propagated solution (FSAL).
                k[6] = (self.f)(t + h, &ys);
                let mut err = 0.0;
                for i in 0..D {
                    let mut e = 0.0;
                    for (s2, ks) in k.iter().enumerate() {
                        e += E[s2] * ks[i];
                    }
                    let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(ys[i].abs());
                    err += (h * e / sc).powi(2);
                }
                return (ys, k[6], (err / D as f64).sqrt());
            }
            k[s] = (self.f)(t + C[s] * h, &ys);
        }
        unreachable!()
    }

    /// Integrates from `t0` to exactly `t_end`, calling `observe` on every
    /// accepted step. `observe` may return `false` to stop early.
    pub fn integrate<O: FnMut(&Step<D>) -> bool>(
        &self,
        t0: f64,
        y0: [f64; D],
        t_end: f64,
        mut observe: O,
    ) -> Result<Step<D>, OdeError> {
        let o = &self.opts;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = (self.f)(t, &y);
        let mut h = o.h_init.min(o.h_max).min(t_end - t0);
        let mut err_old: f64 = 1e-4;
        let alpha = 0.2 - 0.75 * o.beta;
        let mut last = Step {
            t,
            y,
            h: 0.0,
            err: 0.0,
        };
        if t_end <= t0 {
            return Ok(last);
        }
        for _ in 0..o.max_steps {
            let remaining = t_end - t;
            let final_step = h >= remaining;
            let hs = if final_step { remaining } else { h };
            let (yn, kn, err) = self.step(t, &y, &k1, hs);
            if !err.is_finite() || yn.iter().any(|v| !v.is_finite()) {
                h *= 0.25;
                if h < o.h_min {
                    return Err(OdeError::NonFinite { t });
                }
                continue;
            }
            if err <= 1.0 {
                t = if final_step { t_end } else { t + hs };
                y = yn;
                k1 = kn;
                last = Step { t, y, h: hs, err };
                let e = err.max(1e-10);
                let fac = (0.9 * e.powf(-alpha) * err_old.powf(o.beta)).clamp(0.2, 5.0);
                err_old = e;
                if !observe(&last) || final_step {
                    return Ok(last);
                }
                h = (hs * fac).min(o.h_max);
            } else {
                let fac = (0.9 * err.powf(-alpha)).clamp(0.2, 1.0);
                h = hs * fac;
            }
            if h < o.h_min {
                return Err(OdeError::StepUnderflow { t, h });
            }
        }
        Err(OdeError::TooManySteps { t })
    }

    /// State at `t_end` starting from `(t0, y0)`.
    pub fn advance(&self, t0: f64, y0: [f64; D], t_end: f64) -> Result<[f64; D], OdeError> {
        self.integrate(t0, y0, t_end, |_| true).map(|s| s.y)
    }
}
