//! Geodesics on surfaces of revolution: shooting, Clairaut monitoring,
//! closure and self-intersections.

mod crossings;

pub use crossings::{
    detect_self_intersections, period_vertices, Crossing, CrossingPoint, CrossingReport,
    ANGLE_FLOOR,
};

use crate::numerics::{
    find_root, integrate_endpoint, Dopri5, Dopri5Options, OdeError, QuadratureSpec,
};
use crate::surfaces::{RevolutionSurface, SurfaceError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Default closure tolerance (position and tangent).
pub const CLOSURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesicError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("invalid initial state: {0}")]
    Initial(String),
    #[error("integration failed at t = {reached}: {source}")]
    Integration {
        source: OdeError,
        reached: f64,
        partial: Box<GeodesicTrace>,
    },
    #[error("trace ends at t = {t_end} before a closure candidate; integrate longer")]
    NeedsMoreTime { t_end: f64 },
    #[error("time {t} outside trace [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("trace is not closed")]
    NotClosed,
    #[error("crossing refinement failed near t = {t}, s = {s}")]
    Refinement { t: f64, s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub t: f64,
    pub u1: f64,
    pub u2: f64,
    pub du1: f64,
    pub du2: f64,
}

impl GeodesicState {
    /// Unit-speed state at `(u1, u2)` making angle `theta` with the parallel.
    pub fn from_angle(
        s: &RevolutionSurface,
        u1: f64,
        u2: f64,
        theta: f64,
    ) -> Result<Self, GeodesicError> {
        let j = s.jet(u2)?;
        if !(j.h > 0.0) {
            return Err(GeodesicError::Initial(format!("h = {} at u2 = {u2}", j.h)));
        }
        let (sn, cs) = theta.sin_cos();
        Ok(Self {
            t: 0.0,
            u1,
            u2,
            du1: cs / j.h,
            du2: sn / j.speed(),
        })
    }

    /// Unit-speed state with Clairaut constant `c`, moving up if `up`.
    pub fn from_clairaut(
        s: &RevolutionSurface,
        u1: f64,
        u2: f64,
        c: f64,
        up: bool,
    ) -> Result<Self, GeodesicError> {
        let j = s.jet(u2)?;
        let r = c / j.h;
        if !(r.abs() <= 1.0) {
            return Err(GeodesicError::Initial(format!(
                "|c| = {c} exceeds h = {}",
                j.h
            )));
        }
        let v = (1.0 - r * r).max(0.0).sqrt() / j.speed();
        Ok(Self {
            t: 0.0,
            u1,
            u2,
            du1: c / (j.h * j.h),
            du2: if up { v } else { -v },
        })
    }

    fn vec(&self) -> [f64; 4] {
        [self.u1, self.u2, self.du1, self.du2]
    }

    fn from_vec(t: f64, y: &[f64; 4]) -> Self {
        Self {
            t,
            u1: y[0],
            u2: y[1],
            du1: y[2],
            du2: y[3],
        }
    }
}

/// Accepted step size and normalized local error for one trace interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMeta {
    pub h: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Closure {
    pub period: f64,
    pub position_defect: f64,
    pub tangent_defect: f64,
}

impl Closure {
    pub fn defect(&self) -> f64 {
        self.position_defect.max(self.tangent_defect)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootOptions {
    pub tol: f64,
    pub h_max: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            h_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceKind {
    General,
    /// c = 0; pole passages use the reflection rule.
    Meridian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTrace {
    pub surface: RevolutionSurface,
    pub kind: TraceKind,
    pub options: ShootOptions,
    pub states: Vec<GeodesicState>,
    pub steps: Vec<StepMeta>,
    pub clairaut_c: f64,
    pub closure: Option<Closure>,
    pub crossings: Vec<Crossing>,
}

fn geodesic_rhs(s: &RevolutionSurface) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    move |_t, y| match s.jet(y[1]) {
        Ok(j) => {
            let gam = j.speed();
            let dgam = j.dspeed();
            [
                y[2],
                y[3],
                -2.0 * j.dh / j.h * y[2] * y[3],
                j.h * j.dh / (gam * gam) * y[2] * y[2] - dgam / gam * y[3] * y[3],
            ]
        }
        Err(_) => [f64::NAN; 4],
    }
}

fn meridian_rhs(s: &RevolutionSurface, sign: f64) -> impl Fn(f64, &[f64; 1]) -> [f64; 1] + '_ {
    let (lo, hi) = s.domain();
    move |_t, y| match s.jet(y[0].clamp(lo, hi)) {
        Ok(j) => [sign / j.speed()],
        Err(_) => [f64::NAN],
    }
}

impl GeodesicTrace {
    fn dopri_opts(&self) -> Dopri5Options {
        dopri_opts(&self.options)
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.states[0].t, self.states.last().unwrap().t)
    }

    /// Exact state at time `t`, re-integrated from the preceding stored state.
    pub fn state_at(&self, t: f64) -> Result<GeodesicState, GeodesicError> {
        let (lo, hi) = self.t_range();
        if !(t >= lo - 1e-12 && t <= hi + 1e-12) {
            return Err(GeodesicError::OutOfRange { t, lo, hi });
        }
        let i = self.states.partition_point(|s| s.t <= t).saturating_sub(1);
        let s0 = self.states[i];
        if t == s0.t {
            return Ok(s0);
        }
        let mut opts = self.dopri_opts();
        opts.h_init = self.steps.get(i).map(|m| m.h).unwrap_or(opts.h_init);
        match self.kind {
            TraceKind::General => {
                let ode = Dopri5::new(geodesic_rhs(&self.surface), opts);
                let y = ode
                    .advance(s0.t, s0.vec(), t)
                    .map_err(|e| self.integration_error(e, t))?;
                Ok(GeodesicState::from_vec(t, &y))
            }
            TraceKind::Meridian => {
                let sign = if s0.du2 >= 0.0 { 1.0 } else { -1.0 };
                let ode = Dopri5::new(meridian_rhs(&self.surface, sign), opts);
                let y = ode
                    .advance(s0.t, [s0.u2], t)
                    .map_err(|e| self.integration_error(e, t))?;
                let (lo, hi) = self.surface.domain();
                let u2 = y[0].clamp(lo, hi);
                let j = self.surface.jet(u2)?;
                Ok(GeodesicState {
                    t,
                    u1: s0.u1,
                    u2,
                    du1: 0.0,
                    du2: sign / j.speed(),
                })
            }
        }
    }

    fn integration_error(&self, e: OdeError, t: f64) -> GeodesicError {
        GeodesicError::Integration {
            source: e,
            reached: t,
            partial: Box::new(self.clone()),
        }
    }

    /// Largest |du1 h^2 - c| over the stored states.
    pub fn clairaut_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| {
                let h = self.surface.jet(s.u2).map(|j| j.h).unwrap_or(f64::NAN);
                (s.du1 * h * h - self.clairaut_c).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest |E du1^2 + G du2^2 - 1| over the stored states.
    pub fn speed_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| {
                let m = self.surface.metric_at(s.u2).unwrap();
                (m.e * s.du1 * s.du1 + m.g * s.du2 * s.du2 - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Index and time of the first local maximum of u2 (du2 crossing zero
    /// from above), refined to root tolerance.
    pub fn first_u2_maximum(&self) -> Result<GeodesicState, GeodesicError> {
        for w in self.states.windows(2) {
            if w[0].du2 > 0.0 && w[1].du2 <= 0.0 {
                let t = find_root(
                    |t| self.state_at(t).map(|s| s.du2).unwrap_or(f64::NAN),
                    w[0].t,
                    w[1].t,
                    1e-13,
                )
                .map_err(|_| GeodesicError::Refinement {
                    t: w[0].t,
                    s: w[1].t,
                })?;
                return self.state_at(t);
            }
        }
        Err(GeodesicError::NeedsMoreTime {
            t_end: self.t_range().1,
        })
    }

    /// Copy of the trace truncated at `t1`, ending on the exact state there.
    pub fn restricted(&self, t1: f64) -> Result<GeodesicTrace, GeodesicError> {
        let end = self.state_at(t1)?;
        let mut states: Vec<GeodesicState> = self
            .states
            .iter()
            .copied()
            .take_while(|s| s.t < t1)
            .collect();
        let mut steps: Vec<StepMeta> = self
            .steps
            .iter()
            .copied()
            .take(states.len().saturating_sub(1))
            .collect();
        let last_t = states.last().map(|s| s.t).unwrap_or(t1);
        if t1 - last_t > 0.0 {
            steps.push(StepMeta {
                h: t1 - last_t,
                err: 0.0,
            });
            states.push(end);
        }
        Ok(GeodesicTrace {
            states,
            steps,
            closure: None,
            crossings: Vec::new(),
            ..self.clone()
        })
    }
}

fn dopri_opts(o: &ShootOptions) -> Dopri5Options {
    Dopri5Options {
        rtol: o.tol,
        atol: o.tol,
        h_max: o.h_max,
        h_init: o.h_max.min(1e-2),
        ..Default::default()
    }
}

/// Integrates the geodesic equations from `init` up to `t_end`.
pub fn shoot(
    s: &RevolutionSurface,
    init: GeodesicState,
    t_end: f64,
    tol: f64,
) -> Result<GeodesicTrace, GeodesicError> {
    shoot_with(
        s,
        init,
        t_end,
        ShootOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn shoot_with(
    s: &RevolutionSurface,
    init: GeodesicState,
    t_end: f64,
    options: ShootOptions,
) -> Result<GeodesicTrace, GeodesicError> {
    let m = s.metric_at(init.u2)?;
    let speed = m.e * init.du1 * init.du1 + m.g * init.du2 * init.du2;
    if (speed - 1.0).abs() > 1e-10 {
        return Err(GeodesicError::Initial(format!(
            "speed^2 = {speed}, expected 1"
        )));
    }
    if !(m.e > 0.0) {
        return Err(GeodesicError::Initial("initial point on the axis".into()));
    }
    let c = init.du1 * m.e;
    let mut tr = GeodesicTrace {
        surface: s.clone(),
        kind: if c == 0.0 {
            TraceKind::Meridian
        } else {
            TraceKind::General
        },
        options,
        states: vec![init],
        steps: Vec::new(),
        clairaut_c: c,
        closure: None,
        crossings: Vec::new(),
    };
    match tr.kind {
        TraceKind::General => {
            let ode = Dopri5::new(geodesic_rhs(s), dopri_opts(&options));
            let mut states = vec![init];
            let mut steps = Vec::new();
            let res = ode.integrate(init.t, init.vec(), t_end, |st| {
                states.push(GeodesicState::from_vec(st.t, &st.y));
                steps.push(StepMeta {
                    h: st.h,
                    err: st.err,
                });
                true
            });
            tr.states = states;
            tr.steps = steps;
            if let Err(e) = res {
                let reached = tr.t_range().1;
                return Err(GeodesicError::Integration {
                    source: e,
                    reached,
                    partial: Box::new(tr),
                });
            }
        }
        TraceKind::Meridian => shoot_meridian(&mut tr, t_end)?,
    }
    Ok(tr)
}

fn shoot_meridian(tr: &mut GeodesicTrace, t_end: f64) -> Result<(), GeodesicError> {
    let s = tr.surface.clone();
    let (lo, hi) = s.domain();
    let spec = QuadratureSpec::default();
    let mut cur = tr.states[0];
    while cur.t < t_end {
        let up = cur.du2 > 0.0;
        let (a, b) = if up { (cur.u2, hi) } else { (lo, cur.u2) };
        let to_pole = if b > a {
            integrate_endpoint(
                |p| s.jet(p.x).map(|j| j.speed()).unwrap_or(f64::NAN),
                a,
                b,
                &spec,
            )
            .map_err(SurfaceError::from)?
            .value
        } else {
            0.0
        };
        let closed = if up { s.closed_top } else { s.closed_bottom };
        let t_pole = cur.t + to_pole;
        let stop = t_pole.min(t_end);
        let sign = if up { 1.0 } else { -1.0 };
        let ode = Dopri5::new(meridian_rhs(&s, sign), dopri_opts(&tr.options));
        let u1 = cur.u1;
        let mut states = Vec::new();
        let mut steps = Vec::new();
        let res = ode.integrate(cur.t, [cur.u2], stop, |st| {
            let u2 = if st.t == t_pole {
                if up {
                    hi
                } else {
                    lo
                }
            } else {
                st.y[0].clamp(lo, hi)
            };
            let g = s.jet(u2).map(|j| j.speed()).unwrap_or(f64::NAN);
            states.push(GeodesicState {
                t: st.t,
                u1,
                u2,
                du1: 0.0,
                du2: sign / g,
            });
            steps.push(StepMeta {
                h: st.h,
                err: st.err,
            });
            true
        });
        tr.states.extend(states);
        tr.steps.extend(steps);
        if let Err(e) = res {
            let reached = tr.t_range().1;
            return Err(GeodesicError::Integration {
                source: e,
                reached,
                partial: Box::new(tr.clone()),
            });
        }
        if stop < t_pole || !closed {
            if !closed && stop >= t_pole {
                return Err(GeodesicError::Initial(
                    "meridian leaves the surface through an open end".into(),
                ));
            }
            break;
        }
        // Reflection through the pole: continue down the opposite meridian.
        let last = tr.states.last_mut().unwrap();
        last.u1 += PI;
        last.du2 = -last.du2;
        cur = *last;
    }
    Ok(())
}

/// Closure defects at period `T`.
pub fn closure_at(tr: &GeodesicTrace, period: f64) -> Result<Closure, GeodesicError> {
    let s0 = tr.states[0];
    let s1 = tr.state_at(s0.t + period)?;
    let d1 = wrap_pi(s1.u1 - s0.u1);
    let d2 = s1.u2 - s0.u2;
    Ok(Closure {
        period,
        position_defect: d1.hypot(d2),
        tangent_defect: (s1.du1 - s0.du1).hypot(s1.du2 - s0.du2),
    })
}

/// Searches the trace for the first return that closes up to `tol`.
pub fn closure_check(tr: &GeodesicTrace, tol: f64) -> Result<Option<Closure>, GeodesicError> {
    let s0 = tr.states[0];
    let mut candidates = 0;
    let j0 = tr.surface.jet(s0.u2)?;
    let parallel = s0.du2 == 0.0 && j0.dh == 0.0 && tr.kind == TraceKind::General;
    if parallel {
        // u2 is constant: returns are full turns in u1.
        let total = tr.states.last().unwrap().u1 - s0.u1;
        let turns = (total.abs() / (2.0 * PI)).floor() as i64;
        let dir = total.signum();
        for k in 1..=turns {
            let target = s0.u1 + dir * 2.0 * PI * k as f64;
            let i = tr.states.partition_point(|s| (s.u1 - target) * dir < 0.0);
            if i == 0 || i >= tr.states.len() {
                continue;
            }
            let (a, b) = (tr.states[i - 1].t, tr.states[i].t);
            let t = find_root(
                |t| tr.state_at(t).map(|s| s.u1 - target).unwrap_or(f64::NAN),
                a,
                b,
                1e-13,
            )
            .map_err(|_| GeodesicError::Refinement { t: a, s: b })?;
            candidates += 1;
            let c = closure_at(tr, t - s0.t)?;
            if c.position_defect < tol && c.tangent_defect < tol {
                return Ok(Some(c));
            }
        }
    } else {
        let up = s0.du2 >= 0.0;
        let f = |st: &GeodesicState| (st.u2 - s0.u2) * if up { 1.0 } else { -1.0 };
        for w in tr.states.windows(2) {
            if f(&w[0]) < 0.0 && f(&w[1]) >= 0.0 {
                let t = find_root(
                    |t| tr.state_at(t).map(|s| f(&s)).unwrap_or(f64::NAN),
                    w[0].t,
                    w[1].t,
                    1e-13,
                )
                .map_err(|_| GeodesicError::Refinement {
                    t: w[0].t,
                    s: w[1].t,
                })?;
                candidates += 1;
                let c = closure_at(tr, t - s0.t)?;
                if c.position_defect < tol && c.tangent_defect < tol {
                    return Ok(Some(c));
                }
            }
        }
    }
    if candidates == 0 {
        return Err(GeodesicError::NeedsMoreTime {
            t_end: tr.t_range().1,
        });
    }
    Ok(None)
}

/// Nominal and sample-based lengths over a time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceLength {
    pub nominal: f64,
    pub from_samples: f64,
}

pub fn trace_length(tr: &GeodesicTrace, range: (f64, f64)) -> Result<TraceLength, GeodesicError> {
    let (lo, hi) = tr.t_range();
    if !(range.0 >= lo - 1e-12 && range.1 <= hi + 1e-12 && range.0 <= range.1) {
        return Err(GeodesicError::OutOfRange { t: range.1, lo, hi });
    }
    let speed = |s: &GeodesicState| -> f64 {
        let m = tr.surface.metric_at(s.u2).unwrap();
        (m.e * s.du1 * s.du1 + m.g * s.du2 * s.du2).sqrt()
    };
    let mut pts = vec![tr.state_at(range.0)?];
    pts.extend(
        tr.states
            .iter()
            .copied()
            .filter(|s| s.t > range.0 && s.t < range.1),
    );
    pts.push(tr.state_at(range.1)?);
    let from_samples = pts
        .windows(2)
        .map(|w| 0.5 * (w[1].t - w[0].t) * (speed(&w[0]) + speed(&w[1])))
        .sum();
    Ok(TraceLength {
        nominal: range.1 - range.0,
        from_samples,
    })
}

pub(crate) fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}
