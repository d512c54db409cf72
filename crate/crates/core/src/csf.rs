//! Curve shortening flow for closed curves in the (u1, u2) chart of a
//! surface of revolution, and the avoidance harness for pairs of flows.

use crate::geodesic::{GeodesicError, GeodesicTrace};
use crate::surfaces::{RevolutionSurface, SurfaceError};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid curve: {0}")]
    Curve(String),
    #[error("curve left the chart at t = {t} (u2 = {u2})")]
    Chart { t: f64, u2: f64 },
    #[error("step size underflow at t = {t}")]
    Underflow { t: f64, last: Box<FlowCurve> },
    #[error("initial curves are not disjoint (d_min = {0:e})")]
    NotDisjoint(f64),
    #[error("avoidance violated at t = {t}: d_min = {d_min:e}")]
    Violation { t: f64, d_min: f64 },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

/// Closed chart curve. Sample `i + n` is sample `i` shifted by
/// `(2 pi winding, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowCurve {
    pub samples: Vec<[f64; 2]>,
    pub winding: i32,
    pub time: f64,
    pub kappa: Vec<f64>,
    pub length: f64,
}

impl FlowCurve {
    pub fn new(
        s: &RevolutionSurface,
        samples: Vec<[f64; 2]>,
        winding: i32,
    ) -> Result<Self, FlowError> {
        if samples.len() < 8 {
            return Err(FlowError::Curve(format!(
                "need at least 8 samples, got {}",
                samples.len()
            )));
        }
        let (lo, hi) = s.domain();
        if let Some(p) = samples.iter().find(|p| !(p[1] > lo && p[1] < hi)) {
            return Err(FlowError::Chart { t: 0.0, u2: p[1] });
        }
        let mut c = Self {
            samples,
            winding,
            time: 0.0,
            kappa: Vec::new(),
            length: 0.0,
        };
        c.refresh(s)?;
        if c.min_spacing(s)? <= 0.0 {
            return Err(FlowError::Curve("repeated samples".into()));
        }
        Ok(c)
    }

    /// The parallel u2 = const, traversed once.
    pub fn parallel(s: &RevolutionSurface, u2: f64, n: usize) -> Result<Self, FlowError> {
        Self::from_fn(s, n, 1, |th| [th, u2])
    }

    /// Samples `f(2 pi i / n)`; `f` must return lifted u1 values.
    pub fn from_fn(
        s: &RevolutionSurface,
        n: usize,
        winding: i32,
        f: impl Fn(f64) -> [f64; 2],
    ) -> Result<Self, FlowError> {
        Self::new(
            s,
            (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect(),
            winding,
        )
    }

    /// One period of a closed trace sampled uniformly in arc length.
    pub fn from_trace(
        s: &RevolutionSurface,
        tr: &GeodesicTrace,
        period: f64,
        n: usize,
    ) -> Result<Self, FlowError> {
        let t0 = tr.states[0].t;
        let samples: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                tr.state_at(t0 + period * i as f64 / n as f64)
                    .map(|st| [st.u1, st.u2])
            })
            .collect::<Result<_, _>>()?;
        let end = tr.state_at(t0 + period)?;
        let winding = ((end.u1 - samples[0][0]) / TAU).round() as i32;
        Self::new(s, samples, winding)
    }

    fn at(&self, i: isize) -> [f64; 2] {
        let n = self.samples.len() as isize;
        let k = i.rem_euclid(n);
        let shift = (i - k) / n;
        let p = self.samples[k as usize];
        [p[0] + TAU * (shift * self.winding as isize) as f64, p[1]]
    }

    fn segment_length(
        s: &RevolutionSurface,
        p: [f64; 2],
        q: [f64; 2],
    ) -> Result<f64, SurfaceError> {
        let j = s.jet(0.5 * (p[1] + q[1]))?;
        let (d1, d2) = (q[0] - p[0], q[1] - p[1]);
        Ok((j.h * j.h * d1 * d1 + j.speed().powi(2) * d2 * d2).sqrt())
    }

    pub fn metric_length(&self, s: &RevolutionSurface) -> Result<f64, SurfaceError> {
        let n = self.samples.len() as isize;
        (0..n)
            .map(|i| Self::segment_length(s, self.at(i), self.at(i + 1)))
            .sum()
    }

    pub fn min_spacing(&self, s: &RevolutionSurface) -> Result<f64, SurfaceError> {
        let n = self.samples.len() as isize;
        let mut m = f64::INFINITY;
        for i in 0..n {
            m = m.min(Self::segment_length(s, self.at(i), self.at(i + 1))?);
        }
        Ok(m)
    }

    pub fn max_abs_kappa(&self) -> f64 {
        self.kappa.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// Embedded points.
    pub fn positions(&self, s: &RevolutionSurface) -> Result<Vec<[f64; 3]>, SurfaceError> {
        self.samples
            .iter()
            .map(|p| s.position(p[0], p[1]))
            .collect()
    }

    fn refresh(&mut self, s: &RevolutionSurface) -> Result<(), SurfaceError> {
        self.kappa = curvature_vectors(s, self)?
            .into_iter()
            .map(|(k, _)| k)
            .collect();
        self.length = self.metric_length(s)?;
        Ok(())
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("i,u1,u2,kappa_g\n");
        for (i, (p, k)) in self.samples.iter().zip(&self.kappa).enumerate() {
            out.push_str(&format!("{i},{:.12e},{:.12e},{:.12e}\n", p[0], p[1], k));
        }
        out
    }
}

/// Signed geodesic curvature and curvature vector (chart components) at
/// every sample, from covariant central differences.
pub fn curvature_vectors(
    s: &RevolutionSurface,
    c: &FlowCurve,
) -> Result<Vec<(f64, [f64; 2])>, SurfaceError> {
    let n = c.samples.len() as isize;
    (0..n)
        .map(|i| {
            let (pm, p, pp) = (c.at(i - 1), c.at(i), c.at(i + 1));
            let d1 = [0.5 * (pp[0] - pm[0]), 0.5 * (pp[1] - pm[1])];
            let d2 = [pp[0] - 2.0 * p[0] + pm[0], pp[1] - 2.0 * p[1] + pm[1]];
            let j = s.jet(p[1])?;
            let (h, gam) = (j.h, j.speed());
            let (e, g) = (h * h, gam * gam);
            // Christoffel symbols of diag(h^2, gamma^2).
            let c112 = j.dh / h;
            let c211 = -h * j.dh / g;
            let c222 = j.dspeed() / gam;
            let a = [
                d2[0] + 2.0 * c112 * d1[0] * d1[1],
                d2[1] + c211 * d1[0] * d1[0] + c222 * d1[1] * d1[1],
            ];
            let v2 = e * d1[0] * d1[0] + g * d1[1] * d1[1];
            let along = (e * a[0] * d1[0] + g * a[1] * d1[1]) / v2;
            let kv = [(a[0] - along * d1[0]) / v2, (a[1] - along * d1[1]) / v2];
            let v = v2.sqrt();
            let normal = [-gam * d1[1] / (h * v), h * d1[0] / (gam * v)];
            Ok((e * kv[0] * normal[0] + g * kv[1] * normal[1], kv))
        })
        .collect()
}

/// Redistributes samples uniformly in metric arc length (linear in the chart).
pub fn resample(s: &RevolutionSurface, c: &FlowCurve) -> Result<FlowCurve, FlowError> {
    let n = c.samples.len();
    let mut cum = vec![0.0];
    for i in 0..n as isize {
        let l = FlowCurve::segment_length(s, c.at(i), c.at(i + 1))?;
        cum.push(cum.last().unwrap() + l);
    }
    let total = cum[n];
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        let target = total * i as f64 / n as f64;
        while k + 1 < n && cum[k + 1] <= target {
            k += 1;
        }
        let f = if cum[k + 1] > cum[k] {
            (target - cum[k]) / (cum[k + 1] - cum[k])
        } else {
            0.0
        };
        let (p, q) = (c.at(k as isize), c.at(k as isize + 1));
        out.push([p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])]);
    }
    let mut r = FlowCurve {
        samples: out,
        winding: c.winding,
        time: c.time,
        kappa: Vec::new(),
        length: 0.0,
    };
    r.refresh(s)?;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepPolicy {
    /// dt = cfl * (min spacing)^2
    pub cfl: f64,
    pub resample_every: usize,
    /// Stop once max |kappa_g| drops below this.
    pub convergence_tol: Option<f64>,
    /// Stop once length < shrink_fraction * initial length.
    pub shrink_fraction: f64,
    pub snapshot_dt: f64,
    pub max_steps: usize,
    pub min_dt: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            resample_every: 10,
            convergence_tol: Some(1e-3),
            shrink_fraction: 1e-3,
            snapshot_dt: 1.0,
            max_steps: 5_000_000,
            min_dt: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRun {
    pub snapshots: Vec<FlowCurve>,
    pub converged: bool,
    pub shrunk: bool,
    pub steps: usize,
    pub rejected: usize,
    /// Largest L(t + dt) - L(t) over accepted steps (<= 0 for a monotone run).
    pub max_length_increase: f64,
    pub final_curve: FlowCurve,
}

fn flow_step(s: &RevolutionSurface, c: &FlowCurve, dt: f64) -> Result<FlowCurve, FlowError> {
    let kv = curvature_vectors(s, c)?;
    let (lo, hi) = s.domain();
    let mut next = c.clone();
    for (p, (_, v)) in next.samples.iter_mut().zip(&kv) {
        p[0] += dt * v[0];
        p[1] += dt * v[1];
        if !(p[1] > lo && p[1] < hi) || !p[1].is_finite() || s.jet(p[1])?.h <= 0.0 {
            return Err(FlowError::Chart {
                t: c.time + dt,
                u2: p[1],
            });
        }
    }
    next.time = c.time + dt;
    next.refresh(s)?;
    Ok(next)
}

fn stable_dt(s: &RevolutionSurface, c: &FlowCurve, policy: &StepPolicy) -> Result<f64, FlowError> {
    Ok(policy.cfl * c.min_spacing(s)?.powi(2))
}

/// Length-monotone explicit step; halves dt on rejection.
fn accepted_step(
    s: &RevolutionSurface,
    c: &FlowCurve,
    mut dt: f64,
    policy: &StepPolicy,
    rejected: &mut usize,
) -> Result<(FlowCurve, f64), FlowError> {
    loop {
        if dt < policy.min_dt {
            return Err(FlowError::Underflow {
                t: c.time,
                last: Box::new(c.clone()),
            });
        }
        let next = flow_step(s, c, dt)?;
        if next.length <= c.length + 1e-12 {
            return Ok((next, dt));
        }
        *rejected += 1;
        dt *= 0.5;
    }
}

pub fn evolve(
    s: &RevolutionSurface,
    init: &FlowCurve,
    t_end: f64,
    policy: StepPolicy,
) -> Result<FlowRun, FlowError> {
    let mut c = init.clone();
    c.refresh(s)?;
    let l0 = c.length;
    let mut run = FlowRun {
        snapshots: vec![c.clone()],
        converged: false,
        shrunk: false,
        steps: 0,
        rejected: 0,
        max_length_increase: f64::NEG_INFINITY,
        final_curve: c.clone(),
    };
    let mut next_snap = c.time + policy.snapshot_dt;
    let t_stop = c.time + t_end;
    while c.time < t_stop && run.steps < policy.max_steps {
        if policy
            .convergence_tol
            .is_some_and(|tol| c.max_abs_kappa() < tol)
        {
            run.converged = true;
            break;
        }
        if c.length < policy.shrink_fraction * l0 {
            run.shrunk = true;
            break;
        }
        let dt = stable_dt(s, &c, &policy)?
            .min(t_stop - c.time)
            .min(next_snap - c.time);
        let (mut next, _) = accepted_step(s, &c, dt, &policy, &mut run.rejected)?;
        run.max_length_increase = run.max_length_increase.max(next.length - c.length);
        run.steps += 1;
        if run.steps % policy.resample_every == 0 {
            next = resample(s, &next)?;
        }
        c = next;
        if c.time >= next_snap - 1e-15 {
            run.snapshots.push(c.clone());
            next_snap += policy.snapshot_dt;
        }
    }
    if run.snapshots.last().map(|l| l.time) != Some(c.time) {
        run.snapshots.push(c.clone());
    }
    run.final_curve = c;
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceRecord {
    pub times: Vec<f64>,
    /// min over sample pairs of |f(x1) - f(x2)|^2
    pub d_min: Vec<f64>,
    pub min_d: f64,
    /// Least-squares slope of ln d_min against t.
    pub decay_rate: f64,
    pub steps: usize,
    pub final_curves: (FlowCurve, FlowCurve),
}

impl AvoidanceRecord {
    pub fn csv(&self) -> String {
        let mut s = String::from("t,d_min\n");
        for (t, d) in self.times.iter().zip(&self.d_min) {
            s.push_str(&format!("{t:.12e},{d:.12e}\n"));
        }
        s
    }
}

fn squared_gap(s: &RevolutionSurface, a: &FlowCurve, b: &FlowCurve) -> Result<f64, SurfaceError> {
    let (pa, pb) = (a.positions(s)?, b.positions(s)?);
    let mut m = f64::INFINITY;
    for p in &pa {
        for q in &pb {
            m = m.min((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2));
        }
    }
    Ok(m)
}

/// Evolves both curves on a shared clock (c2 held fixed when
/// `c2_stationary`), recording d_min after every step.
pub fn avoidance_harness(
    s: &RevolutionSurface,
    c1: &FlowCurve,
    c2: &FlowCurve,
    t_end: f64,
    c2_stationary: bool,
    policy: StepPolicy,
) -> Result<AvoidanceRecord, FlowError> {
    let (mut a, mut b) = (c1.clone(), c2.clone());
    a.refresh(s)?;
    b.refresh(s)?;
    let d0 = squared_gap(s, &a, &b)?;
    if !(d0 > 1e-14) {
        return Err(FlowError::NotDisjoint(d0));
    }
    let mut rec = AvoidanceRecord {
        times: vec![a.time],
        d_min: vec![d0],
        min_d: d0,
        decay_rate: 0.0,
        steps: 0,
        final_curves: (a.clone(), b.clone()),
    };
    let t_stop = a.time + t_end;
    let mut rejected = 0;
    while a.time < t_stop && rec.steps < policy.max_steps {
        let mut dt = stable_dt(s, &a, &policy)?.min(t_stop - a.time);
        if !c2_stationary {
            dt = dt.min(stable_dt(s, &b, &policy)?);
        }
        let (mut na, dt) = accepted_step(s, &a, dt, &policy, &mut rejected)?;
        let mut nb = if c2_stationary {
            FlowCurve {
                time: na.time,
                ..b.clone()
            }
        } else {
            let mut nb = flow_step(s, &b, dt)?;
            nb.time = na.time;
            nb
        };
        rec.steps += 1;
        if rec.steps % policy.resample_every == 0 {
            na = resample(s, &na)?;
            if !c2_stationary {
                nb = resample(s, &nb)?;
            }
        }
        a = na;
        b = nb;
        let d = squared_gap(s, &a, &b)?;
        if !(d > 0.0) {
            return Err(FlowError::Violation {
                t: a.time,
                d_min: d,
            });
        }
        rec.times.push(a.time);
        rec.d_min.push(d);
        rec.min_d = rec.min_d.min(d);
    }
    let n = rec.times.len() as f64;
    let (mt, ml) = (
        rec.times.iter().sum::<f64>() / n,
        rec.d_min.iter().map(|d| d.ln()).sum::<f64>() / n,
    );
    let stt: f64 = rec.times.iter().map(|t| (t - mt).powi(2)).sum();
    let stl: f64 = rec
        .times
        .iter()
        .zip(&rec.d_min)
        .map(|(t, d)| (t - mt) * (d.ln() - ml))
        .sum();
    rec.decay_rate = if stt > 0.0 { stl / stt } else { 0.0 };
    rec.final_curves = (a, b);
    Ok(rec)
}

/// A shipped avoidance scenario on the dumbbell k = 0.5, u2 in [-2, 2].
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub surface: RevolutionSurface,
    pub c1: FlowCurve,
    pub c2: FlowCurve,
    pub c2_stationary: bool,
    pub t_end: f64,
}

pub const SCENARIO_SAMPLES: usize = 128;

pub fn shipped_scenarios() -> Result<Vec<Scenario>, FlowError> {
    let s = RevolutionSurface::dumbbell(0.5, 2.0);
    let n = SCENARIO_SAMPLES;
    let neck = FlowCurve::parallel(&s, 0.0, n)?;
    Ok(vec![
        Scenario {
            name: "latitude-vs-neck",
            surface: s.clone(),
            c1: FlowCurve::parallel(&s, 0.5, n)?,
            c2: neck.clone(),
            c2_stationary: true,
            t_end: 10.0,
        },
        Scenario {
            name: "opposite-latitudes",
            surface: s.clone(),
            c1: FlowCurve::parallel(&s, 0.4, n)?,
            c2: FlowCurve::parallel(&s, -0.6, n)?,
            c2_stationary: false,
            t_end: 10.0,
        },
        Scenario {
            name: "wavy-vs-neck",
            surface: s.clone(),
            c1: FlowCurve::from_fn(&s, n, 1, |th| [th, 0.5 + 0.2 * th.sin()])?,
            c2: neck,
            c2_stationary: true,
            t_end: 10.0,
        },
    ])
}
