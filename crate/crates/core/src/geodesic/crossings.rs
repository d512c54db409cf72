use super::{wrap_pi, GeodesicError, GeodesicState, GeodesicTrace};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Crossings with angle below this (or above pi minus this) are treated as
/// numerical near-tangencies.
pub const ANGLE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub s: f64,
    /// Position, u1 reduced to [0, 2pi).
    pub u1: f64,
    pub u2: f64,
    /// Angle between the tangents at t and s in the surface metric.
    pub angle: f64,
}

/// A geometric double point with the parameter pairs meeting there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingPoint {
    pub u1: f64,
    pub u2: f64,
    pub pairs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub period: f64,
    pub crossings: Vec<Crossing>,
    pub points: Vec<CrossingPoint>,
    /// Parameter pairs rejected as near-tangential.
    pub degenerate: Vec<(f64, f64, f64)>,
    pub segments: usize,
}

impl CrossingReport {
    pub fn max_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.pairs.len()).max().unwrap_or(0)
    }

    /// Smallest of min(theta, pi - theta) over all crossings.
    pub fn xi(&self) -> f64 {
        self.crossings
            .iter()
            .map(|c| c.angle.min(PI - c.angle))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy)]
struct Seg {
    idx: usize,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Seg {
    fn xmin(&self) -> f64 {
        self.x0.min(self.x1)
    }
    fn xmax(&self) -> f64 {
        self.x0.max(self.x1)
    }
}

/// Closed polyline over one period: stored states up to `T` plus the exact
/// state at `T`.
pub fn period_vertices(
    tr: &GeodesicTrace,
    period: f64,
) -> Result<Vec<GeodesicState>, GeodesicError> {
    let t0 = tr.states[0].t;
    let mut v: Vec<GeodesicState> = tr
        .states
        .iter()
        .copied()
        .take_while(|s| s.t < t0 + period - 1e-12)
        .collect();
    v.push(tr.state_at(t0 + period)?);
    Ok(v)
}

fn segment_hit(a: &Seg, b: &Seg) -> Option<(f64, f64)> {
    let (dx1, dy1) = (a.x1 - a.x0, a.y1 - a.y0);
    let (dx2, dy2) = (b.x1 - b.x0, b.y1 - b.y0);
    let den = dx1 * dy2 - dy1 * dx2;
    if den == 0.0 {
        return None;
    }
    let (ex, ey) = (b.x0 - a.x0, b.y0 - a.y0);
    let p = (ex * dy2 - ey * dx2) / den;
    let q = (ex * dy1 - ey * dx1) / den;
    let tol = 1e-9;
    if p >= -tol && p <= 1.0 + tol && q >= -tol && q <= 1.0 + tol {
        Some((p, q))
    } else {
        None
    }
}

/// Transversal self-intersections of a closed trace over one period.
pub fn detect_self_intersections(tr: &GeodesicTrace) -> Result<CrossingReport, GeodesicError> {
    let closure = tr.closure.ok_or(GeodesicError::NotClosed)?;
    let period = closure.period;
    let verts = period_vertices(tr, period)?;
    let m = verts.len() - 1;
    let t0 = verts[0].t;

    // Chart segments with seam duplicates.
    let mut segs = Vec::with_capacity(m + m / 8);
    for i in 0..m {
        let (a, b) = (verts[i], verts[i + 1]);
        let x0 = a.u1.rem_euclid(TAU);
        let x1 = x0 + (b.u1 - a.u1);
        let s = Seg {
            idx: i,
            x0,
            y0: a.u2,
            x1,
            y1: b.u2,
        };
        segs.push(s);
        if s.xmax() >= TAU {
            segs.push(Seg {
                x0: x0 - TAU,
                x1: x1 - TAU,
                ..s
            });
        }
        if s.xmin() < 0.0 {
            segs.push(Seg {
                x0: x0 + TAU,
                x1: x1 + TAU,
                ..s
            });
        }
    }
    segs.sort_by(|a, b| a.xmin().total_cmp(&b.xmin()));

    let adjacent = |i: usize, j: usize| i.abs_diff(j) <= 1 || (i.min(j) == 0 && i.max(j) == m - 1);
    let mut raw = Vec::new();
    let mut active: Vec<Seg> = Vec::new();
    for s in &segs {
        let x = s.xmin();
        active.retain(|a| a.xmax() >= x - 1e-12);
        for a in &active {
            if adjacent(a.idx, s.idx) {
                continue;
            }
            let (ymin, ymax) = (a.y0.min(a.y1), a.y0.max(a.y1));
            if s.y0.max(s.y1) < ymin - 1e-12 || s.y0.min(s.y1) > ymax + 1e-12 {
                continue;
            }
            if let Some((p, q)) = segment_hit(a, s) {
                let ta = verts[a.idx].t + p * (verts[a.idx + 1].t - verts[a.idx].t);
                let ts = verts[s.idx].t + q * (verts[s.idx + 1].t - verts[s.idx].t);
                raw.push((ta, ts));
            }
        }
        active.push(*s);
    }

    let norm = |t: f64| {
        let r = (t - t0).rem_euclid(period);
        if period - r < 1e-9 * period {
            0.0
        } else {
            r
        }
    };
    let cyc = |a: f64, b: f64| {
        let d = (a - b).abs();
        d.min(period - d)
    };

    let mut crossings: Vec<Crossing> = Vec::new();
    let mut degenerate = Vec::new();
    for (ta, tb) in raw {
        let (t, s) = refine(tr, ta, tb, period)?;
        let (mut t, mut s) = (norm(t), norm(s));
        if t > s {
            std::mem::swap(&mut t, &mut s);
        }
        if cyc(t, s) < 1e-6 {
            continue;
        }
        let dup = |c: &Crossing| {
            cyc(c.t, t) < 1e-7 && cyc(c.s, s) < 1e-7 || cyc(c.t, s) < 1e-7 && cyc(c.s, t) < 1e-7
        };
        if crossings.iter().any(dup)
            || degenerate
                .iter()
                .any(|&(a, b, _)| cyc(a, t) < 1e-7 && cyc(b, s) < 1e-7)
        {
            continue;
        }
        let (a, b) = (tr.state_at(t0 + t)?, tr.state_at(t0 + s)?);
        let met = tr.surface.metric_at(a.u2)?;
        let dot = met.e * a.du1 * b.du1 + met.g * a.du2 * b.du2;
        let na = (met.e * a.du1 * a.du1 + met.g * a.du2 * a.du2).sqrt();
        let nb = (met.e * b.du1 * b.du1 + met.g * b.du2 * b.du2).sqrt();
        let angle = (dot / (na * nb)).clamp(-1.0, 1.0).acos();
        if angle < ANGLE_FLOOR || angle > PI - ANGLE_FLOOR {
            degenerate.push((t, s, angle));
            continue;
        }
        crossings.push(Crossing {
            t,
            s,
            u1: a.u1.rem_euclid(TAU),
            u2: a.u2,
            angle,
        });
    }
    crossings.sort_by(|a, b| a.t.total_cmp(&b.t));

    let mut points: Vec<CrossingPoint> = Vec::new();
    for (k, c) in crossings.iter().enumerate() {
        match points
            .iter_mut()
            .find(|p| wrap_pi(p.u1 - c.u1).abs() < 1e-6 && (p.u2 - c.u2).abs() < 1e-6)
        {
            Some(p) => p.pairs.push(k),
            None => points.push(CrossingPoint {
                u1: c.u1,
                u2: c.u2,
                pairs: vec![k],
            }),
        }
    }
    Ok(CrossingReport {
        period,
        crossings,
        points,
        degenerate,
        segments: m,
    })
}

/// Newton iteration on (t, s) for u(t) = u(s) modulo 2pi in u1.
fn refine(tr: &GeodesicTrace, t: f64, s: f64, period: f64) -> Result<(f64, f64), GeodesicError> {
    let (lo, hi) = tr.t_range();
    let clampt = |x: f64| x.clamp(lo, hi.min(lo + period));
    let (mut t, mut s) = (clampt(t), clampt(s));
    let a = tr.state_at(t)?;
    let b = tr.state_at(s)?;
    let k = ((a.u1 - b.u1) / TAU).round();
    for _ in 0..30 {
        let a = tr.state_at(t)?;
        let b = tr.state_at(s)?;
        let f1 = a.u1 - b.u1 - k * TAU;
        let f2 = a.u2 - b.u2;
        let det = -a.du1 * b.du2 + b.du1 * a.du2;
        if det == 0.0 {
            break;
        }
        let dt = (-b.du2 * f1 + b.du1 * f2) / det;
        let ds = (-a.du2 * f1 + a.du1 * f2) / det;
        t = clampt(t - dt);
        s = clampt(s - ds);
        if dt.abs().max(ds.abs()) < 1e-13 {
            return Ok((t, s));
        }
    }
    let a = tr.state_at(t)?;
    let b = tr.state_at(s)?;
    if (wrap_pi(a.u1 - b.u1)).hypot(a.u2 - b.u2) < 1e-10 {
        Ok((t, s))
    } else {
        Err(GeodesicError::Refinement { t, s })
    }
}
