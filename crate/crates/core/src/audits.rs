//! Numerical checks of the diameter, interior-point and monotonicity
//! inequalities on rotational patches, the length/energy ratio table and
//! the injectivity-radius bound terms.

use crate::geodesic::{
    closure_check, shoot_with, trace_length, GeodesicError, GeodesicState, ShootOptions,
};
use crate::numerics::{integrate_1d, NumericsError, QuadratureSpec};
use crate::report::AuditReport;
use crate::spheroid::{solve_parameters, SolverError};
use crate::surfaces::{
    build_glued_family, GluedFamilyConfig, HeightRule, RevolutionSurface, SurfaceError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Boundary samples per circle for extrinsic distances and lengths.
pub const BOUNDARY_SAMPLES: usize = 4096;
/// Default profile samples for diameters and interior-point searches.
pub const PROFILE_SAMPLES: usize = 2048;
pub const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("point u2 = {u2} is not in the patch interior ({lo}, {hi})")]
    Domain { u2: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Rotationally symmetric patch `{lo < u2 < hi}` of a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub label: String,
    pub surface: RevolutionSurface,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLength {
    pub intrinsic: f64,
    pub extrinsic: f64,
}

impl PatchSpec {
    pub fn new(
        label: impl Into<String>,
        surface: RevolutionSurface,
        lo: f64,
        hi: f64,
    ) -> Result<Self, AuditError> {
        let (dlo, dhi) = surface.domain();
        if !(lo < hi && lo >= dlo && hi <= dhi) {
            return Err(AuditError::Precondition(format!(
                "patch [{lo}, {hi}] not inside domain [{dlo}, {dhi}]"
            )));
        }
        Ok(Self {
            label: label.into(),
            surface,
            lo,
            hi,
        })
    }

    /// u2 values of the boundary circles; ends closing on the axis are not boundary.
    pub fn boundary_circles(&self) -> Vec<f64> {
        let (dlo, dhi) = self.surface.domain();
        let mut out = Vec::new();
        if !(self.lo == dlo && self.surface.closed_bottom) {
            out.push(self.lo);
        }
        if !(self.hi == dhi && self.surface.closed_top) {
            out.push(self.hi);
        }
        out
    }

    /// Boundary length from the metric and from the embedded polygon
    /// (Richardson-extrapolated over n and 2n vertices).
    pub fn boundary_length(&self) -> Result<BoundaryLength, AuditError> {
        let mut out = BoundaryLength {
            intrinsic: 0.0,
            extrinsic: 0.0,
        };
        for u2 in self.boundary_circles() {
            out.intrinsic += TAU * self.surface.metric_at(u2)?.e.sqrt();
            let poly = |n: usize| -> Result<f64, SurfaceError> {
                let mut len = 0.0;
                let mut prev = self.surface.position(0.0, u2)?;
                for k in 1..=n {
                    let p = self.surface.position(TAU * k as f64 / n as f64, u2)?;
                    len += dist(&p, &prev);
                    prev = p;
                }
                Ok(len)
            };
            let (l1, l2) = (poly(BOUNDARY_SAMPLES)?, poly(2 * BOUNDARY_SAMPLES)?);
            out.extrinsic += (4.0 * l2 - l1) / 3.0;
        }
        Ok(out)
    }

    /// Extrinsic distance from `f(u1, u2)` to the boundary image.
    pub fn distance_to_boundary(&self, u1: f64, u2: f64) -> Result<f64, AuditError> {
        let x = self.surface.position(u1, u2)?;
        let mut best = f64::INFINITY;
        for b in self.boundary_circles() {
            let d = |psi: f64| {
                self.surface
                    .position(psi, b)
                    .map(|p| dist(&p, &x))
                    .unwrap_or(f64::INFINITY)
            };
            let step = TAU / BOUNDARY_SAMPLES as f64;
            let k = (0..BOUNDARY_SAMPLES)
                .min_by(|&i, &j| d(i as f64 * step).total_cmp(&d(j as f64 * step)))
                .unwrap();
            let psi = k as f64 * step;
            best = best.min(golden_min(d, psi - step, psi + step, 1e-12).1);
        }
        Ok(best)
    }
}

fn dist(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

/// Golden-section minimum of a unimodal function on [a, b].
fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// diam f(D) >= 2A / (L + 2 sqrt(W A)).
pub fn diameter_bound_audit(p: &PatchSpec) -> Result<AuditReport, AuditError> {
    let e = p.surface.area_and_willmore((p.lo, p.hi))?;
    let l = p.boundary_length()?;
    let diam = p.surface.diameter_of((p.lo, p.hi), PROFILE_SAMPLES)?;
    let rhs = 2.0 * e.area / (l.intrinsic + 2.0 * (e.willmore * e.area).sqrt());
    Ok(
        AuditReport::at_least(format!("diameter-bound[{}]", p.label), diam, rhs, AUDIT_TOL)
            .with("lo", p.lo)
            .with("hi", p.hi)
            .with("area", e.area)
            .with("willmore", e.willmore)
            .with("boundary_length", l.intrinsic),
    )
}

/// Some interior point has dist(f(x0), f(dD)) >= (diam - L)/2.
pub fn interior_point_audit(p: &PatchSpec, samples: usize) -> Result<AuditReport, AuditError> {
    let circles = p.boundary_circles();
    if circles.len() != 1 {
        return Err(AuditError::Precondition(format!(
            "boundary must be connected, patch has {} boundary circles",
            circles.len()
        )));
    }
    let l = p.boundary_length()?;
    let diam = p.surface.diameter_of((p.lo, p.hi), PROFILE_SAMPLES)?;
    let n = samples.max(3);
    let step = (p.hi - p.lo) / n as f64;
    let d = |u: f64| {
        p.distance_to_boundary(0.0, u.clamp(p.lo, p.hi))
            .unwrap_or(0.0)
    };
    let k = (0..=n)
        .max_by(|&i, &j| d(p.lo + i as f64 * step).total_cmp(&d(p.lo + j as f64 * step)))
        .unwrap();
    let u = p.lo + k as f64 * step;
    let (u_best, neg) = golden_min(|x| -d(x), (u - step).max(p.lo), (u + step).min(p.hi), 1e-10);
    let rhs = 0.5 * (diam - l.intrinsic);
    Ok(
        AuditReport::at_least(format!("interior-point[{}]", p.label), -neg, rhs, AUDIT_TOL)
            .with("u2_best", u_best)
            .with("diameter", diam)
            .with("boundary_length", l.intrinsic),
    )
}

/// W(f, D) + 2 int_{dD} |f(x) - f(x0)|^{-1} ds >= 4 pi.
pub fn monotonicity_audit(p: &PatchSpec, x0: (f64, f64)) -> Result<AuditReport, AuditError> {
    let (u1, u2) = x0;
    let circles = p.boundary_circles();
    let edge = 1e-12 * (1.0 + p.hi.abs().max(p.lo.abs()));
    if !(u2 > p.lo - edge && u2 < p.hi + edge) || circles.iter().any(|b| (u2 - b).abs() <= edge) {
        return Err(AuditError::Domain {
            u2,
            lo: p.lo,
            hi: p.hi,
        });
    }
    let w = p.surface.area_and_willmore((p.lo, p.hi))?.willmore;
    let x = p.surface.position(u1, u2)?;
    let mut boundary = 0.0;
    for b in circles {
        let h = p.surface.metric_at(b)?.e.sqrt();
        // The integrand peaks at psi = u1; put the peak at the endpoints.
        boundary += integrate_1d(
            |psi| {
                p.surface
                    .position(psi, b)
                    .map(|q| h / dist(&q, &x))
                    .unwrap_or(f64::NAN)
            },
            u1,
            u1 + TAU,
            &QuadratureSpec::default(),
        )?;
    }
    Ok(AuditReport::at_least(
        format!("monotonicity[{}]", p.label),
        w + 2.0 * boundary,
        4.0 * PI,
        AUDIT_TOL,
    )
    .with("u1", u1)
    .with("u2", u2)
    .with("willmore", w)
    .with("boundary_integral", boundary))
}

/// Closed surfaces used by the random patch audits.
pub fn audit_surfaces() -> Result<Vec<(String, RevolutionSurface)>, AuditError> {
    let sol = solve_parameters(3, 0.2)?;
    Ok(vec![
        ("unit-sphere".into(), RevolutionSurface::unit_sphere()),
        ("spheroid".into(), sol.surface()),
        (
            "glued-quadratic".into(),
            build_glued_family(&GluedFamilyConfig::sphere_catenoid(
                0.1,
                HeightRule::QUADRATIC,
            ))?
            .surface,
        ),
        (
            "glued-literal".into(),
            build_glued_family(&GluedFamilyConfig::sphere_catenoid(
                0.1,
                HeightRule::LITERAL,
            ))?
            .surface,
        ),
        (
            "capped-spheroid".into(),
            build_glued_family(&GluedFamilyConfig::capped_spheroid(0.2, sol.b))?.surface,
        ),
    ])
}

/// Seeded random caps (one pole plus one boundary circle) with an interior
/// point, cycling over `audit_surfaces`.
pub fn random_caps(seed: u64, count: usize) -> Result<Vec<(PatchSpec, (f64, f64))>, AuditError> {
    let surfaces = audit_surfaces()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let (name, s) = &surfaces[i % surfaces.len()];
        let (lo, hi) = s.domain();
        let len = hi - lo;
        let cut = lo + len * rng.gen_range(0.02..0.98);
        let (a, b) = if rng.gen_bool(0.5) {
            (lo, cut)
        } else {
            (cut, hi)
        };
        let frac: f64 = rng.gen_range(0.05..0.95);
        let x0 = (rng.gen_range(0.0..TAU), a + frac * (b - a));
        out.push((PatchSpec::new(format!("{name}#{i}"), s.clone(), a, b)?, x0));
    }
    Ok(out)
}

/// Runs all three patch audits on each random cap.
pub fn random_cap_audits(seed: u64, count: usize) -> Result<Vec<AuditReport>, AuditError> {
    let mut out = Vec::new();
    for (p, x0) in random_caps(seed, count)? {
        out.push(diameter_bound_audit(&p)?);
        out.push(interior_point_audit(&p, 256)?);
        out.push(monotonicity_audit(&p, x0)?);
    }
    Ok(out)
}

/// A surface with a closed geodesic on it, for the ratio table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub label: String,
    pub a: Option<f64>,
    pub surface: RevolutionSurface,
    pub geodesic_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub label: String,
    pub a: Option<f64>,
    pub length: f64,
    pub willmore: f64,
    pub area: f64,
    /// L / ((6 pi - W) sqrt A), absent when W >= 6 pi.
    pub ratio: Option<f64>,
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
    pub min_ratio: Option<f64>,
}

impl RatioTable {
    pub fn csv(&self) -> String {
        let mut s = String::from("label,a,length,willmore,area,ratio,vacuous\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{},{}\n",
                r.label,
                r.a.map(|a| a.to_string()).unwrap_or_default(),
                r.length,
                r.willmore,
                r.area,
                r.ratio.map(|v| format!("{v:.12e}")).unwrap_or_default(),
                r.vacuous
            ));
        }
        s
    }
}

pub fn main_theorem_ratio(
    family: &[FamilyEntry],
    spec: &QuadratureSpec,
) -> Result<RatioTable, AuditError> {
    let mut rows = Vec::new();
    for e in family {
        let en = e.surface.area_and_willmore_with(e.surface.domain(), spec)?;
        let gap = 6.0 * PI - en.willmore;
        let vacuous = gap <= 0.0;
        let ratio = (!vacuous).then(|| e.geodesic_length / (gap * en.area.sqrt()));
        rows.push(RatioRow {
            label: e.label.clone(),
            a: e.a,
            length: e.geodesic_length,
            willmore: en.willmore,
            area: en.area,
            ratio,
            vacuous,
        });
    }
    let min_ratio = rows.iter().filter_map(|r| r.ratio).reduce(f64::min);
    Ok(RatioTable { rows, min_ratio })
}

/// Glued sphere/catenoid/cylinder surfaces with the neck parallel as the
/// closed geodesic, its length measured by shooting.
pub fn neck_family(
    a_values: &[f64],
    rule: HeightRule,
    opts: ShootOptions,
) -> Result<Vec<FamilyEntry>, AuditError> {
    a_values
        .iter()
        .map(|&a| {
            let g = build_glued_family(&GluedFamilyConfig::sphere_catenoid(a, rule))?;
            let neck = 0.5 * (g.neck.0 + g.neck.1);
            let init = GeodesicState::from_angle(&g.surface, 0.0, neck, 0.0)?;
            let tr = shoot_with(&g.surface, init, TAU * a * 1.25, opts)?;
            let c = closure_check(&tr, 1e-8)?.ok_or(GeodesicError::NotClosed)?;
            let len = trace_length(&tr, (0.0, c.period))?.nominal;
            Ok(FamilyEntry {
                label: format!("neck a={a}"),
                a: Some(a),
                surface: g.surface,
                geodesic_length: len,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub max_gauss: f64,
    /// pi / sqrt(max K); infinite when max K <= 0.
    pub curvature_term: f64,
    /// (6 pi - W) sqrt(A) / 2, to be multiplied by the unknown C(n).
    pub energy_term: f64,
    pub energy_term_factor: String,
    pub willmore: f64,
    pub area: f64,
    /// Half the supplied closed geodesic length (upper bound for the
    /// injectivity radius).
    pub half_geodesic_length: f64,
}

pub fn injectivity_bound_report(
    s: &RevolutionSurface,
    geodesic_length: f64,
) -> Result<InjectivityReport, AuditError> {
    let max_gauss = s.max_gauss_curvature(4096);
    let e = s.area_and_willmore(s.domain())?;
    let curvature_term = if max_gauss > 0.0 {
        PI / max_gauss.sqrt()
    } else {
        f64::INFINITY
    };
    Ok(InjectivityReport {
        max_gauss,
        curvature_term,
        energy_term: 0.5 * (6.0 * PI - e.willmore) * e.area.sqrt(),
        energy_term_factor: "C(n)".into(),
        willmore: e.willmore,
        area: e.area,
        half_geodesic_length: 0.5 * geodesic_length,
    })
}
