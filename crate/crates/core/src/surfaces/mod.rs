//! Surfaces of revolution `f(u1, u2) = (h(u2) cos u1, h(u2) sin u1, g(u2))`.

mod glued;
mod profile;

pub use glued::{
    build_glued_family, CapKind, GluedFamilyConfig, GluedSurface, HeightRule, Joins, NeckKind,
    PieceRange,
};
pub use profile::{Jet, Piece, PieceSpec, ProfileCurve, Segment};

use crate::numerics::{integrate_endpoint, NumericsError, QuadratureSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("u2 = {u2} outside profile domain [{lo}, {hi}]")]
    Domain { u2: f64, lo: f64, hi: f64 },
    #[error("pole at u2 = {u2}: profile does not meet the axis orthogonally")]
    Pole { u2: f64 },
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("join {index} not C1: position {position:e}, direction {direction:e}")]
    Join {
        index: usize,
        position: f64,
        direction: f64,
    },
    #[error("tangency solve failed for {what}: residual {residual:e}")]
    Tangency { what: String, residual: f64 },
    #[error("unsupported family: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// First fundamental form coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvatures {
    pub gauss: f64,
    pub mean_abs: f64,
    pub meridian: f64,
    pub parallel: f64,
    /// Evaluated at a C^{1,1} join; values are those of the upper piece.
    pub at_join: bool,
}

/// Area and Willmore energy of a rotationally symmetric piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energies {
    pub area: f64,
    pub willmore: f64,
}

const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevolutionSurface {
    pub profile: ProfileCurve,
    pub closed_bottom: bool,
    pub closed_top: bool,
}

impl RevolutionSurface {
    pub fn new(profile: ProfileCurve) -> Self {
        let (lo, hi) = profile.domain();
        let scale = profile
            .segments()
            .iter()
            .map(|s| s.scale)
            .fold(0.0, f64::max);
        let closed = |u: f64| {
            profile
                .jet(u)
                .map(|(j, _)| j.h.abs() <= POLE_TOL * scale)
                .unwrap_or(false)
        };
        let (closed_bottom, closed_top) = (closed(lo), closed(hi));
        Self {
            profile,
            closed_bottom,
            closed_top,
        }
    }

    pub fn sphere(radius: f64) -> Self {
        Self::new(
            ProfileCurve::single("sphere", Piece::Circle, radius, -FRAC_PI_2, FRAC_PI_2).unwrap(),
        )
    }

    pub fn unit_sphere() -> Self {
        Self::sphere(1.0)
    }

    /// Upper hemisphere of radius `a` (open along the equator).
    pub fn hemisphere(a: f64) -> Self {
        Self::new(ProfileCurve::single("hemisphere", Piece::Circle, a, 0.0, FRAC_PI_2).unwrap())
    }

    /// Spherical cap of the unit sphere above latitude `lat`.
    pub fn spherical_cap(lat: f64) -> Self {
        Self::new(ProfileCurve::single("cap", Piece::Circle, 1.0, lat, FRAC_PI_2).unwrap())
    }

    /// Cylinder of radius `a`; `u2` is height.
    pub fn cylinder(a: f64, height: f64) -> Self {
        Self::new(ProfileCurve::single("cylinder", Piece::Line { r: a }, 1.0, 0.0, height).unwrap())
    }

    /// Catenoid `h = a cosh(t/a)`, `g = t` for `t` in `[t_lo, t_hi]`.
    pub fn catenoid(a: f64, t_lo: f64, t_hi: f64) -> Self {
        Self::new(ProfileCurve::single("catenoid", Piece::Catenary, a, t_lo / a, t_hi / a).unwrap())
    }

    /// Closed spheroid `(cos t, b sin t)`.
    pub fn spheroid(b: f64) -> Self {
        Self::new(
            ProfileCurve::single("spheroid", Piece::Ellipse { b }, 1.0, -FRAC_PI_2, FRAC_PI_2)
                .unwrap(),
        )
    }

    /// Paraboloid cap `g = h^2 / 2` over `h <= radius`.
    pub fn paraboloid(radius: f64) -> Self {
        Self::new(ProfileCurve::single("paraboloid", Piece::Parabola, 1.0, 0.0, radius).unwrap())
    }

    /// Dumbbell neck band `h = 1 + k t^2`, `g = t`, `|t| <= half_height`.
    pub fn dumbbell(k: f64, half_height: f64) -> Self {
        Self::new(
            ProfileCurve::single(
                "dumbbell",
                Piece::Neck { k },
                1.0,
                -half_height,
                half_height,
            )
            .unwrap(),
        )
    }

    pub fn domain(&self) -> (f64, f64) {
        self.profile.domain()
    }

    pub fn is_closed(&self) -> bool {
        self.closed_bottom && self.closed_top
    }

    pub fn jet(&self, u2: f64) -> Result<Jet, SurfaceError> {
        self.profile.jet(u2).map(|(j, _)| j)
    }

    pub fn metric_at(&self, u2: f64) -> Result<Metric, SurfaceError> {
        let j = self.jet(u2)?;
        Ok(Metric {
            e: j.h * j.h,
            f: 0.0,
            g: j.dh * j.dh + j.dg * j.dg,
        })
    }

    pub fn curvatures_at(&self, u2: f64) -> Result<Curvatures, SurfaceError> {
        let (j, at_join) = self.profile.jet(u2)?;
        let scale = self
            .profile
            .segments()
            .iter()
            .map(|s| s.scale)
            .fold(0.0, f64::max);
        if j.h.abs() <= POLE_TOL * scale && j.dg.abs() > 1e-9 * j.speed() {
            return Err(SurfaceError::Pole { u2 });
        }
        Ok(curvatures_of(&j, at_join))
    }

    pub fn position(&self, u1: f64, u2: f64) -> Result<[f64; 3], SurfaceError> {
        let j = self.jet(u2)?;
        let (s, c) = u1.sin_cos();
        Ok([j.h * c, j.h * s, j.g])
    }

    pub fn area_and_willmore(&self, range: (f64, f64)) -> Result<Energies, SurfaceError> {
        self.area_and_willmore_with(range, &QuadratureSpec::default())
    }

    /// Integrates piece by piece so that no integrand straddles a join.
    pub fn area_and_willmore_with(
        &self,
        range: (f64, f64),
        spec: &QuadratureSpec,
    ) -> Result<Energies, SurfaceError> {
        let area = self.piecewise(range, spec, |j| j.h * j.speed())?;
        let w = self.piecewise(range, spec, |j| {
            let hm = j.kappa_meridian() + j.kappa_parallel();
            hm * hm * j.h * j.speed()
        })?;
        Ok(Energies {
            area: 2.0 * PI * area,
            willmore: 0.5 * PI * w,
        })
    }

    /// Integral of K dmu over the band.
    pub fn total_curvature(
        &self,
        range: (f64, f64),
        spec: &QuadratureSpec,
    ) -> Result<f64, SurfaceError> {
        let v = self.piecewise(range, spec, |j| {
            j.kappa_meridian() * j.kappa_parallel() * j.h * j.speed()
        })?;
        Ok(2.0 * PI * v)
    }

    fn piecewise<F: Fn(&Jet) -> f64>(
        &self,
        range: (f64, f64),
        spec: &QuadratureSpec,
        f: F,
    ) -> Result<f64, SurfaceError> {
        let (lo, hi) = self.domain();
        for u in [range.0, range.1] {
            if !(u >= lo && u <= hi) {
                return Err(SurfaceError::Domain { u2: u, lo, hi });
            }
        }
        let mut total = 0.0;
        for seg in self.profile.segments() {
            let a = seg.start.max(range.0);
            let b = seg.end.min(range.1);
            if b <= a {
                continue;
            }
            let e = integrate_endpoint(|p| f(&seg.jet(p.x)), a, b, spec)?;
            total += e.value;
        }
        Ok(total)
    }

    /// Lower bound on the extrinsic diameter of the band from `samples`
    /// profile points, pairing azimuths 0 and pi.
    pub fn diameter_of(&self, range: (f64, f64), samples: usize) -> Result<f64, SurfaceError> {
        let n = samples.max(2);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let u = (range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64).min(range.1);
                self.jet(u).map(|j| (j.h, j.g))
            })
            .collect::<Result<_, _>>()?;
        let mut best = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i..] {
                let d2 = (p.0 + q.0).powi(2) + (p.1 - q.1).powi(2);
                best = best.max(d2);
            }
        }
        Ok(best.sqrt())
    }

    /// Largest Gauss curvature over `samples` points per segment.
    pub fn max_gauss_curvature(&self, samples: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for seg in self.profile.segments() {
            for i in 0..=samples {
                let u = seg.start + (seg.end - seg.start) * i as f64 / samples as f64;
                best = best.max(curvatures_of(&seg.jet(u), false).gauss);
            }
        }
        best
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            profile: self.profile.scaled(lambda),
            ..self.clone()
        }
    }

    /// Sampled `(u1, u2, x, y, z)` grid as CSV.
    pub fn grid_csv(&self, n_u1: usize, n_u2: usize) -> Result<String, SurfaceError> {
        let (lo, hi) = self.domain();
        let mut out = String::from("u1,u2,x,y,z\n");
        for i in 0..n_u2 {
            let u2 = lo + (hi - lo) * i as f64 / (n_u2 - 1).max(1) as f64;
            for k in 0..n_u1 {
                let u1 = 2.0 * PI * k as f64 / n_u1 as f64;
                let p = self.position(u1, u2)?;
                out.push_str(&format!(
                    "{u1:.12e},{u2:.12e},{:.12e},{:.12e},{:.12e}\n",
                    p[0], p[1], p[2]
                ));
            }
        }
        Ok(out)
    }
}

pub fn curvatures_of(j: &Jet, at_join: bool) -> Curvatures {
    let meridian = j.kappa_meridian();
    let parallel = j.kappa_parallel();
    Curvatures {
        gauss: meridian * parallel,
        mean_abs: (meridian + parallel).abs(),
        meridian,
        parallel,
        at_join,
    }
}
