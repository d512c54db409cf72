//! Monge patches z -> (z, u(z)) over disks: energies, Toro's graph, the
//! cutoff flattening and the sphere inversion.

use crate::numerics::gauss_legendre_nodes;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Default excision radius around the Toro singularity.
pub const TORO_EXCISION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("point ({x}, {y}) outside the domain: {reason}")]
    Domain { x: f64, y: f64, reason: String },
    #[error("cutoff radius delta = {0} must lie in (0, 1/2)")]
    Cutoff(f64),
    #[error("patch must satisfy u(0) = 0 and Du(0) = 0 (got u = {u}, |Du| = {du})")]
    NotFlat { u: f64, du: f64 },
    #[error("inversion center hit by input point {index}")]
    Singular { index: usize },
    #[error("invalid inversion config: {0}")]
    Config(String),
    #[error("non-finite integrand at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
}

/// Value, gradient and Hessian of a height function.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphJet {
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

impl GraphJet {
    pub fn grad2(&self) -> f64 {
        self.ux * self.ux + self.uy * self.uy
    }

    pub fn hessian_det(&self) -> f64 {
        self.uxx * self.uyy - self.uxy * self.uxy
    }

    pub fn gauss(&self) -> f64 {
        self.hessian_det() / (1.0 + self.grad2()).powi(2)
    }

    /// Sum of principal curvatures.
    pub fn mean(&self) -> f64 {
        let w = 1.0 + self.grad2();
        ((1.0 + self.uy * self.uy) * self.uxx - 2.0 * self.ux * self.uy * self.uxy
            + (1.0 + self.ux * self.ux) * self.uyy)
            / w.powf(1.5)
    }

    pub fn hessian_norm(&self) -> f64 {
        (self.uxx * self.uxx + 2.0 * self.uxy * self.uxy + self.uyy * self.uyy).sqrt()
    }
}

/// Smoothstep-of-smoothstep transition: 0 for t <= 1, 1 for t >= 2, C^2.
/// Returns (eta, eta', eta'').
pub fn eta(t: f64) -> (f64, f64, f64) {
    if t <= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 2.0 {
        return (1.0, 0.0, 0.0);
    }
    let s = t - 1.0;
    let (p, dp, ddp) = (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s), 6.0 - 12.0 * s);
    let (q, dq, ddq) = (p * p * (3.0 - 2.0 * p), 6.0 * p * (1.0 - p), 6.0 - 12.0 * p);
    (q, dq * dp, ddq * dp * dp + dq * ddp)
}

/// max over t of |eta| + |eta'| + |eta''|, by dense sampling refined by
/// golden-section search.
pub fn eta_bound() -> f64 {
    let f = |t: f64| {
        let (a, b, c) = eta(t);
        a.abs() + b.abs() + c.abs()
    };
    let n = 4000;
    let step = 1.0 / n as f64;
    let k = (0..=n)
        .max_by(|&i, &j| f(1.0 + i as f64 * step).total_cmp(&f(1.0 + j as f64 * step)))
        .unwrap();
    let (mut a, mut b) = (
        (1.0 + (k as f64 - 1.0) * step).max(1.0),
        (1.0 + (k as f64 + 1.0) * step).min(2.0),
    );
    let r = 0.5 * (5f64.sqrt() - 1.0);
    while b - a > 1e-13 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).max(f(1.0 + k as f64 * step))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MongePatch {
    Flat,
    /// u = c |z|^2 / 2
    Paraboloid {
        c: f64,
    },
    /// u = x^2 - y^2
    Saddle,
    /// u = x log|log r|, defined for 0 < r < 1.
    Toro,
    /// u_rho(z) = rho u(z / rho)
    Scaled {
        rho: f64,
        inner: Box<MongePatch>,
    },
    /// u_delta = u eta(|z| / delta)
    Cutoff {
        delta: f64,
        inner: Box<MongePatch>,
    },
}

impl MongePatch {
    pub fn jet(&self, x: f64, y: f64) -> Result<GraphJet, GraphError> {
        match self {
            Self::Flat => Ok(GraphJet::default()),
            Self::Paraboloid { c } => Ok(GraphJet {
                u: 0.5 * c * (x * x + y * y),
                ux: c * x,
                uy: c * y,
                uxx: *c,
                uxy: 0.0,
                uyy: *c,
            }),
            Self::Saddle => Ok(GraphJet {
                u: x * x - y * y,
                ux: 2.0 * x,
                uy: -2.0 * y,
                uxx: 2.0,
                uxy: 0.0,
                uyy: -2.0,
            }),
            Self::Toro => toro_jet(x, y),
            Self::Scaled { rho, inner } => {
                let j = inner.jet(x / rho, y / rho)?;
                Ok(GraphJet {
                    u: rho * j.u,
                    ux: j.ux,
                    uy: j.uy,
                    uxx: j.uxx / rho,
                    uxy: j.uxy / rho,
                    uyy: j.uyy / rho,
                })
            }
            Self::Cutoff { delta, inner } => {
                let r = x.hypot(y);
                let (e, de, dde) = eta(r / delta);
                if e == 0.0 && de == 0.0 && dde == 0.0 {
                    return Ok(GraphJet::default());
                }
                let j = inner.jet(x, y)?;
                if e == 1.0 && de == 0.0 && dde == 0.0 {
                    return Ok(j);
                }
                // D eta_delta and D^2 eta_delta for the radial profile.
                let (nx, ny) = (x / r, y / r);
                let d1 = de / delta;
                let d2 = dde / (delta * delta);
                let (ex, ey) = (d1 * nx, d1 * ny);
                let exx = d2 * nx * nx + d1 * (1.0 - nx * nx) / r;
                let exy = d2 * nx * ny - d1 * nx * ny / r;
                let eyy = d2 * ny * ny + d1 * (1.0 - ny * ny) / r;
                Ok(GraphJet {
                    u: e * j.u,
                    ux: e * j.ux + j.u * ex,
                    uy: e * j.uy + j.u * ey,
                    uxx: e * j.uxx + 2.0 * j.ux * ex + j.u * exx,
                    uxy: e * j.uxy + j.ux * ey + j.uy * ex + j.u * exy,
                    uyy: e * j.uyy + 2.0 * j.uy * ey + j.u * eyy,
                })
            }
        }
    }

    /// Radii where the patch is only finitely smooth.
    pub fn radial_breaks(&self) -> Vec<f64> {
        match self {
            Self::Scaled { rho, inner } => {
                inner.radial_breaks().into_iter().map(|r| r * rho).collect()
            }
            Self::Cutoff { delta, inner } => {
                let mut v = inner.radial_breaks();
                v.extend([*delta, 2.0 * delta]);
                v
            }
            _ => Vec::new(),
        }
    }

    /// Largest radius on which the patch is defined.
    pub fn max_radius(&self) -> f64 {
        match self {
            Self::Toro => 1.0,
            Self::Scaled { rho, inner } => rho * inner.max_radius(),
            Self::Cutoff { inner, .. } => inner.max_radius(),
            _ => f64::INFINITY,
        }
    }
}

fn toro_jet(x: f64, y: f64) -> Result<GraphJet, GraphError> {
    let r2 = x * x + y * y;
    let r = r2.sqrt();
    if !(r > 0.0 && r < 1.0) {
        return Err(GraphError::Domain {
            x,
            y,
            reason: "Toro graph needs 0 < r < 1".into(),
        });
    }
    let l = r.ln();
    let ll = (-l).ln();
    let q = r2 * l;
    let (cx, cy) = (x * x / r2, y * y / r2);
    Ok(GraphJet {
        u: x * ll,
        ux: ll + x * x / q,
        uy: x * y / q,
        uxx: x / q * (3.0 - 2.0 * cx - cx / l),
        uxy: y / q * (1.0 - 2.0 * cx - cx / l),
        uyy: x / q * (1.0 - 2.0 * cy - cy / l),
    })
}

/// Toro's graph: (K, Du, D^2 u) from the closed-form partials.
pub fn toro_curvature(x: f64, y: f64) -> Result<(f64, [f64; 2], [[f64; 2]; 2]), GraphError> {
    let j = toro_jet(x, y)?;
    Ok((j.gauss(), [j.ux, j.uy], [[j.uxx, j.uxy], [j.uxy, j.uyy]]))
}

pub fn flatten_cutoff(p: &MongePatch, delta: f64) -> Result<MongePatch, GraphError> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(GraphError::Cutoff(delta));
    }
    match p.jet(0.0, 0.0) {
        Ok(j) if j.u.abs() <= 1e-14 && j.grad2().sqrt() <= 1e-14 => {}
        Ok(j) => {
            return Err(GraphError::NotFlat {
                u: j.u,
                du: j.grad2().sqrt(),
            })
        }
        Err(_) => {
            return Err(GraphError::NotFlat {
                u: f64::NAN,
                du: f64::INFINITY,
            })
        }
    }
    Ok(MongePatch::Cutoff {
        delta,
        inner: Box::new(p.clone()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Subdomain {
    Disk { r: f64 },
    Annulus { r0: f64, r1: f64 },
}

impl Subdomain {
    fn radii(&self) -> (f64, f64) {
        match *self {
            Self::Disk { r } => (0.0, r),
            Self::Annulus { r0, r1 } => (r0, r1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphGrid {
    pub radial_panels: usize,
    pub angular_panels: usize,
    pub order: usize,
}

impl Default for GraphGrid {
    fn default() -> Self {
        Self {
            radial_panels: 16,
            angular_panels: 16,
            order: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEnergy {
    pub area: f64,
    pub willmore: f64,
    pub max_k: f64,
    pub min_k: f64,
}

/// Tensor Gauss-Legendre in polar coordinates. Radial panels are split at
/// the patch breaks and spaced geometrically when the inner radius is
/// positive and small.
pub fn graph_energy(
    p: &MongePatch,
    sub: Subdomain,
    grid: GraphGrid,
) -> Result<GraphEnergy, GraphError> {
    let (r0, r1) = sub.radii();
    if !(r0 >= 0.0 && r1 > r0) || r1 >= p.max_radius() + 1e-15 {
        return Err(GraphError::Domain {
            x: r1,
            y: 0.0,
            reason: format!("subdomain radii ({r0}, {r1})"),
        });
    }
    let mut cuts = vec![r0, r1];
    cuts.extend(p.radial_breaks().into_iter().filter(|&b| b > r0 && b < r1));
    cuts.sort_by(f64::total_cmp);
    let (x, w) = gauss_legendre_nodes(grid.order);
    let mut radial = Vec::new();
    for span in cuts.windows(2) {
        let (a, b) = (span[0], span[1]);
        let m = grid.radial_panels.max(1);
        let geometric = a > 0.0 && b / a > 10.0;
        for k in 0..m {
            let (pa, pb) = if geometric {
                let q = (b / a).ln() / m as f64;
                (a * (q * k as f64).exp(), a * (q * (k + 1) as f64).exp())
            } else {
                (
                    a + (b - a) * k as f64 / m as f64,
                    a + (b - a) * (k + 1) as f64 / m as f64,
                )
            };
            for (xi, wi) in x.iter().zip(&w) {
                radial.push((0.5 * (pa + pb) + 0.5 * (pb - pa) * xi, 0.5 * (pb - pa) * wi));
            }
        }
    }
    let mut out = GraphEnergy {
        area: 0.0,
        willmore: 0.0,
        max_k: f64::NEG_INFINITY,
        min_k: f64::INFINITY,
    };
    let ma = grid.angular_panels.max(1);
    for k in 0..ma {
        let (ta, tb) = (TAU * k as f64 / ma as f64, TAU * (k + 1) as f64 / ma as f64);
        for (xt, wt) in x.iter().zip(&w) {
            let th = 0.5 * (ta + tb) + 0.5 * (tb - ta) * xt;
            let wt = 0.5 * (tb - ta) * wt;
            let (s, c) = th.sin_cos();
            for &(r, wr) in &radial {
                let (px, py) = (r * c, r * s);
                let j = p.jet(px, py)?;
                let da = (1.0 + j.grad2()).sqrt() * r * wr * wt;
                let h = j.mean();
                let kk = j.gauss();
                if !(da.is_finite() && h.is_finite() && kk.is_finite()) {
                    return Err(GraphError::NonFinite { x: px, y: py });
                }
                out.area += da;
                out.willmore += 0.25 * h * h * da;
                out.max_k = out.max_k.max(kk);
                out.min_k = out.min_k.min(kk);
            }
        }
    }
    Ok(out)
}

/// Sampled graph points `(x, y, u)` on a polar grid as CSV.
pub fn patch_csv(
    p: &MongePatch,
    sub: Subdomain,
    n_r: usize,
    n_theta: usize,
) -> Result<String, GraphError> {
    let (r0, r1) = sub.radii();
    let mut s = String::from("x,y,u\n");
    for i in 0..n_r {
        let r = r0 + (r1 - r0) * (i as f64 + 0.5) / n_r as f64;
        for k in 0..n_theta {
            let th = TAU * k as f64 / n_theta as f64;
            let (x, y) = (r * th.cos(), r * th.sin());
            s.push_str(&format!("{x:.12e},{y:.12e},{:.12e}\n", p.jet(x, y)?.u));
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InversionConfig {
    pub lambda: f64,
    /// Unit vector orthogonal to the first two coordinates.
    pub nu: Vec<f64>,
}

impl InversionConfig {
    pub fn new(lambda: f64, nu: Vec<f64>) -> Result<Self, GraphError> {
        let c = Self { lambda, nu };
        c.validate()?;
        Ok(c)
    }

    /// Codimension-one default, nu = e3.
    pub fn standard(lambda: f64) -> Result<Self, GraphError> {
        Self::new(lambda, vec![0.0, 0.0, 1.0])
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(GraphError::Config(format!(
                "lambda = {} must be positive",
                self.lambda
            )));
        }
        if self.nu.len() < 3 || self.nu[0] != 0.0 || self.nu[1] != 0.0 {
            return Err(GraphError::Config(
                "nu must lie in {0}^2 x R^(n-2) with n >= 3".into(),
            ));
        }
        let n: f64 = self.nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(GraphError::Config(format!("|nu| = {n} is not 1")));
        }
        Ok(())
    }

    /// Height threshold of the image cap of the flat disk of radius delta.
    pub fn cap_threshold(&self, delta: f64) -> f64 {
        2.0 * self.lambda * self.lambda / (delta * delta + self.lambda * self.lambda)
    }

    /// Length of the image of the circle |z| = delta.
    pub fn circle_length(&self, delta: f64) -> f64 {
        TAU * 2.0 * self.lambda * delta / (delta * delta + self.lambda * self.lambda)
    }
}

/// I(x) = 2 lambda (x + lambda nu) / |x + lambda nu|^2
pub fn invert_points(pts: &[Vec<f64>], cfg: &InversionConfig) -> Result<Vec<Vec<f64>>, GraphError> {
    cfg.validate()?;
    let l = cfg.lambda;
    pts.iter()
        .enumerate()
        .map(|(index, x)| {
            if x.len() != cfg.nu.len() {
                return Err(GraphError::Config(format!(
                    "point {index} has dimension {}, expected {}",
                    x.len(),
                    cfg.nu.len()
                )));
            }
            let y: Vec<f64> = x.iter().zip(&cfg.nu).map(|(a, n)| a + l * n).collect();
            let n2: f64 = y.iter().map(|v| v * v).sum();
            if !(n2 > 0.0 && n2.is_finite()) {
                return Err(GraphError::Singular { index });
            }
            Ok(y.iter().map(|v| 2.0 * l * v / n2).collect())
        })
        .collect()
}

/// Points of the flat disk {(z, 0): |z| <= delta} on `rings` circles.
pub fn flat_disk_points(delta: f64, rings: usize, per_ring: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; dim]];
    for i in 1..=rings {
        let r = delta * i as f64 / rings as f64;
        for k in 0..per_ring {
            let th = 2.0 * PI * k as f64 / per_ring as f64;
            let mut p = vec![0.0; dim];
            p[0] = r * th.cos();
            p[1] = r * th.sin();
            out.push(p);
        }
    }
    out
}

/// max of |Du| + |Du_delta| over the disk of radius 2 delta, sampled on a
/// polar grid. The cutoff energy estimate assumes this is at most 1.
pub fn cutoff_smallness(p: &MongePatch, delta: f64, samples: usize) -> Result<f64, GraphError> {
    let cut = flatten_cutoff(p, delta)?;
    let mut out = 0.0f64;
    for i in 0..=samples {
        let r = 2.0 * delta * i as f64 / samples as f64;
        for k in 0..samples {
            let th = TAU * k as f64 / samples as f64;
            let (x, y) = (r * th.cos(), r * th.sin());
            out = out.max(p.jet(x, y)?.grad2().sqrt() + cut.jet(x, y)?.grad2().sqrt());
        }
    }
    Ok(out)
}
