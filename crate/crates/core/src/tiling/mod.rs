//! Tiles of a sphere-type surface cut along a closed geodesic, with
//! per-tile curvature integrals, corner angles and Gauss-Bonnet checks.

mod grid;

pub use grid::UNLABELED;

use crate::geodesic::{detect_self_intersections, CrossingReport, GeodesicError, GeodesicTrace};
use crate::numerics::gauss_legendre_nodes;
use crate::report::AuditReport;
use crate::surfaces::{curvatures_of, RevolutionSurface};
use grid::{ChartSeg, Grid};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Tolerance for exterior-angle signs.
pub const ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TilingError {
    #[error("surface is not of sphere type (both ends must close on the axis)")]
    NotSphere,
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("crossing point at ({u1}, {u2}) has multiplicity {pairs} > 2; extended exterior angles are undefined there")]
    Multiplicity { u1: f64, u2: f64, pairs: usize },
    #[error("region {region} has only {cells} cells; use a finer grid")]
    Resolution { region: usize, cells: usize },
    #[error("cannot classify chart point ({x}, {y}); use a finer grid")]
    Classification { x: f64, y: f64 },
    #[error("unresolved sector {sector} at crossing {crossing}")]
    UnresolvedSector { crossing: usize, sector: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TilingOptions {
    pub n1: usize,
    pub n2: usize,
    /// Sector probe distance in cells.
    pub probe_cells: f64,
    /// Search radius (cells) when classifying points on the curve.
    pub search_radius: i64,
}

impl Default for TilingOptions {
    fn default() -> Self {
        Self {
            n1: 2048,
            n2: 1024,
            probe_cells: 3.0,
            search_radius: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerAngle {
    /// Index into the crossing points of the tiling.
    pub crossing: usize,
    pub region: usize,
    pub interior: f64,
    /// pi minus the interior angle.
    pub exterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: usize,
    pub cells: usize,
    pub area: f64,
    pub kda: f64,
    pub willmore: f64,
    pub corners: Vec<CornerAngle>,
    /// Distinct crossings on the boundary.
    pub n_i: usize,
    pub boundary_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tiling {
    pub options: TilingOptions,
    pub regions: Vec<Region>,
    pub crossings: CrossingReport,
    /// Sector angles at every crossing point, in chart order.
    pub sectors: Vec<[f64; 4]>,
    pub polyline_length: f64,
    #[serde(skip)]
    pub labels: Vec<u32>,
}

impl Tiling {
    /// Uniform angle bound: min over crossings of min(theta, pi - theta).
    pub fn xi(&self) -> f64 {
        self.crossings.xi()
    }

    pub fn mask(&self, id: usize) -> Vec<bool> {
        self.labels.iter().map(|&l| l as usize == id).collect()
    }

    /// Label grid as portable graymap text.
    pub fn pgm(&self) -> String {
        let g = Grid::new(self.options.n1, self.options.n2, 0.0, 1.0);
        g.pgm(&self.labels, self.regions.len())
    }

    pub fn regions_csv(&self) -> String {
        let mut s =
            String::from("id,cells,area,kda,willmore,n_i,boundary_length,exterior_angles\n");
        for r in &self.regions {
            let ang: Vec<String> = r
                .corners
                .iter()
                .map(|c| format!("{:.12e}", c.exterior))
                .collect();
            s.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{},{:.12e},{}\n",
                r.id,
                r.cells,
                r.area,
                r.kda,
                r.willmore,
                r.n_i,
                r.boundary_length,
                ang.join(";")
            ));
        }
        s
    }
}

/// Per-row integrals of dA, K dA and H^2/4 dA (exact in u1 by symmetry,
/// Gauss-Legendre in u2 split at profile joins).
fn row_weights(s: &RevolutionSurface, g: &Grid) -> Vec<[f64; 3]> {
    let (x, w) = gauss_legendre_nodes(4);
    (0..g.n2)
        .map(|row| {
            let a = g.lo + row as f64 * g.d2;
            let b = a + g.d2;
            let mut acc = [0.0; 3];
            for seg in s.profile.segments() {
                let (lo, hi) = (seg.start.max(a), seg.end.min(b));
                if hi <= lo {
                    continue;
                }
                for (xi, wi) in x.iter().zip(&w) {
                    let u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi;
                    let j = seg.jet(u);
                    let c = curvatures_of(&j, false);
                    let da = 0.5 * (hi - lo) * wi * j.h * j.speed() * g.d1;
                    acc[0] += da;
                    acc[1] += c.gauss * da;
                    acc[2] += 0.25 * c.mean_abs * c.mean_abs * da;
                }
            }
            acc
        })
        .collect()
}

pub fn decompose_regions(
    s: &RevolutionSurface,
    tr: &GeodesicTrace,
    opts: TilingOptions,
) -> Result<Tiling, TilingError> {
    if !s.is_closed() {
        return Err(TilingError::NotSphere);
    }
    let rep = detect_self_intersections(tr)?;
    for p in &rep.points {
        if p.pairs.len() > 1 {
            return Err(TilingError::Multiplicity {
                u1: p.u1,
                u2: p.u2,
                pairs: p.pairs.len() + 1,
            });
        }
    }
    let (lo, hi) = s.domain();
    let mut g = Grid::new(opts.n1, opts.n2, lo, hi);
    let verts = crate::geodesic::period_vertices(tr, rep.period)?;
    for w in verts.windows(2) {
        let x0 = w[0].u1.rem_euclid(TAU);
        g.add_segment(ChartSeg {
            x0,
            y0: w[0].u2,
            x1: x0 + (w[1].u1 - w[0].u1),
            y1: w[1].u2,
        });
    }
    let (flood, count) = g.components();
    let mut cells = vec![0usize; count];
    for &l in &flood {
        if l != UNLABELED {
            cells[l as usize] += 1;
        }
    }
    if let Some((region, &c)) = cells.iter().enumerate().find(|(_, &c)| c < 10) {
        return Err(TilingError::Resolution { region, cells: c });
    }

    let mut labels = flood.clone();
    for i in 0..labels.len() {
        if g.marked[i] {
            let (c, r) = ((i % g.n1) as i64, (i / g.n1) as i64);
            let (x, y) = g.center(c, r);
            labels[i] = g
                .classify(&flood, x, y, opts.search_radius)
                .ok_or(TilingError::Classification { x, y })?;
        }
    }

    let weights = row_weights(s, &g);
    let mut regions: Vec<Region> = (0..count)
        .map(|id| Region {
            id,
            cells: 0,
            area: 0.0,
            kda: 0.0,
            willmore: 0.0,
            corners: Vec::new(),
            n_i: 0,
            boundary_length: 0.0,
        })
        .collect();
    for (i, &l) in labels.iter().enumerate() {
        let r = &mut regions[l as usize];
        let w = weights[i / g.n1];
        r.cells += 1;
        r.area += w[0];
        r.kda += w[1];
        r.willmore += w[2];
    }

    // Corner sectors.
    let t0 = tr.states[0].t;
    let mut sectors = Vec::new();
    for (k, p) in rep.points.iter().enumerate() {
        let c = rep.crossings[p.pairs[0]];
        let a = tr.state_at(t0 + c.t)?;
        let b = tr.state_at(t0 + c.s)?;
        let m = s.metric_at(c.u2).map_err(GeodesicError::from)?;
        let mut rays = [
            (a.du1, a.du2),
            (-a.du1, -a.du2),
            (b.du1, b.du2),
            (-b.du1, -b.du2),
        ];
        let cell_angle = |r: &(f64, f64)| (r.1 / g.d2).atan2(r.0 / g.d1);
        rays.sort_by(|p, q| cell_angle(p).total_cmp(&cell_angle(q)));
        let mut angles = [0.0; 4];
        for i in 0..4 {
            let (r1, r2) = (rays[i], rays[(i + 1) % 4]);
            let dot = m.e * r1.0 * r2.0 + m.g * r1.1 * r2.1;
            let n1 = (m.e * r1.0 * r1.0 + m.g * r1.1 * r1.1).sqrt();
            let n2 = (m.e * r2.0 * r2.0 + m.g * r2.1 * r2.1).sqrt();
            let beta = (dot / (n1 * n2)).clamp(-1.0, 1.0).acos();
            angles[i] = beta;
            let unit = |r: (f64, f64)| {
                let (x, y) = (r.0 / g.d1, r.1 / g.d2);
                let n = x.hypot(y);
                (x / n, y / n)
            };
            let (e1, e2) = (unit(r1), unit(r2));
            let (bx, by) = (e1.0 + e2.0, e1.1 + e2.1);
            let bn = bx.hypot(by);
            let (px, py) = (
                c.u1 + opts.probe_cells * g.d1 * bx / bn,
                c.u2 + opts.probe_cells * g.d2 * by / bn,
            );
            let region = g.classify(&flood, px, py, opts.search_radius).ok_or(
                TilingError::UnresolvedSector {
                    crossing: k,
                    sector: i,
                },
            )? as usize;
            regions[region].corners.push(CornerAngle {
                crossing: k,
                region,
                interior: beta,
                exterior: PI - beta,
            });
        }
        sectors.push(angles);
    }
    for r in &mut regions {
        let mut pts: Vec<usize> = r.corners.iter().map(|c| c.crossing).collect();
        pts.sort_unstable();
        pts.dedup();
        r.n_i = pts.len();
    }

    // Boundary lengths by probing both sides of short polyline pieces.
    let mut polyline_length = 0.0;
    for seg in g.segs.clone() {
        let (dx, dy) = ((seg.x1 - seg.x0) / g.d1, (seg.y1 - seg.y0) / g.d2);
        let cells_long = dx.hypot(dy);
        let pieces = cells_long.ceil().max(1.0) as usize;
        let (nx, ny) = (-dy / cells_long, dx / cells_long);
        for k in 0..pieces {
            let f0 = k as f64 / pieces as f64;
            let f1 = (k + 1) as f64 / pieces as f64;
            let fm = 0.5 * (f0 + f1);
            let (mx, my) = (
                seg.x0 + fm * (seg.x1 - seg.x0),
                seg.y0 + fm * (seg.y1 - seg.y0),
            );
            let j = s.jet(my).map_err(GeodesicError::from)?;
            let du1 = (f1 - f0) * (seg.x1 - seg.x0);
            let du2 = (f1 - f0) * (seg.y1 - seg.y0);
            let len = (j.h * j.h * du1 * du1 + j.speed().powi(2) * du2 * du2).sqrt();
            polyline_length += len;
            for side in [1.0, -1.0] {
                let (px, py) = (mx + side * 1.5 * nx * g.d1, my + side * 1.5 * ny * g.d2);
                if let Some(l) = g.classify(&flood, px, py, opts.search_radius) {
                    regions[l as usize].boundary_length += len;
                }
            }
        }
    }

    Ok(Tiling {
        options: opts,
        regions,
        crossings: rep,
        sectors,
        polyline_length,
        labels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussBonnet {
    pub kda: f64,
    /// Sum of exterior angles.
    pub angle_sum: f64,
    /// |KdA - (2pi - angle_sum)|
    pub residual: f64,
    pub below_two_pi: bool,
    /// 2pi - N_i xi, when an angle bound is supplied.
    pub remark_bound: Option<f64>,
    pub min_exterior: f64,
}

pub fn region_gauss_bonnet(r: &Region, xi: Option<f64>) -> GaussBonnet {
    let angle_sum: f64 = r.corners.iter().map(|c| c.exterior).sum();
    GaussBonnet {
        kda: r.kda,
        angle_sum,
        residual: (r.kda - (2.0 * PI - angle_sum)).abs(),
        below_two_pi: r.kda < 2.0 * PI,
        remark_bound: xi.map(|x| 2.0 * PI - r.n_i as f64 * x),
        min_exterior: r
            .corners
            .iter()
            .map(|c| c.exterior)
            .fold(f64::INFINITY, f64::min),
    }
}

/// W(S minus D_i) >= 2pi and, with angle bound xi, >= 2pi + N_i xi.
pub fn complement_energy_audit(
    regions: &[Region],
    total_w: f64,
    xi: Option<f64>,
    tol: f64,
) -> Vec<AuditReport> {
    let mut out = Vec::new();
    for r in regions {
        let comp = total_w - r.willmore;
        out.push(
            AuditReport::at_least(format!("complement-energy[{}]", r.id), comp, 2.0 * PI, tol)
                .with("total_w", total_w)
                .with("region_w", r.willmore),
        );
        if let Some(x) = xi {
            out.push(
                AuditReport::at_least(
                    format!("complement-energy-xi[{}]", r.id),
                    comp,
                    2.0 * PI + r.n_i as f64 * x,
                    tol,
                )
                .with("xi", x)
                .with("n_i", r.n_i as f64),
            );
        }
    }
    out
}
