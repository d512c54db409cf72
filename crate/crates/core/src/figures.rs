//! Deterministic SVG figures: orthographic views of surfaces with curves.

use crate::csf::FlowRun;
use crate::geodesic::{period_vertices, GeodesicError, GeodesicTrace};
use crate::surfaces::{RevolutionSurface, SurfaceError};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureStyle {
    pub width: f64,
    pub height: f64,
    /// View angles in radians.
    pub azimuth: f64,
    pub elevation: f64,
    pub meridians: usize,
    pub parallels: usize,
    /// Written as a comment when present.
    pub timestamp: Option<String>,
}

impl Default for FigureStyle {
    fn default() -> Self {
        Self {
            width: 480.0,
            height: 640.0,
            azimuth: 0.6,
            elevation: 0.35,
            meridians: 24,
            parallels: 24,
            timestamp: None,
        }
    }
}

impl FigureStyle {
    pub fn project(&self, p: [f64; 3]) -> [f64; 2] {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        [
            -sa * p[0] + ca * p[1],
            -se * ca * p[0] - se * sa * p[1] + ce * p[2],
        ]
    }
}

struct Canvas {
    lo: [f64; 2],
    scale: f64,
    style: FigureStyle,
    body: String,
}

impl Canvas {
    fn new(style: &FigureStyle, extent: &[[f64; 2]]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in extent {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let margin = 20.0;
        let sx = (style.width - 2.0 * margin) / (hi[0] - lo[0]).max(1e-12);
        let sy = (style.height - 2.0 * margin) / (hi[1] - lo[1]).max(1e-12);
        let scale = sx.min(sy);
        let lo = [lo[0] - margin / scale, lo[1] - margin / scale];
        let mut c = Self {
            lo,
            scale,
            style: style.clone(),
            body: String::new(),
        };
        c.body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = style.width,
            h = style.height
        ));
        if let Some(ts) = &style.timestamp {
            c.body.push_str(&format!("<!-- generated {ts} -->\n"));
        }
        c.body
            .push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        c
    }

    fn xy(&self, p: [f64; 2]) -> (f64, f64) {
        (
            (p[0] - self.lo[0]) * self.scale,
            self.style.height - (p[1] - self.lo[1]) * self.scale,
        )
    }

    fn polyline(&mut self, pts: &[[f64; 2]], closed: bool, class: &str, stroke: &str, width: f64) {
        let mut d = String::new();
        for p in pts {
            let (x, y) = self.xy(*p);
            let _ = write!(d, "{x:.3},{y:.3} ");
        }
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            self.body,
            "<{tag} class=\"{class}\" points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            d.trim_end()
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn wireframe(
    s: &RevolutionSurface,
    style: &FigureStyle,
) -> Result<Vec<Vec<[f64; 2]>>, SurfaceError> {
    let (lo, hi) = s.domain();
    let mut lines = Vec::new();
    let m = 96;
    for k in 0..style.meridians {
        let u1 = TAU * k as f64 / style.meridians as f64;
        let line = (0..=m)
            .map(|i| {
                s.position(u1, (lo + (hi - lo) * i as f64 / m as f64).min(hi))
                    .map(|p| style.project(p))
            })
            .collect::<Result<Vec<_>, _>>()?;
        lines.push(line);
    }
    for k in 1..style.parallels {
        let u2 = lo + (hi - lo) * k as f64 / style.parallels as f64;
        let line = (0..=m)
            .map(|i| {
                s.position(TAU * i as f64 / m as f64, u2)
                    .map(|p| style.project(p))
            })
            .collect::<Result<Vec<_>, _>>()?;
        lines.push(line);
    }
    Ok(lines)
}

fn surface_canvas(s: &RevolutionSurface, style: &FigureStyle) -> Result<Canvas, SurfaceError> {
    let wf = wireframe(s, style)?;
    let all: Vec<[f64; 2]> = wf.iter().flatten().copied().collect();
    let mut c = Canvas::new(style, &all);
    for line in &wf {
        c.polyline(line, false, "wire", "#bbbbbb", 0.6);
    }
    Ok(c)
}

/// Projected vertices of one period of a closed trace.
pub fn projected_geodesic(
    s: &RevolutionSurface,
    tr: &GeodesicTrace,
    style: &FigureStyle,
) -> Result<Vec<[f64; 2]>, GeodesicError> {
    let period = tr.closure.as_ref().ok_or(GeodesicError::NotClosed)?.period;
    let verts = period_vertices(tr, period)?;
    let mut pts: Vec<[f64; 2]> = verts
        .iter()
        .map(|v| s.position(v.u1, v.u2).map(|p| style.project(p)))
        .collect::<Result<_, _>>()?;
    pts.pop();
    Ok(pts)
}

/// Closed geodesic over a wireframe of the surface.
pub fn geodesic_svg(
    s: &RevolutionSurface,
    tr: &GeodesicTrace,
    style: &FigureStyle,
) -> Result<String, GeodesicError> {
    let pts = projected_geodesic(s, tr, style)?;
    let mut c = surface_canvas(s, style)?;
    c.polyline(&pts, true, "geodesic", "#c0392b", 1.8);
    Ok(c.finish())
}

/// One SVG per snapshot of a flow.
pub fn flow_svgs(
    s: &RevolutionSurface,
    run: &FlowRun,
    style: &FigureStyle,
) -> Result<Vec<String>, SurfaceError> {
    run.snapshots
        .iter()
        .map(|snap| {
            let mut c = surface_canvas(s, style)?;
            let pts: Vec<[f64; 2]> = snap.positions(s)?.into_iter().map(|p| style.project(p)).collect();
            c.polyline(&pts, true, "flow", "#2c3e80", 1.8);
            let (x, y) = (10.0, 20.0);
            let _ = writeln!(c.body, "<text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"12\">t = {:.4}</text>", snap.time);
            Ok(c.finish())
        })
        .collect()
}

/// Number of proper crossings between non-adjacent edges of a closed
/// planar polygon.
pub fn planar_self_crossings(pts: &[[f64; 2]]) -> usize {
    let n = pts.len();
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let mut count = 0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            let (o1, o2) = (orient(a, b, c), orient(a, b, d));
            let (o3, o4) = (orient(c, d, a), orient(c, d, b));
            if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                count += 1;
            }
        }
    }
    count
}
