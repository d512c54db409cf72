use super::SurfaceError;
use serde::{Deserialize, Serialize};

/// Canonical profile shapes, evaluated at a local parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Piece {
    /// (cos s, sin s)
    Circle,
    /// (cos s, b sin s)
    Ellipse { b: f64 },
    /// (r, s)
    Line { r: f64 },
    /// (cosh s, s)
    Catenary,
    /// (s, s^2 / 2)
    Parabola,
    /// (1 + k s^2, s)
    Neck { k: f64 },
}

/// Values and first two derivatives of (h, g).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub h: f64,
    pub dh: f64,
    pub ddh: f64,
    pub g: f64,
    pub dg: f64,
    pub ddg: f64,
}

impl Jet {
    pub fn speed(&self) -> f64 {
        self.dh.hypot(self.dg)
    }

    /// d(speed)/du2.
    pub fn dspeed(&self) -> f64 {
        (self.dh * self.ddh + self.dg * self.ddg) / self.speed()
    }

    /// Meridian curvature (h'g'' - h''g') / speed^3.
    pub fn kappa_meridian(&self) -> f64 {
        (self.dh * self.ddg - self.ddh * self.dg) / self.speed().powi(3)
    }

    /// Parallel curvature g' / (h speed); at a pole where the profile meets
    /// the axis orthogonally this returns the meridian curvature.
    pub fn kappa_parallel(&self) -> f64 {
        if self.h == 0.0 {
            self.kappa_meridian()
        } else {
            self.dg / (self.h * self.speed())
        }
    }
}

impl Piece {
    pub fn jet(&self, s: f64) -> Jet {
        match *self {
            Piece::Circle => {
                let (sn, cs) = s.sin_cos();
                Jet {
                    h: cs,
                    dh: -sn,
                    ddh: -cs,
                    g: sn,
                    dg: cs,
                    ddg: -sn,
                }
            }
            Piece::Ellipse { b } => {
                let (sn, cs) = s.sin_cos();
                Jet {
                    h: cs,
                    dh: -sn,
                    ddh: -cs,
                    g: b * sn,
                    dg: b * cs,
                    ddg: -b * sn,
                }
            }
            Piece::Line { r } => Jet {
                h: r,
                dh: 0.0,
                ddh: 0.0,
                g: s,
                dg: 1.0,
                ddg: 0.0,
            },
            Piece::Catenary => Jet {
                h: s.cosh(),
                dh: s.sinh(),
                ddh: s.cosh(),
                g: s,
                dg: 1.0,
                ddg: 0.0,
            },
            Piece::Parabola => Jet {
                h: s,
                dh: 1.0,
                ddh: 0.0,
                g: 0.5 * s * s,
                dg: s,
                ddg: 1.0,
            },
            Piece::Neck { k } => Jet {
                h: 1.0 + k * s * s,
                dh: 2.0 * k * s,
                ddh: 2.0 * k,
                g: s,
                dg: 1.0,
                ddg: 0.0,
            },
        }
    }
}

/// One piece placed in the profile: `(h, g) = scale * piece(s) + (0, z_shift)`
/// with local parameter `s = u2 + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub piece: Piece,
    pub scale: f64,
    pub z_shift: f64,
    /// Global parameter interval [start, end].
    pub start: f64,
    pub end: f64,
    pub offset: f64,
}

impl Segment {
    pub fn local(&self, u2: f64) -> f64 {
        u2 + self.offset
    }

    pub fn jet(&self, u2: f64) -> Jet {
        let j = self.piece.jet(self.local(u2));
        let k = self.scale;
        Jet {
            h: k * j.h,
            dh: k * j.dh,
            ddh: k * j.ddh,
            g: k * j.g + self.z_shift,
            dg: k * j.dg,
            ddg: k * j.ddg,
        }
    }
}

/// A piecewise closed-form generating curve, ordered by increasing height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    segments: Vec<Segment>,
}

/// Description of one piece before placement.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceSpec {
    pub name: &'static str,
    pub piece: Piece,
    pub scale: f64,
    pub z_shift: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl ProfileCurve {
    /// Places pieces contiguously. The global parameter of piece `anchor`
    /// coincides with its local parameter.
    pub fn new(pieces: &[PieceSpec], anchor: usize) -> Result<Self, SurfaceError> {
        if pieces.is_empty() || anchor >= pieces.len() {
            return Err(SurfaceError::Profile("empty profile or bad anchor".into()));
        }
        for p in pieces {
            if !(p.s_hi > p.s_lo) || !(p.scale > 0.0) {
                return Err(SurfaceError::Profile(format!(
                    "degenerate piece {}",
                    p.name
                )));
            }
        }
        let n = pieces.len();
        let mut bounds = vec![(0.0, 0.0); n];
        bounds[anchor] = (pieces[anchor].s_lo, pieces[anchor].s_hi);
        for i in anchor + 1..n {
            let st = bounds[i - 1].1;
            bounds[i] = (st, st + (pieces[i].s_hi - pieces[i].s_lo));
        }
        for i in (0..anchor).rev() {
            let en = bounds[i + 1].0;
            bounds[i] = (en - (pieces[i].s_hi - pieces[i].s_lo), en);
        }
        let segments = pieces
            .iter()
            .zip(&bounds)
            .enumerate()
            .map(|(i, (p, &(start, end)))| Segment {
                name: p.name.to_string(),
                piece: p.piece,
                scale: p.scale,
                z_shift: p.z_shift,
                start,
                end,
                offset: if i == anchor { 0.0 } else { p.s_lo - start },
            })
            .collect::<Vec<_>>();
        let prof = Self { segments };
        Ok(prof)
    }

    pub fn single(
        name: &'static str,
        piece: Piece,
        scale: f64,
        s_lo: f64,
        s_hi: f64,
    ) -> Result<Self, SurfaceError> {
        Self::new(
            &[PieceSpec {
                name,
                piece,
                scale,
                z_shift: 0.0,
                s_lo,
                s_hi,
            }],
            0,
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.segments[0].start, self.segments.last().unwrap().end)
    }

    /// Index of the segment containing `u2`; at a join the upper segment.
    pub fn locate(&self, u2: f64) -> Result<(usize, bool), SurfaceError> {
        let (lo, hi) = self.domain();
        if !(u2 >= lo && u2 <= hi) {
            return Err(SurfaceError::Domain { u2, lo, hi });
        }
        let idx = self
            .segments
            .partition_point(|s| s.start <= u2)
            .saturating_sub(1);
        let at_join = idx > 0 && self.segments[idx].start == u2;
        let idx = idx.min(self.segments.len() - 1);
        Ok((idx, at_join))
    }

    pub fn jet(&self, u2: f64) -> Result<(Jet, bool), SurfaceError> {
        let (i, j) = self.locate(u2)?;
        Ok((self.segments[i].jet(u2), j))
    }

    /// Position and tangent-direction mismatch at each interior join.
    pub fn join_residuals(&self) -> Vec<(f64, f64)> {
        self.segments
            .windows(2)
            .map(|w| {
                let u = w[0].end;
                let (l, r) = (w[0].jet(u), w[1].jet(u));
                let pos = (l.h - r.h).hypot(l.g - r.g);
                let (sl, sr) = (l.speed(), r.speed());
                let cross = (l.dh * r.dg - l.dg * r.dh) / (sl * sr);
                let dot = (l.dh * r.dh + l.dg * r.dg) / (sl * sr);
                let dir = if dot > 0.0 { cross.abs() } else { 2.0 };
                (pos, dir)
            })
            .collect()
    }

    /// Rejects profiles with broken joins or non-positive interior radius.
    pub fn validate(&self, tol: f64) -> Result<(), SurfaceError> {
        for (i, (p, d)) in self.join_residuals().into_iter().enumerate() {
            if p > tol || d > tol {
                return Err(SurfaceError::Join {
                    index: i,
                    position: p,
                    direction: d,
                });
            }
        }
        for seg in &self.segments {
            for k in 1..64 {
                let u = seg.start + (seg.end - seg.start) * k as f64 / 64.0;
                let j = seg.jet(u);
                if !(j.h > 0.0) || !(j.speed() > 0.0) {
                    return Err(SurfaceError::Profile(format!(
                        "{}: h = {} at u2 = {u}",
                        seg.name, j.h
                    )));
                }
            }
        }
        Ok(())
    }

    /// Profile scaled about the origin by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                scale: s.scale * lambda,
                z_shift: s.z_shift * lambda,
                ..s.clone()
            })
            .collect();
        Self { segments }
    }
}
