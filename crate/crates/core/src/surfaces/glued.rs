use super::{Piece, PieceSpec, ProfileCurve, RevolutionSurface, SurfaceError};
use crate::numerics::solve_2d;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

const JOIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NeckKind {
    Cylinder,
    /// Band `|t| <= a` of the spheroid `(cos t, b sin t)`.
    SpheroidBand {
        b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapKind {
    CappedUnitSphereWithCatenoid,
    SphericalCap,
    Hemisphere,
}

/// Cylinder height `factor * a^power`. Parses forms such as `2a`, `2a^2`,
/// `a`, `0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HeightRule {
    pub factor: f64,
    pub power: f64,
}

impl HeightRule {
    pub const LITERAL: HeightRule = HeightRule {
        factor: 2.0,
        power: 1.0,
    };
    pub const QUADRATIC: HeightRule = HeightRule {
        factor: 2.0,
        power: 2.0,
    };

    pub fn height(&self, a: f64) -> f64 {
        self.factor * a.powf(self.power)
    }
}

impl FromStr for HeightRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || format!("cannot parse height rule {s:?} (expected e.g. 2a, 2a^2, 0.5)");
        match t.find('a') {
            None => t
                .parse::<f64>()
                .map(|f| HeightRule {
                    factor: f,
                    power: 0.0,
                })
                .map_err(|_| bad()),
            Some(i) => {
                let head = t[..i].trim_end_matches('*');
                let factor = if head.is_empty() {
                    1.0
                } else {
                    head.parse().map_err(|_| bad())?
                };
                let tail = &t[i + 1..];
                let power = if tail.is_empty() {
                    1.0
                } else {
                    tail.strip_prefix('^')
                        .ok_or_else(bad)?
                        .parse()
                        .map_err(|_| bad())?
                };
                if !(factor > 0.0) {
                    return Err(bad());
                }
                Ok(HeightRule { factor, power })
            }
        }
    }
}

impl TryFrom<String> for HeightRule {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<HeightRule> for String {
    fn from(r: HeightRule) -> String {
        r.to_string()
    }
}

impl fmt::Display for HeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            p if p == 0.0 => write!(f, "{}", self.factor),
            p if p == 1.0 => write!(f, "{}a", self.factor),
            p => write!(f, "{}a^{}", self.factor, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluedFamilyConfig {
    pub a: f64,
    pub neck: NeckKind,
    pub cylinder_height: HeightRule,
    pub bottom: CapKind,
    pub top: CapKind,
}

impl GluedFamilyConfig {
    /// Unit sphere, catenoid, cylinder and small hemisphere.
    pub fn sphere_catenoid(a: f64, rule: HeightRule) -> Self {
        Self {
            a,
            neck: NeckKind::Cylinder,
            cylinder_height: rule,
            bottom: CapKind::CappedUnitSphereWithCatenoid,
            top: CapKind::Hemisphere,
        }
    }

    /// Spheroid band of half-width `a` closed by two tangent spherical caps.
    pub fn capped_spheroid(a: f64, b: f64) -> Self {
        Self {
            a,
            neck: NeckKind::SpheroidBand { b },
            cylinder_height: HeightRule::LITERAL,
            bottom: CapKind::SphericalCap,
            top: CapKind::SphericalCap,
        }
    }
}

/// Solved tangency parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Joins {
    /// Sphere cut at height `1 - s_a` (latitude `phi`), catenoid waist
    /// reached after height `t_a = a tau`.
    SphereCatenoid {
        s_a: f64,
        t_a: f64,
        phi: f64,
        tau: f64,
        residual: f64,
    },
    /// Caps of radius `radius` centred at `+-z_center`, meeting the band at
    /// cap latitude `psi`.
    SpheroidCaps {
        psi: f64,
        radius: f64,
        z_center: f64,
        residual: f64,
    },
    /// Hemispheres on a cylinder meet it tangentially by construction.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedSurface {
    pub config: GluedFamilyConfig,
    pub surface: RevolutionSurface,
    pub joins: Joins,
    /// Parameter interval of the unchanged neck band.
    pub neck: (f64, f64),
    pub pieces: Vec<PieceRange>,
    pub join_residuals: Vec<(f64, f64)>,
}

pub fn build_glued_family(cfg: &GluedFamilyConfig) -> Result<GluedSurface, SurfaceError> {
    let a = cfg.a;
    if !(a > 0.0 && a < 1.0) {
        return Err(SurfaceError::Unsupported(format!(
            "neck scale a = {a} must lie in (0, 1)"
        )));
    }
    let (pieces, anchor, joins) = match cfg.neck {
        NeckKind::Cylinder => cylinder_pieces(cfg)?,
        NeckKind::SpheroidBand { b } => spheroid_pieces(cfg, b)?,
    };
    let profile = ProfileCurve::new(&pieces, anchor)?;
    let join_residuals = profile.join_residuals();
    for (i, &(p, d)) in join_residuals.iter().enumerate() {
        if p > JOIN_TOL || d > JOIN_TOL {
            return Err(SurfaceError::Join {
                index: i,
                position: p,
                direction: d,
            });
        }
    }
    profile.validate(JOIN_TOL)?;
    let surface = RevolutionSurface::new(profile);
    if !surface.is_closed() {
        return Err(SurfaceError::Profile(
            "glued surface does not close at both poles".into(),
        ));
    }
    let ranges: Vec<PieceRange> = surface
        .profile
        .segments()
        .iter()
        .map(|s| PieceRange {
            name: s.name.clone(),
            lo: s.start,
            hi: s.end,
        })
        .collect();
    let neck = (ranges[anchor].lo, ranges[anchor].hi);
    Ok(GluedSurface {
        config: *cfg,
        surface,
        joins,
        neck,
        pieces: ranges,
        join_residuals,
    })
}

type Assembly = (Vec<PieceSpec>, usize, Joins);

fn cylinder_pieces(cfg: &GluedFamilyConfig) -> Result<Assembly, SurfaceError> {
    let a = cfg.a;
    let height = cfg.cylinder_height.height(a);
    if !(height > 0.0) {
        return Err(SurfaceError::Unsupported(
            "cylinder height must be positive".into(),
        ));
    }
    if cfg.top == CapKind::CappedUnitSphereWithCatenoid {
        return Err(SurfaceError::Unsupported(
            "catenoid transition is only available at the bottom".into(),
        ));
    }
    match cfg.bottom {
        CapKind::CappedUnitSphereWithCatenoid => {
            // Unknowns (phi, tau): radius match and parallel tangents.
            let f = |x: [f64; 2]| {
                let (phi, tau) = (x[0], x[1]);
                [
                    phi.cos() - a * tau.cosh(),
                    phi.cos() * tau.sinh() - phi.sin(),
                ]
            };
            let x0 = [FRAC_PI_2 - a.sqrt(), (2.0 / a.sqrt()).ln()];
            let sol = solve_2d(f, x0, 1e-14).map_err(|_| SurfaceError::Tangency {
                what: "sphere/catenoid".into(),
                residual: f(x0)[0].hypot(f(x0)[1]),
            })?;
            let [phi, tau] = sol.x;
            if !(phi > 0.0 && phi < FRAC_PI_2 && tau > 0.0) {
                return Err(SurfaceError::Tangency {
                    what: "sphere/catenoid (spurious root)".into(),
                    residual: sol.residual,
                });
            }
            let z0 = phi.sin() + a * tau;
            let pieces = vec![
                PieceSpec {
                    name: "sphere",
                    piece: Piece::Circle,
                    scale: 1.0,
                    z_shift: 0.0,
                    s_lo: -FRAC_PI_2,
                    s_hi: phi,
                },
                PieceSpec {
                    name: "catenoid",
                    piece: Piece::Catenary,
                    scale: a,
                    z_shift: z0,
                    s_lo: -tau,
                    s_hi: 0.0,
                },
                PieceSpec {
                    name: "cylinder",
                    piece: Piece::Line { r: a },
                    scale: 1.0,
                    z_shift: z0,
                    s_lo: 0.0,
                    s_hi: height,
                },
                PieceSpec {
                    name: "hemisphere",
                    piece: Piece::Circle,
                    scale: a,
                    z_shift: z0 + height,
                    s_lo: 0.0,
                    s_hi: FRAC_PI_2,
                },
            ];
            let joins = Joins::SphereCatenoid {
                s_a: 1.0 - phi.sin(),
                t_a: a * tau,
                phi,
                tau,
                residual: sol.residual,
            };
            Ok((pieces, 2, joins))
        }
        CapKind::SphericalCap | CapKind::Hemisphere => {
            let pieces = vec![
                PieceSpec {
                    name: "bottom-hemisphere",
                    piece: Piece::Circle,
                    scale: a,
                    z_shift: 0.0,
                    s_lo: -FRAC_PI_2,
                    s_hi: 0.0,
                },
                PieceSpec {
                    name: "cylinder",
                    piece: Piece::Line { r: a },
                    scale: 1.0,
                    z_shift: 0.0,
                    s_lo: 0.0,
                    s_hi: height,
                },
                PieceSpec {
                    name: "hemisphere",
                    piece: Piece::Circle,
                    scale: a,
                    z_shift: height,
                    s_lo: 0.0,
                    s_hi: FRAC_PI_2,
                },
            ];
            Ok((pieces, 1, Joins::Trivial))
        }
    }
}

fn spheroid_pieces(cfg: &GluedFamilyConfig, b: f64) -> Result<Assembly, SurfaceError> {
    let eps = cfg.a;
    if !(b >= 1.0) || eps >= FRAC_PI_2 {
        return Err(SurfaceError::Unsupported(format!(
            "spheroid band needs b >= 1 and a < pi/2 (b = {b})"
        )));
    }
    if cfg.bottom == CapKind::CappedUnitSphereWithCatenoid
        || cfg.top == CapKind::CappedUnitSphereWithCatenoid
    {
        return Err(SurfaceError::Unsupported(
            "spheroid band is closed by spherical caps only".into(),
        ));
    }
    let (se, ce) = eps.sin_cos();
    // Unknowns (psi, R): radius match and parallel tangents at the band edge.
    let f = |x: [f64; 2]| {
        let (psi, r) = (x[0], x[1]);
        [r * psi.cos() - ce, b * ce * psi.sin() - se * psi.cos()]
    };
    let x0 = [eps / b, ce];
    let sol = solve_2d(f, x0, 1e-15).map_err(|_| SurfaceError::Tangency {
        what: "spheroid/cap".into(),
        residual: f(x0)[0].hypot(f(x0)[1]),
    })?;
    let [psi, r] = sol.x;
    let zc = b * se - r * psi.sin();
    let pieces = vec![
        PieceSpec {
            name: "bottom-cap",
            piece: Piece::Circle,
            scale: r,
            z_shift: -zc,
            s_lo: -FRAC_PI_2,
            s_hi: -psi,
        },
        PieceSpec {
            name: "spheroid-band",
            piece: Piece::Ellipse { b },
            scale: 1.0,
            z_shift: 0.0,
            s_lo: -eps,
            s_hi: eps,
        },
        PieceSpec {
            name: "top-cap",
            piece: Piece::Circle,
            scale: r,
            z_shift: zc,
            s_lo: psi,
            s_hi: FRAC_PI_2,
        },
    ];
    Ok((
        pieces,
        1,
        Joins::SpheroidCaps {
            psi,
            radius: r,
            z_center: zc,
            residual: sol.residual,
        },
    ))
}
