//! Run configuration: defaults, then the TOML file, then command-line flags.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;
use willmore_geodesics::csf::{shipped_scenarios, StepPolicy};
use willmore_geodesics::surfaces::HeightRule;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid value: {0}")]
    Value(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spheroid,
    Glued,
    Tiling,
    Audits,
    Toro,
    Invert,
    Csf,
    All,
}

impl Command {
    pub const SINGLE: [Command; 7] = [
        Command::Spheroid,
        Command::Glued,
        Command::Tiling,
        Command::Audits,
        Command::Toro,
        Command::Invert,
        Command::Csf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spheroid => "spheroid",
            Command::Glued => "glued",
            Command::Tiling => "tiling",
            Command::Audits => "audits",
            Command::Toro => "toro",
            Command::Invert => "invert",
            Command::Csf => "csf",
            Command::All => "all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GluedFamily {
    /// Unit sphere, catenoid, cylinder, hemisphere.
    SphereCatenoid,
    /// Spheroid band of half-width a between two tangent caps.
    CappedSpheroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Diameter, interior-point and monotonicity audits on random caps.
    #[serde(alias = "section2")]
    #[value(alias = "section2")]
    Patches,
    /// Length over energy gap along the vanishing-cylinder family.
    Ratio,
    /// Injectivity-radius terms along the same family.
    Injectivity,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpheroidParams {
    pub n: u32,
    pub eps: f64,
}

impl Default for SpheroidParams {
    fn default() -> Self {
        Self { n: 3, eps: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GluedParams {
    pub family: GluedFamily,
    pub a: f64,
    pub cyl_height: HeightRule,
    /// Crossing count used to pick the spheroid for the capped family.
    pub n: u32,
}

impl Default for GluedParams {
    fn default() -> Self {
        Self {
            family: GluedFamily::SphereCatenoid,
            a: 0.1,
            cyl_height: HeightRule::LITERAL,
            n: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TilingParams {
    pub n: u32,
    pub eps: f64,
    pub n1: usize,
    pub n2: usize,
}

impl Default for TilingParams {
    fn default() -> Self {
        Self {
            n: 3,
            eps: 0.2,
            n1: 2048,
            n2: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditParams {
    pub suite: Suite,
    pub count: usize,
    pub a_values: Vec<f64>,
}

impl Default for AuditParams {
    fn default() -> Self {
        Self {
            suite: Suite::Patches,
            count: 50,
            a_values: vec![0.2, 0.1, 0.05, 0.02],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToroParams {
    pub ladder: Vec<f64>,
    pub annulus: [f64; 2],
    pub fd_points: usize,
    pub deltas: Vec<f64>,
}

impl Default for ToroParams {
    fn default() -> Self {
        Self {
            ladder: vec![1e-2, 1e-3, 1e-4],
            annulus: [1e-4, 0.05],
            fd_points: 1000,
            deltas: vec![0.2, 0.1, 0.05, 0.025],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InvertParams {
    pub lambda: f64,
    pub deltas: Vec<f64>,
    /// Extra seeded (lambda, delta) pairs.
    pub random: usize,
    pub ring_samples: usize,
}

impl Default for InvertParams {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            deltas: vec![0.05, 0.1, 0.2],
            random: 20,
            ring_samples: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CsfParams {
    /// Names from the shipped scenario list; empty means all.
    pub scenarios: Vec<String>,
    /// Overrides each scenario's end time.
    pub t_end: Option<f64>,
    pub policy: StepPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub out: PathBuf,
    pub seed: u64,
    /// Multiplies the ODE and quadrature tolerances.
    pub tol_scale: f64,
    /// Write a generation time comment into SVG files.
    pub timestamp: bool,
    pub spheroid: SpheroidParams,
    pub glued: GluedParams,
    pub tiling: TilingParams,
    pub audits: AuditParams,
    pub toro: ToroParams,
    pub invert: InvertParams,
    pub csf: CsfParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            out: PathBuf::from("out"),
            seed: 0,
            tol_scale: 1.0,
            timestamp: true,
            spheroid: SpheroidParams::default(),
            glued: GluedParams::default(),
            tiling: TilingParams::default(),
            audits: AuditParams::default(),
            toro: ToroParams::default(),
            invert: InvertParams::default(),
            csf: CsfParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Value(m));
        if !(self.tol_scale > 0.0 && self.tol_scale <= 1e3) {
            return bad(format!(
                "tol_scale = {} must lie in (0, 1000]",
                self.tol_scale
            ));
        }
        for (what, n, eps) in [
            ("spheroid", self.spheroid.n, self.spheroid.eps),
            ("tiling", self.tiling.n, self.tiling.eps),
        ] {
            if n == 0 || !(eps > 0.0 && eps < 1.0) {
                return bad(format!("{what}: need N >= 1 and 0 < eps < 1"));
            }
        }
        if !(self.glued.a > 0.0 && self.glued.a < 1.0) {
            return bad(format!("glued.a = {} must lie in (0, 1)", self.glued.a));
        }
        if self.tiling.n1 < 64 || self.tiling.n2 < 32 {
            return bad("tiling grid must be at least 64 x 32".into());
        }
        if self.audits.a_values.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return bad("audits.a_values must lie in (0, 1)".into());
        }
        let [r0, r1] = self.toro.annulus;
        if !(r0 > 0.0 && r1 > r0 && r1 < 0.5) {
            return bad("toro.annulus must satisfy 0 < r0 < r1 < 1/2".into());
        }
        if self.toro.ladder.iter().any(|&x| !(x > 0.0 && x < 0.5)) {
            return bad("toro.ladder entries must lie in (0, 1/2)".into());
        }
        if self.toro.deltas.len() < 2 || self.toro.deltas.iter().any(|&d| !(d > 0.0 && d < 0.5)) {
            return bad("toro.deltas needs at least two values in (0, 1/2)".into());
        }
        if !(self.invert.lambda > 0.0) || self.invert.deltas.iter().any(|&d| !(d > 0.0)) {
            return bad("invert.lambda and invert.deltas must be positive".into());
        }
        if self.invert.ring_samples < 8 {
            return bad("invert.ring_samples must be at least 8".into());
        }
        let known: Vec<&str> = shipped_scenarios()
            .map_err(|e| ConfigError::Value(e.to_string()))?
            .iter()
            .map(|s| s.name)
            .collect();
        if let Some(n) = self
            .csf
            .scenarios
            .iter()
            .find(|n| !known.contains(&n.as_str()))
        {
            return bad(format!(
                "unknown csf scenario {n:?} (known: {})",
                known.join(", ")
            ));
        }
        if let Some(t) = self.csf.t_end {
            if !(t > 0.0) {
                return bad("csf.t_end must be positive".into());
            }
        }
        Ok(())
    }
}
