use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use willmore_cli::config::{Command, GluedFamily, RunConfig, Suite};
use willmore_cli::{execute, EXIT_USAGE};
use willmore_geodesics::surfaces::HeightRule;

/// Closed geodesics, Willmore energies and curvature audits on surfaces of
/// revolution.
#[derive(Parser, Debug)]
#[command(name = "willmore", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML config file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized audits.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies ODE and quadrature tolerances.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    /// Leave the generation time out of SVG files.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Solve for a spheroid carrying a closed geodesic with N self-crossings.
    Spheroid {
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Energies of a glued surface of revolution.
    Glued {
        #[arg(long, value_enum)]
        family: Option<GluedFamily>,
        #[arg(long)]
        a: Option<f64>,
        /// Cylinder height rule such as 2a or 2a^2.
        #[arg(long)]
        cyl_height: Option<HeightRule>,
        /// Crossing count selecting the spheroid of the capped family.
        #[arg(long = "N")]
        n: Option<u32>,
    },
    /// Split the spheroid along its closed geodesic and check Gauss-Bonnet.
    Tiling {
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
    },
    /// Inequality audits on patches and surface families.
    Audits {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Curvature of the Toro graph and cutoff energy scaling.
    Toro {
        #[arg(long)]
        fd_points: Option<usize>,
    },
    /// Inversion cap identities.
    Invert {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        delta: Option<Vec<f64>>,
    },
    /// Curve shortening flow scenarios on the dumbbell.
    Csf {
        #[arg(long, value_delimiter = ',')]
        scenario: Option<Vec<String>>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Every command above, each into its own subdirectory.
    All,
}

fn resolve(cli: Cli) -> Result<(Command, RunConfig), String> {
    let mut cfg = match &cli.global.config {
        Some(p) => RunConfig::load(p).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    let g = cli.global;
    if let Some(v) = g.out {
        cfg.out = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = g.tol_scale {
        cfg.tol_scale = v;
    }
    if g.no_timestamp {
        cfg.timestamp = false;
    }
    fn set<T>(slot: &mut T, v: Option<T>) {
        if let Some(v) = v {
            *slot = v;
        }
    }
    let cmd = match cli.command {
        Sub::Spheroid { n, eps } => {
            set(&mut cfg.spheroid.n, n);
            set(&mut cfg.spheroid.eps, eps);
            Command::Spheroid
        }
        Sub::Glued {
            family,
            a,
            cyl_height,
            n,
        } => {
            set(&mut cfg.glued.family, family);
            set(&mut cfg.glued.a, a);
            set(&mut cfg.glued.cyl_height, cyl_height);
            set(&mut cfg.glued.n, n);
            Command::Glued
        }
        Sub::Tiling { n, eps, n1, n2 } => {
            set(&mut cfg.tiling.n, n);
            set(&mut cfg.tiling.eps, eps);
            set(&mut cfg.tiling.n1, n1);
            set(&mut cfg.tiling.n2, n2);
            Command::Tiling
        }
        Sub::Audits { suite, count } => {
            set(&mut cfg.audits.suite, suite);
            set(&mut cfg.audits.count, count);
            Command::Audits
        }
        Sub::Toro { fd_points } => {
            set(&mut cfg.toro.fd_points, fd_points);
            Command::Toro
        }
        Sub::Invert { lambda, delta } => {
            set(&mut cfg.invert.lambda, lambda);
            set(&mut cfg.invert.deltas, delta);
            Command::Invert
        }
        Sub::Csf { scenario, t_end } => {
            set(&mut cfg.csf.scenarios, scenario);
            if t_end.is_some() {
                cfg.csf.t_end = t_end;
            }
            Command::Csf
        }
        Sub::All => Command::All,
    };
    if let Some(c) = cfg.command {
        if c != cmd {
            return Err(format!(
                "config file is for `{c}` but `{cmd}` was requested"
            ));
        }
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok((cmd, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match resolve(cli) {
        Ok((cmd, cfg)) => ExitCode::from(execute(cmd, &cfg) as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!("run `willmore --help` for usage");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
