//! Runner behind the `willmore` binary: configuration, command dispatch and
//! artifact writing.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;

use config::{Command, RunConfig};
use run::{run_command, Failure, Outcome, SCHEMA_VERSION};
use serde_json::{json, Value};
use std::io;
use std::path::Path;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum Status {
    Passed,
    ChecksFailed,
    Numeric(Failure),
}

impl Status {
    fn label(&self) -> &'static str {
        match self {
            Status::Passed => "pass",
            Status::ChecksFailed => "checks-failed",
            Status::Numeric(_) => "numeric-failure",
        }
    }
}

fn write_json(path: &Path, v: &Value) -> io::Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(io::Error::other)?;
    s.push('\n');
    std::fs::write(path, s)
}

fn write_run(
    dir: &Path,
    cmd: Command,
    cfg: &RunConfig,
    res: &Result<Outcome, Failure>,
) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut echoed = cfg.clone();
    echoed.command = Some(cmd);
    let (files, tolerances) = match res {
        Ok(o) => {
            for (name, body) in &o.files {
                let path = dir.join(name);
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent)?;
                }
                std::fs::write(path, body)?;
            }
            write_json(
                &dir.join("summary.json"),
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": cmd.name(),
                    "pass": o.pass,
                    "result": o.result,
                }),
            )?;
            let mut names: Vec<&str> = o.files.iter().map(|f| f.0.as_str()).collect();
            names.push("summary.json");
            (names, json!(o.tolerances))
        }
        Err(f) => {
            write_json(
                &dir.join("error.json"),
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": cmd.name(),
                    "pass": false,
                    "error": f,
                }),
            )?;
            (vec!["error.json"], json!({}))
        }
    };
    write_json(
        &dir.join("manifest.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "tool": env!("CARGO_PKG_NAME"),
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": cmd.name(),
            "config": echoed,
            "tolerances": tolerances,
            "files": files,
        }),
    )
}

fn status_of(res: &Result<Outcome, Failure>) -> Status {
    match res {
        Ok(o) if o.pass => Status::Passed,
        Ok(_) => Status::ChecksFailed,
        Err(f) => Status::Numeric(f.clone()),
    }
}

/// Runs `cmd` (all single commands for `all`, concurrently) and writes the
/// artifacts under `cfg.out`. Returns the process exit code.
pub fn execute(cmd: Command, cfg: &RunConfig) -> i32 {
    let stamp = cfg.timestamp.then(|| {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("generated at unix time {secs}")
    });
    let cmds: Vec<Command> = if cmd == Command::All {
        Command::SINGLE.to_vec()
    } else {
        vec![cmd]
    };
    let results: Vec<(Command, Result<Outcome, Failure>, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = cmds
            .iter()
            .map(|&c| {
                let stamp = &stamp;
                scope.spawn(move || {
                    let t = Instant::now();
                    let r = run_command(c, cfg, stamp);
                    (c, r, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("command thread panicked"))
            .collect()
    });

    let mut code = EXIT_OK;
    let mut overview = serde_json::Map::new();
    for (c, res, secs) in &results {
        let dir = if cmd == Command::All {
            cfg.out.join(c.name())
        } else {
            cfg.out.clone()
        };
        if let Err(e) = write_run(&dir, *c, cfg, res) {
            eprintln!("error: writing {}: {e}", dir.display());
            return EXIT_IO;
        }
        let st = status_of(res);
        match &st {
            Status::Passed => {}
            Status::ChecksFailed => code = code.max(EXIT_CHECKS_FAILED),
            Status::Numeric(f) => {
                eprintln!("error: {} failed at {}: {}", f.command, f.stage, f.message);
                code = code.max(EXIT_NUMERIC);
            }
        }
        eprintln!(
            "{:<9} {:<16} {:>8.2} s  -> {}",
            c.name(),
            st.label(),
            secs,
            dir.display()
        );
        overview.insert(c.name().into(), json!(st.label()));
    }
    if cmd == Command::All {
        let r = write_json(
            &cfg.out.join("summary.json"),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "command": "all",
                "pass": code == EXIT_OK,
                "result": overview,
            }),
        );
        if let Err(e) = r {
            eprintln!("error: writing summary: {e}");
            return EXIT_IO;
        }
    }
    code
}
