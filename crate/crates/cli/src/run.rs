//! Command implementations. Each returns a JSON result, the tolerances it
//! used and the files to write; nothing here touches the filesystem.

use crate::config::{Command, GluedFamily, RunConfig, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use willmore_geodesics::audits::{
    injectivity_bound_report, main_theorem_ratio, neck_family, random_cap_audits, AUDIT_TOL,
};
use willmore_geodesics::csf::{avoidance_harness, evolve, shipped_scenarios, StepPolicy};
use willmore_geodesics::figures::{flow_svgs, geodesic_svg, FigureStyle};
use willmore_geodesics::geodesic::{ShootOptions, CLOSURE_TOL};
use willmore_geodesics::graph::{
    cutoff_smallness, flatten_cutoff, graph_energy, invert_points, patch_csv, toro_curvature,
    GraphGrid, InversionConfig, MongePatch, Subdomain,
};
use willmore_geodesics::numerics::{
    central_diff, central_diff2, relative_error, QuadratureSpec, ROOT_TOL,
};
use willmore_geodesics::report::reports_csv;
use willmore_geodesics::spheroid::{solve_parameters, verify};
use willmore_geodesics::surfaces::{build_glued_family, GluedFamilyConfig, HeightRule};
use willmore_geodesics::tiling::{
    complement_energy_audit, decompose_regions, region_gauss_bonnet, TilingOptions, ANGLE_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Gauss-Bonnet residual and complement tolerance on the raster.
pub const TILING_TOL: f64 = 1e-3;
/// Allowed drift of the conserved quantities along a verified geodesic.
pub const DRIFT_TOL: f64 = 1e-8;
/// Closed-form agreement of glued-surface energies.
pub const ENERGY_TOL: f64 = 1e-8;
/// Relative tolerance of the Toro finite-difference spot check.
pub const FD_TOL: f64 = 1e-6;
/// Smallest acceptable fitted cutoff slope.
pub const SLOPE_MIN: f64 = 1.7;
/// Agreement of the inversion identities with sampled images.
pub const INVERSION_TOL: f64 = 1e-10;

#[derive(Debug, Default)]
pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn tol(&mut self, key: &str, v: f64) {
        self.tolerances.insert(key.to_string(), v);
    }

    fn file(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }
}

/// Numeric failure inside a command.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub command: String,
    pub stage: String,
    pub message: String,
}

fn fail<E: std::fmt::Display>(command: Command, stage: &str) -> impl FnOnce(E) -> Failure {
    let stage = stage.to_string();
    move |e| Failure {
        command: command.name().to_string(),
        stage,
        message: e.to_string(),
    }
}

fn shoot_opts(cfg: &RunConfig) -> ShootOptions {
    let d = ShootOptions::default();
    ShootOptions {
        tol: d.tol * cfg.tol_scale,
        ..d
    }
}

fn quad_spec(cfg: &RunConfig) -> QuadratureSpec {
    QuadratureSpec::default().scaled(cfg.tol_scale)
}

fn style(cfg: &RunConfig, stamp: &Option<String>) -> FigureStyle {
    FigureStyle {
        timestamp: if cfg.timestamp { stamp.clone() } else { None },
        ..Default::default()
    }
}

fn record_numerics(o: &mut Outcome, cfg: &RunConfig, shoot: bool, quad: bool) {
    o.tol("tol_scale", cfg.tol_scale);
    if shoot {
        let s = shoot_opts(cfg);
        o.tol("ode.tol", s.tol);
        o.tol("ode.h_max", s.h_max);
    }
    if quad {
        let q = quad_spec(cfg);
        o.tol("quadrature.abs_tol", q.abs_tol);
        o.tol("quadrature.rel_tol", q.rel_tol);
    }
}

pub fn run_command(
    cmd: Command,
    cfg: &RunConfig,
    stamp: &Option<String>,
) -> Result<Outcome, Failure> {
    match cmd {
        Command::Spheroid => spheroid(cfg, stamp),
        Command::Glued => glued(cfg),
        Command::Tiling => tiling(cfg),
        Command::Audits => audits(cfg),
        Command::Toro => toro(cfg),
        Command::Invert => invert(cfg),
        Command::Csf => csf(cfg, stamp),
        Command::All => unreachable!("`all` is expanded by the caller"),
    }
}

fn spheroid(cfg: &RunConfig, stamp: &Option<String>) -> Result<Outcome, Failure> {
    let cmd = Command::Spheroid;
    let p = &cfg.spheroid;
    let mut o = Outcome::default();
    record_numerics(&mut o, cfg, true, false);
    o.tol("root.tol", ROOT_TOL);
    o.tol("closure.tol", CLOSURE_TOL);
    o.tol("drift.tol", DRIFT_TOL);

    let mut sol = solve_parameters(p.n, p.eps).map_err(fail(cmd, "solve"))?;
    let v = verify(&sol, shoot_opts(cfg)).map_err(fail(cmd, "verify"))?;
    sol.verified = Some(v.clone());
    let s = sol.surface();
    let tr = sol
        .closed_trace(&s, shoot_opts(cfg))
        .map_err(fail(cmd, "trace"))?;
    let svg = geodesic_svg(&s, &tr, &style(cfg, stamp)).map_err(fail(cmd, "figure"))?;
    o.file("geodesic.svg", svg);

    let closure = v.closure_position_defect.max(v.closure_tangent_defect);
    let drift = v.clairaut_drift.max(v.speed_drift);
    o.pass = sol.invariants_hold()
        && closure < CLOSURE_TOL
        && v.crossings == p.n as usize
        && drift < DRIFT_TOL;
    o.result = json!({
        "N": p.n,
        "eps": p.eps,
        "b": sol.b,
        "c": sol.c,
        "t0": sol.t0,
        "length": sol.length,
        "crossings": v.crossings,
        "closure_defect": closure,
        "ic": sol.ic,
        "verification": v,
    });
    Ok(o)
}

fn energies_json(name: &str, lo: f64, hi: f64, area: f64, willmore: f64) -> Value {
    json!({"name": name, "lo": lo, "hi": hi, "area": area, "willmore": willmore})
}

fn glued(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let cmd = Command::Glued;
    let p = &cfg.glued;
    let mut o = Outcome::default();
    record_numerics(&mut o, cfg, false, true);
    o.tol("energy.tol", ENERGY_TOL);

    let (gcfg, b) = match p.family {
        GluedFamily::SphereCatenoid => {
            (GluedFamilyConfig::sphere_catenoid(p.a, p.cyl_height), None)
        }
        GluedFamily::CappedSpheroid => {
            let sol = solve_parameters(p.n, p.a).map_err(fail(cmd, "solve"))?;
            (GluedFamilyConfig::capped_spheroid(p.a, sol.b), Some(sol.b))
        }
    };
    let g = build_glued_family(&gcfg).map_err(fail(cmd, "build"))?;
    let spec = quad_spec(cfg);
    let mut pieces = Vec::new();
    let mut csv = String::from("name,lo,hi,area,willmore\n");
    let (mut area, mut w) = (0.0, 0.0);
    for piece in &g.pieces {
        let e = g
            .surface
            .area_and_willmore_with((piece.lo, piece.hi), &spec)
            .map_err(fail(cmd, "energy"))?;
        area += e.area;
        w += e.willmore;
        csv.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            piece.name, piece.lo, piece.hi, e.area, e.willmore
        ));
        pieces.push(energies_json(
            &piece.name,
            piece.lo,
            piece.hi,
            e.area,
            e.willmore,
        ));
    }
    o.file("pieces.csv", csv);
    let whole = g
        .surface
        .area_and_willmore_with(g.surface.domain(), &spec)
        .map_err(fail(cmd, "energy"))?;
    let join = g
        .join_residuals
        .iter()
        .map(|&(a, b)| a.abs().max(b.abs()))
        .fold(0.0, f64::max);

    let mut result = json!({
        "family": p.family,
        "a": p.a,
        "cyl_height": p.cyl_height,
        "joins": g.joins,
        "join_residual": join,
        "pieces": pieces,
        "totals": {"area": area, "willmore": w},
        "whole_surface": {"area": whole.area, "willmore": whole.willmore},
    });
    let consistent = (whole.willmore - w).abs() < ENERGY_TOL * w.max(1.0);
    match p.family {
        GluedFamily::SphereCatenoid => {
            let closed = sphere_catenoid_willmore(p.a, p.cyl_height);
            let err = (w - closed).abs();
            result["closed_form_willmore"] = json!(closed);
            result["closed_form_error"] = json!(err);
            result["neck_geodesic_length"] = json!(TAU * p.a);
            o.pass = consistent && err < ENERGY_TOL;
        }
        GluedFamily::CappedSpheroid => {
            result["N"] = json!(p.n);
            result["b"] = json!(b);
            result["willmore_minus_4pi"] = json!(whole.willmore - 4.0 * PI);
            o.pass = consistent;
        }
    }
    o.result = result;
    Ok(o)
}

/// Sphere cut at height 1 - s_a, catenoid (W = 0), cylinder of radius a,
/// hemisphere of radius a.
pub fn sphere_catenoid_willmore(a: f64, rule: HeightRule) -> f64 {
    TAU * (1.0 + (1.0 - a).sqrt()) + PI * rule.height(a) / (2.0 * a) + TAU
}

fn tiling(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let cmd = Command::Tiling;
    let p = &cfg.tiling;
    let mut o = Outcome::default();
    record_numerics(&mut o, cfg, true, false);
    o.tol("gauss_bonnet.tol", TILING_TOL);
    o.tol("complement.tol", TILING_TOL);
    o.tol("angle.tol", ANGLE_TOL);

    let sol = solve_parameters(p.n, p.eps).map_err(fail(cmd, "solve"))?;
    let s = sol.surface();
    let tr = sol
        .closed_trace(&s, shoot_opts(cfg))
        .map_err(fail(cmd, "trace"))?;
    let opts = TilingOptions {
        n1: p.n1,
        n2: p.n2,
        ..Default::default()
    };
    let t = decompose_regions(&s, &tr, opts).map_err(fail(cmd, "decompose"))?;
    let xi = t.xi();
    let gb: Vec<_> = t
        .regions
        .iter()
        .map(|r| region_gauss_bonnet(r, Some(xi)))
        .collect();
    let w = s
        .area_and_willmore(s.domain())
        .map_err(fail(cmd, "energy"))?
        .willmore;
    let comp = complement_energy_audit(&t.regions, w, Some(xi), TILING_TOL);

    o.pass = t.regions.len() == p.n as usize + 2
        && gb.iter().all(|g| {
            g.residual < TILING_TOL
                && g.below_two_pi
                && g.min_exterior >= -ANGLE_TOL
                && g.remark_bound.is_none_or(|b| g.kda <= b + TILING_TOL)
        })
        && comp.iter().all(|a| a.pass);
    o.file("regions.csv", t.regions_csv());
    o.file("labels.pgm", t.pgm());
    o.file("complements.csv", reports_csv(&comp));
    let regions: Vec<Value> = t
        .regions
        .iter()
        .zip(&gb)
        .map(|(r, g)| {
            json!({
                "id": r.id, "cells": r.cells, "area": r.area, "kda": r.kda,
                "willmore": r.willmore, "n_i": r.n_i, "boundary_length": r.boundary_length,
                "gauss_bonnet": g,
            })
        })
        .collect();
    o.result = json!({
        "N": p.n, "eps": p.eps, "b": sol.b, "c": sol.c,
        "grid": [p.n1, p.n2],
        "xi": xi,
        "total_willmore": w,
        "polyline_length": t.polyline_length,
        "regions": regions,
        "complement_failures": comp.iter().filter(|a| !a.pass).count(),
    });
    Ok(o)
}

fn audits(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let cmd = Command::Audits;
    let p = &cfg.audits;
    let mut o = Outcome {
        pass: true,
        ..Default::default()
    };
    let mut result = serde_json::Map::new();
    let patches = matches!(p.suite, Suite::Patches | Suite::All);
    let family = matches!(p.suite, Suite::Ratio | Suite::Injectivity | Suite::All);
    record_numerics(&mut o, cfg, family, family);

    if patches {
        o.tol("audit.tol", AUDIT_TOL);
        let reports = random_cap_audits(cfg.seed, p.count).map_err(fail(cmd, "patches"))?;
        let failed = reports.iter().filter(|r| !r.pass).count();
        o.pass &= failed == 0;
        o.file("patches.csv", reports_csv(&reports));
        result.insert(
            "patches".into(),
            json!({
                "seed": cfg.seed, "caps": p.count, "reports": reports.len(), "failed": failed,
                "min_margin": reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
            }),
        );
    }
    if family {
        let fam = neck_family(&p.a_values, HeightRule::QUADRATIC, shoot_opts(cfg))
            .map_err(fail(cmd, "family"))?;
        if matches!(p.suite, Suite::Ratio | Suite::All) {
            let table = main_theorem_ratio(&fam, &quad_spec(cfg)).map_err(fail(cmd, "ratio"))?;
            let positive = table
                .rows
                .iter()
                .all(|r| r.vacuous || r.ratio.is_some_and(|v| v > 0.0));
            o.pass &= positive && table.min_ratio.is_some();
            o.file("ratio.csv", table.csv());
            result.insert(
                "ratio".into(),
                json!({"rows": table.rows, "min_ratio": table.min_ratio}),
            );
        }
        if matches!(p.suite, Suite::Injectivity | Suite::All) {
            let mut rows = Vec::new();
            let mut csv =
                String::from("label,max_gauss,curvature_term,energy_term,half_geodesic_length\n");
            for e in &fam {
                let r = injectivity_bound_report(&e.surface, e.geodesic_length)
                    .map_err(fail(cmd, "injectivity"))?;
                csv.push_str(&format!(
                    "{},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                    e.label, r.max_gauss, r.curvature_term, r.energy_term, r.half_geodesic_length
                ));
                rows.push(json!({"label": e.label, "report": r}));
            }
            o.file("injectivity.csv", csv);
            result.insert("injectivity".into(), Value::Array(rows));
        }
    }
    result.insert("suite".into(), json!(p.suite));
    o.result = Value::Object(result);
    Ok(o)
}

fn toro_u(x: f64, y: f64) -> f64 {
    x * (-(x.hypot(y)).ln()).ln()
}

/// Least-squares slope of ln |W - W_delta| against ln delta on the unit disk.
pub fn cutoff_slope(
    p: &MongePatch,
    deltas: &[f64],
) -> Result<f64, willmore_geodesics::graph::GraphError> {
    let disk = Subdomain::Disk { r: 1.0 };
    let full = graph_energy(p, disk, GraphGrid::default())?.willmore;
    let mut pts = Vec::new();
    for &d in deltas {
        let w = graph_energy(&flatten_cutoff(p, d)?, disk, GraphGrid::default())?.willmore;
        pts.push((d.ln(), (full - w).abs().ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

fn toro(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let cmd = Command::Toro;
    let p = &cfg.toro;
    let mut o = Outcome::default();
    o.tol("fd.rel_tol", FD_TOL);
    o.tol("slope.min", SLOPE_MIN);

    let ladder_x: Vec<f64> = p
        .ladder
        .iter()
        .map(|&x| toro_curvature(x, 0.0).map(|r| r.0))
        .collect::<Result<_, _>>()
        .map_err(fail(cmd, "ladder"))?;
    let ladder_y: Vec<f64> = p
        .ladder
        .iter()
        .map(|&y| toro_curvature(0.0, y).map(|r| r.0))
        .collect::<Result<_, _>>()
        .map_err(fail(cmd, "ladder"))?;
    let signs = ladder_x.iter().all(|&k| k > 0.0) && ladder_y.iter().all(|&k| k < 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..p.fd_points {
        let r = rng.gen_range((1e-4f64).ln()..(0.5f64).ln()).exp();
        let th = rng.gen_range(0.0..TAU);
        let (x, y) = (r * th.cos(), r * th.sin());
        let (_, du, d2) = toro_curvature(x, y).map_err(fail(cmd, "jet"))?;
        let h = 1e-3 * r;
        let fd = [
            central_diff(|t| toro_u(t, y), x, h),
            central_diff(|t| toro_u(x, t), y, h),
            central_diff2(|t| toro_u(t, y), x, h),
            central_diff(|t| central_diff(|s| toro_u(s, t), x, h), y, h),
            central_diff2(|t| toro_u(x, t), y, h),
        ];
        let cf = [du[0], du[1], d2[0][0], d2[0][1], d2[1][1]];
        let gn = du[0].hypot(du[1]);
        let hn = (d2[0][0].powi(2) + 2.0 * d2[0][1].powi(2) + d2[1][1].powi(2)).sqrt();
        for k in 0..5 {
            worst = worst.max(relative_error(fd[k], cf[k], if k < 2 { gn } else { hn }));
        }
    }

    let [r0, r1] = p.annulus;
    let ann = Subdomain::Annulus { r0, r1 };
    let e =
        graph_energy(&MongePatch::Toro, ann, GraphGrid::default()).map_err(fail(cmd, "energy"))?;
    o.file(
        "toro_patch.csv",
        patch_csv(&MongePatch::Toro, ann, 32, 64).map_err(fail(cmd, "patch"))?,
    );

    let quarter_saddle = MongePatch::Scaled {
        rho: 4.0,
        inner: Box::new(MongePatch::Saddle),
    };
    let paraboloid = MongePatch::Paraboloid { c: 0.5 };
    let mut slopes = Vec::new();
    let mut slopes_ok = true;
    for (label, patch, checked) in [
        ("quarter-saddle", &quarter_saddle, true),
        ("quarter-paraboloid", &paraboloid, true),
        ("unit-saddle", &MongePatch::Saddle, false),
    ] {
        let slope = cutoff_slope(patch, &p.deltas).map_err(fail(cmd, "cutoff"))?;
        let small = p
            .deltas
            .iter()
            .map(|&d| cutoff_smallness(patch, d, 64))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail(cmd, "cutoff"))?
            .into_iter()
            .fold(0.0, f64::max);
        if checked {
            slopes_ok &= slope >= SLOPE_MIN && small <= 1.0;
        }
        slopes.push(
            json!({"patch": label, "slope": slope, "max_smallness": small, "checked": checked}),
        );
    }

    o.pass = signs && worst < FD_TOL && slopes_ok;
    o.result = json!({
        "ladder": p.ladder,
        "k_on_x_axis": ladder_x,
        "k_on_y_axis": ladder_y,
        "fd_points": p.fd_points,
        "fd_worst_rel_error": worst,
        "annulus": {"r0": r0, "r1": r1, "energy": e},
        "cutoff_deltas": p.deltas,
        "cutoff_slopes": slopes,
    });
    Ok(o)
}

fn ring_image(
    lam: f64,
    d: f64,
    n: usize,
) -> Result<(f64, f64), willmore_geodesics::graph::GraphError> {
    let cfg = InversionConfig::standard(lam)?;
    let ring: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            vec![d * t.cos(), d * t.sin(), 0.0]
        })
        .collect();
    let img = invert_points(&ring, &cfg)?;
    let min_h = img.iter().map(|q| q[2]).fold(f64::INFINITY, f64::min);
    let radius = img.iter().map(|q| q[0].hypot(q[1])).sum::<f64>() / n as f64;
    Ok((min_h, TAU * radius))
}

fn invert(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let cmd = Command::Invert;
    let p = &cfg.invert;
    let mut o = Outcome::default();
    o.tol("inversion.tol", INVERSION_TOL);
    let mut pairs: Vec<(f64, f64)> = p.deltas.iter().map(|&d| (p.lambda, d)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..p.random {
        pairs.push((rng.gen_range(0.01..0.3), rng.gen_range(0.01..0.3)));
    }
    let mut csv =
        String::from("lambda,delta,cap_threshold,sampled_height,circle_length,sampled_length\n");
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for (lam, d) in pairs {
        let ic = InversionConfig::standard(lam).map_err(fail(cmd, "config"))?;
        let (h, l) = ring_image(lam, d, p.ring_samples).map_err(fail(cmd, "invert"))?;
        let (th, cl) = (ic.cap_threshold(d), ic.circle_length(d));
        let err = (h - th).abs().max((l - cl).abs());
        worst = worst.max(err);
        csv.push_str(&format!(
            "{lam:.12e},{d:.12e},{th:.12e},{h:.12e},{cl:.12e},{l:.12e}\n"
        ));
        rows.push(json!({"lambda": lam, "delta": d, "cap_threshold": th, "circle_length": cl, "error": err}));
    }
    o.file("inversion.csv", csv);
    o.pass = worst < INVERSION_TOL;
    o.result = json!({"seed": cfg.seed, "cases": rows, "worst_error": worst});
    Ok(o)
}

fn csf(cfg: &RunConfig, stamp: &Option<String>) -> Result<Outcome, Failure> {
    let cmd = Command::Csf;
    let p = &cfg.csf;
    let mut o = Outcome::default();
    let pol: StepPolicy = p.policy;
    o.tol("cfl", pol.cfl);
    o.tol("convergence_tol", pol.convergence_tol.unwrap_or(0.0));
    o.tol("shrink_fraction", pol.shrink_fraction);
    o.tol("min_dt", pol.min_dt);
    o.tol("length_monotone_slack", 1e-12);

    let all = shipped_scenarios().map_err(fail(cmd, "scenarios"))?;
    let chosen: Vec<_> = all
        .into_iter()
        .filter(|s| p.scenarios.is_empty() || p.scenarios.iter().any(|n| n == s.name))
        .collect();
    o.pass = true;
    let mut rows = Vec::new();
    for sc in chosen {
        let t_end = p.t_end.unwrap_or(sc.t_end);
        let rec = avoidance_harness(&sc.surface, &sc.c1, &sc.c2, t_end, sc.c2_stationary, pol)
            .map_err(fail(cmd, sc.name))?;
        let run = evolve(&sc.surface, &sc.c1, t_end, pol).map_err(fail(cmd, sc.name))?;
        let svgs = flow_svgs(&sc.surface, &run, &style(cfg, stamp)).map_err(fail(cmd, sc.name))?;
        for (i, svg) in svgs.into_iter().enumerate() {
            o.file(format!("{}/snapshot_{i:03}.svg", sc.name), svg);
        }
        o.file(format!("{}/avoidance.csv", sc.name), rec.csv());
        o.file(
            format!("{}/final_curve.csv", sc.name),
            run.final_curve.csv(),
        );
        let ok = rec.min_d > 0.0 && run.max_length_increase <= 1e-12;
        o.pass &= ok;
        rows.push(json!({
            "name": sc.name,
            "t_end": t_end,
            "c2_stationary": sc.c2_stationary,
            "min_d": rec.min_d,
            "decay_rate": rec.decay_rate,
            "harness_steps": rec.steps,
            "flow": {
                "snapshots": run.snapshots.len(),
                "converged": run.converged,
                "shrunk": run.shrunk,
                "steps": run.steps,
                "rejected": run.rejected,
                "max_length_increase": run.max_length_increase,
                "final_time": run.final_curve.time,
                "final_length": run.final_curve.length,
                "final_max_abs_kappa": run.final_curve.max_abs_kappa(),
            },
            "pass": ok,
        }));
    }
    o.result = json!({"policy": pol, "scenarios": rows});
    Ok(o)
}
