//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::time::Instant;
use willmore_geodesics::audits::{main_theorem_ratio, neck_family, random_cap_audits};
use willmore_geodesics::csf::{
    avoidance_harness, evolve, shipped_scenarios, FlowCurve, StepPolicy,
};
use willmore_geodesics::geodesic::{trace_length, ShootOptions, CLOSURE_TOL};
use willmore_geodesics::graph::*;
use willmore_geodesics::numerics::*;
use willmore_geodesics::spheroid::*;
use willmore_geodesics::surfaces::*;
use willmore_geodesics::tiling::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const CASES: [(u32, f64, f64, f64); 4] = [
    (3, 0.2, 4.038, 0.980),
    (3, 0.1, 4.009, 0.995),
    (4, 0.2, 5.049, 0.980),
    (4, 0.1, 5.012, 0.995),
];

fn c1_figure_parameters() -> Outcome {
    let mut pass = true;
    let (mut db, mut dc, mut slowest) = (0.0f64, 0.0f64, 0.0f64);
    for (n, eps, b, c) in CASES {
        let t = Instant::now();
        match solve_for_geodesic(n, eps) {
            Ok(sol) => {
                let secs = t.elapsed().as_secs_f64();
                db = db.max((sol.b - b).abs());
                dc = dc.max((sol.c - c).abs());
                slowest = slowest.max(secs);
                pass &= (sol.b - b).abs() <= 0.01 && (sol.c - c).abs() <= 0.005 && secs < 5.0;
            }
            Err(e) => {
                pass = false;
                println!("    ({n}, {eps}): {e}");
            }
        }
    }
    outcome(pass, format!("|db| <= 0.01, |dc| <= 0.005, < 5 s each; max |db| = {db:.2e}, max |dc| = {dc:.2e}, slowest {slowest:.3} s"))
}

fn c2_geodesic_verification() -> Outcome {
    let mut pass = true;
    let (mut defect, mut drift, mut slowest) = (0.0f64, 0.0f64, 0.0f64);
    let mut counts = Vec::new();
    for (n, eps, _, _) in CASES {
        let t = Instant::now();
        let sol = match solve_for_geodesic(n, eps) {
            Ok(s) => s,
            Err(e) => {
                println!("    ({n}, {eps}): {e}");
                pass = false;
                continue;
            }
        };
        let v = sol.verified.clone().unwrap();
        let s = sol.surface();
        let tr = sol.closed_trace(&s, ShootOptions::default()).unwrap();
        let l = trace_length(&tr, (0.0, 4.0 * sol.t0)).unwrap().from_samples;
        let secs = t.elapsed().as_secs_f64();
        let k = (n + 1) as f64;
        let d = v.closure_position_defect.max(v.closure_tangent_defect);
        let dr = v.clairaut_drift.max(v.speed_drift);
        defect = defect.max(d);
        drift = drift.max(dr);
        slowest = slowest.max(secs);
        counts.push(v.crossings);
        pass &= d < 1e-6
            && v.crossings == n as usize
            && dr < 1e-8
            && 2.0 * k * PI * sol.c < l
            && l < 2.0 * k * PI / sol.c
            && secs < 10.0;
    }
    outcome(
        pass,
        format!("closure < 1e-6, crossings = N, drift < 1e-8, 2(N+1)pi c < L < 2(N+1)pi/c, < 10 s; closure {defect:.1e}, drift {drift:.1e}, crossings {counts:?}, slowest {slowest:.3} s"),
    )
}

fn c3_ic_identities() -> Outcome {
    let sphere = (1..10)
        .map(|i| (eval_ic(1.0, i as f64 / 10.0).unwrap() - PI).abs())
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut sandwich = true;
    for _ in 0..100 {
        let (b, c) = (rng.gen_range(1.0..6.0), rng.gen_range(0.05..0.999));
        let v = eval_ic(b, c).unwrap();
        let (lo, hi) = ic_bounds(b, c).unwrap();
        sandwich &= lo <= v && v <= hi;
    }
    let mut half = 0.0f64;
    for (n, eps, _, _) in CASES {
        half = half.max(
            solve_for_geodesic(n, eps)
                .unwrap()
                .verified
                .unwrap()
                .half_increment_residual,
        );
    }
    outcome(
        sphere < 1e-9 && sandwich && half < 1e-6,
        format!("|I_c(1,c) - pi| < 1e-9, sandwich on 100 seeded (b,c), |du1 - I_c/2| < 1e-6; {sphere:.1e}, sandwich {sandwich}, {half:.1e}"),
    )
}

fn c4_elliptic() -> Outcome {
    let k0 = (elliptic_k(EllipticModulus::new(0.0).unwrap()) - FRAC_PI_2).abs();
    let mut agm = 0.0f64;
    for i in 0..=99 {
        let m = i as f64 / 100.0;
        let a = elliptic_k(EllipticModulus::new(m).unwrap());
        let q =
            elliptic_k_by_quadrature(EllipticModulus::new(m).unwrap(), &QuadratureSpec::default())
                .unwrap();
        agm = agm.max((a - q).abs());
    }
    let k = 1e-4;
    let d = central_diff(
        |x| elliptic_k(EllipticModulus::new(x.abs()).unwrap()),
        k,
        2e-5,
    );
    let rel = relative_error(d / k, FRAC_PI_4, 0.0);
    outcome(
        k0 < 1e-14 && agm < 1e-10 && rel < 1e-6,
        format!("|K(0) - pi/2| < 1e-14, |AGM - quad| < 1e-10 on k = 0..0.99, K'(k)/k vs pi/4 at k = 1e-4 < 1e-6 rel; {k0:.1e}, {agm:.1e}, {rel:.1e}"),
    )
}

fn c5_energy_closed_forms() -> Outcome {
    let (a, h) = (0.7, 1.3);
    let cases: Vec<(&str, RevolutionSurface, Option<f64>, f64)> = vec![
        (
            "sphere",
            RevolutionSurface::unit_sphere(),
            Some(4.0 * PI),
            4.0 * PI,
        ),
        (
            "hemisphere",
            RevolutionSurface::hemisphere(a),
            Some(TAU * a * a),
            TAU,
        ),
        (
            "cylinder",
            RevolutionSurface::cylinder(a, h),
            Some(TAU * a * h),
            PI * h / (2.0 * a),
        ),
        (
            "catenoid",
            RevolutionSurface::catenoid(1.0, -1.0, 1.0),
            None,
            0.0,
        ),
    ];
    let mut pass = true;
    let (mut err, mut slowest) = (0.0f64, 0.0f64);
    for (_, s, area, w) in cases {
        let t = Instant::now();
        let e = s.area_and_willmore(s.domain()).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        let d = (e.willmore - w)
            .abs()
            .max(area.map_or(0.0, |x| (e.area - x).abs()));
        err = err.max(d);
        pass &= d < 1e-8;
    }
    pass &= slowest < 1.0;
    outcome(pass, format!("(A, W) of sphere, hemisphere, cylinder, catenoid within 1e-8, < 1 s; max error {err:.1e}, slowest {slowest:.4} s"))
}

fn c6_glued_families() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    // (i) vanishing cylinder, height 2a^2
    let t = Instant::now();
    let a = 0.02;
    let fam = neck_family(&[a], HeightRule::QUADRATIC, ShootOptions::default()).unwrap();
    let w = fam[0]
        .surface
        .area_and_willmore(fam[0].surface.domain())
        .unwrap()
        .willmore;
    let dl = (fam[0].geodesic_length - TAU * a).abs();
    pass &= (w - 6.0 * PI).abs() < 0.05 && dl < 1e-8 && t.elapsed().as_secs_f64() < 60.0;
    notes.push(format!(
        "(i) |W - 6pi| = {:.2e} < 0.05, |L - 2pi a| = {dl:.1e} < 1e-8",
        (w - 6.0 * PI).abs()
    ));

    // (ii) literal height 2a: quadrature vs closed form, distance to 7pi
    let t = Instant::now();
    let mut oracle = 0.0f64;
    let mut gaps = Vec::new();
    for a in [0.02, 0.01, 0.005] {
        let g = build_glued_family(&GluedFamilyConfig::sphere_catenoid(a, HeightRule::LITERAL))
            .unwrap();
        let w = g
            .surface
            .area_and_willmore(g.surface.domain())
            .unwrap()
            .willmore;
        let closed = TAU * (1.0 + (1.0 - a).sqrt()) + PI + TAU;
        oracle = oracle.max((w - closed).abs());
        gaps.push((a, (w - 7.0 * PI).abs()));
    }
    let last = gaps.last().unwrap().1;
    pass &= oracle < 1e-8 && last < 0.05 && t.elapsed().as_secs_f64() < 60.0;
    notes.push(format!(
        "(ii) |W - closed form| = {oracle:.1e} < 1e-8, |W - 7pi| at a = 0.005: {last:.3} < 0.05"
    ));
    if gaps[0].1 >= 0.05 {
        println!(
            "    note: literal height 2a at a = 0.02 gives |W - 7pi| = {:.3} (cap deficit 2pi(1 - sqrt(1 - a))); the 7pi value is the a -> 0 limit",
            gaps[0].1
        );
    }

    // (iii) capped spheroid with N = 3
    let t = Instant::now();
    let eps = 0.005;
    let sol = solve_parameters(3, eps).unwrap();
    let g = build_glued_family(&GluedFamilyConfig::capped_spheroid(eps, sol.b)).unwrap();
    let w = g
        .surface
        .area_and_willmore(g.surface.domain())
        .unwrap()
        .willmore;
    let tr = sol
        .closed_trace(&g.surface, ShootOptions::default())
        .unwrap();
    let c = tr.closure.unwrap();
    let rep = willmore_geodesics::geodesic::detect_self_intersections(&tr).unwrap();
    pass &= w < 4.0 * PI + 0.1
        && c.defect() < CLOSURE_TOL
        && rep.points.len() == 3
        && t.elapsed().as_secs_f64() < 60.0;
    notes.push(format!(
        "(iii) W - 4pi = {:.3} < 0.1, closure {:.1e}, crossings {}",
        w - 4.0 * PI,
        c.defect(),
        rep.points.len()
    ));
    outcome(pass, notes.join("; "))
}

fn c7_tiling() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let (mut res, mut ext, mut remark, mut comp) =
        (0.0f64, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    let mut counts = Vec::new();
    for (n, eps, _, _) in CASES {
        let sol = solve_parameters(n, eps).unwrap();
        let s = sol.surface();
        let tr = sol.closed_trace(&s, ShootOptions::default()).unwrap();
        let tiling = match decompose_regions(&s, &tr, TilingOptions::default()) {
            Ok(t) => t,
            Err(e) => {
                println!("    ({n}, {eps}): {e}");
                pass = false;
                continue;
            }
        };
        counts.push(tiling.regions.len());
        pass &= tiling.regions.len() == n as usize + 2;
        let xi = tiling.xi();
        for r in &tiling.regions {
            let gb = region_gauss_bonnet(r, Some(xi));
            res = res.max(gb.residual);
            ext = ext.min(gb.min_exterior);
            let over = gb.kda - gb.remark_bound.unwrap();
            remark = remark.max(over);
            pass &= gb.residual < 1e-3
                && gb.below_two_pi
                && gb.min_exterior >= -ANGLE_TOL
                && over <= 1e-3;
        }
        let w = s.area_and_willmore(s.domain()).unwrap().willmore;
        for a in complement_energy_audit(&tiling.regions, w, Some(xi), 1e-3) {
            comp = comp.min(a.margin);
            pass &= a.pass;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    pass &= secs < 120.0;
    outcome(
        pass,
        format!(
            "regions = N+2, GB residual < 1e-3, int K < 2pi, exterior >= -1e-6, int K <= 2pi - N_i xi (+1e-3), complements >= 2pi(+N_i xi) - 1e-3, 2048x1024, < 120 s; regions {counts:?}, residual {res:.1e}, min exterior {ext:.3}, max remark excess {remark:.2e}, min complement margin {comp:.3}, {secs:.1} s"
        ),
    )
}

fn c8_patch_audits() -> Outcome {
    let reports = random_cap_audits(0, 50).unwrap();
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    let min_margin = reports
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    outcome(failed.is_empty() && reports.len() == 150, format!("diameter, interior-point, monotonicity on 50 seeded caps (seed 0), tolerance 1e-9; {} reports, {} failed, min margin {min_margin:.3e}", reports.len(), failed.len()))
}

fn c9_toro() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let r = rng.gen_range((1e-4f64).ln()..(0.5f64).ln()).exp();
        let th = rng.gen_range(0.0..TAU);
        let (x, y) = (r * th.cos(), r * th.sin());
        let (_, du, d2) = toro_curvature(x, y).unwrap();
        let u = |a: f64, b: f64| a * (-(a.hypot(b)).ln()).ln();
        let h = 1e-3 * r;
        let fd = [
            central_diff(|t| u(t, y), x, h),
            central_diff(|t| u(x, t), y, h),
            central_diff2(|t| u(t, y), x, h),
            central_diff(|t| central_diff(|s| u(s, t), x, h), y, h),
            central_diff2(|t| u(x, t), y, h),
        ];
        let cf = [du[0], du[1], d2[0][0], d2[0][1], d2[1][1]];
        let gn = du[0].hypot(du[1]);
        let hn = (d2[0][0].powi(2) + 2.0 * d2[0][1].powi(2) + d2[1][1].powi(2)).sqrt();
        for k in 0..5 {
            worst = worst.max(relative_error(fd[k], cf[k], if k < 2 { gn } else { hn }));
        }
    }
    let lad = [1e-2, 1e-3, 1e-4];
    let kx: Vec<f64> = lad
        .iter()
        .map(|&x| toro_curvature(x, 0.0).unwrap().0)
        .collect();
    let ky: Vec<f64> = lad
        .iter()
        .map(|&y| toro_curvature(0.0, y).unwrap().0)
        .collect();
    let up = kx.iter().all(|&k| k > 0.0) && kx[0] < kx[1] && kx[1] < kx[2];
    let down = ky.iter().all(|&k| k < 0.0) && ky[0] > ky[1] && ky[1] > ky[2];
    outcome(
        worst < 1e-6 && up && down,
        format!("partials vs differences < 1e-6 rel at 1000 points, 1e-4 < r < 0.5; K(x,0) > 0 increasing, K(0,y) < 0 decreasing; worst {worst:.1e}, K(x,0) = {kx:?}, K(0,y) = {ky:?}"),
    )
}

fn slope(deltas: &[f64], patch: &MongePatch) -> f64 {
    let full = graph_energy(patch, Subdomain::Disk { r: 1.0 }, GraphGrid::default())
        .unwrap()
        .willmore;
    let ys: Vec<f64> = deltas
        .iter()
        .map(|&d| {
            let p = flatten_cutoff(patch, d).unwrap();
            (full
                - graph_energy(&p, Subdomain::Disk { r: 1.0 }, GraphGrid::default())
                    .unwrap()
                    .willmore)
                .abs()
                .ln()
        })
        .collect();
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    xs.iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
}

fn c10_cutoff_scaling() -> Outcome {
    let deltas = [0.2, 0.1, 0.05, 0.025];
    let quarter_saddle = MongePatch::Scaled {
        rho: 4.0,
        inner: Box::new(MongePatch::Saddle),
    };
    let quarter_paraboloid = MongePatch::Paraboloid { c: 0.5 };
    let small = deltas.iter().all(|&d| {
        cutoff_smallness(&quarter_saddle, d, 64).unwrap() <= 1.0
            && cutoff_smallness(&quarter_paraboloid, d, 64).unwrap() <= 1.0
    });
    let (s1, s2) = (
        slope(&deltas, &quarter_saddle),
        slope(&deltas, &quarter_paraboloid),
    );
    let unit = slope(&deltas, &MongePatch::Saddle);
    println!("    diagnostic: unit saddle x^2 - y^2 slope {unit:.3} (|Du| + |Du_delta| > 1 at delta = 0.2, 0.1)");
    outcome(
        small && s1 >= 1.7 && s2 >= 1.7,
        format!("fitted slope of |W - W_delta| over delta = 0.2..0.025 >= 1.7 for (x^2 - y^2)/4 and |z|^2/4; {s1:.3}, {s2:.3}"),
    )
}

fn c11_inversion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut h, mut l) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (lam, d) = (rng.gen_range(0.01..0.3), rng.gen_range(0.01..0.3));
        let cfg = InversionConfig::standard(lam).unwrap();
        let ring: Vec<Vec<f64>> = (0..512)
            .map(|k| {
                let t = TAU * k as f64 / 512.0;
                vec![d * t.cos(), d * t.sin(), 0.0]
            })
            .collect();
        let img = invert_points(&ring, &cfg).unwrap();
        let min_h = img.iter().map(|q| q[2]).fold(f64::INFINITY, f64::min);
        h = h.max(
            (min_h - cfg.cap_threshold(d))
                .abs()
                .max((cfg.cap_threshold(d) - 2.0 * lam * lam / (d * d + lam * lam)).abs()),
        );
        let radius = img.iter().map(|q| q[0].hypot(q[1])).sum::<f64>() / img.len() as f64;
        l = l.max(
            (TAU * radius - cfg.circle_length(d))
                .abs()
                .max((cfg.circle_length(d) - 4.0 * PI * lam * d / (d * d + lam * lam)).abs()),
        );
    }
    outcome(h < 1e-10 && l < 1e-10, format!("cap threshold and circle length vs sampled images within 1e-10 for 20 seeded (lambda, delta); {h:.1e}, {l:.1e}"))
}

fn c12_csf() -> Outcome {
    let t = Instant::now();
    let s = RevolutionSurface::dumbbell(0.5, 2.0);
    let no_stop = StepPolicy {
        convergence_tol: None,
        ..Default::default()
    };
    let neck = FlowCurve::parallel(&s, 0.0, 128).unwrap();
    let run = evolve(&s, &neck, 10.0, no_stop).unwrap();
    let drift = neck
        .samples
        .iter()
        .zip(&run.final_curve.samples)
        .map(|(p, q)| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()))
        .fold(0.0, f64::max);
    let mut inc = run.max_length_increase;
    let off = evolve(
        &s,
        &FlowCurve::parallel(&s, 0.3, 128).unwrap(),
        100.0,
        StepPolicy::default(),
    )
    .unwrap();
    inc = inc.max(off.max_length_increase);
    let kappa = off.final_curve.max_abs_kappa();
    let mut dmin = f64::INFINITY;
    let mut ok = true;
    for sc in shipped_scenarios().unwrap() {
        match avoidance_harness(
            &sc.surface,
            &sc.c1,
            &sc.c2,
            sc.t_end,
            sc.c2_stationary,
            StepPolicy::default(),
        ) {
            Ok(rec) => dmin = dmin.min(rec.min_d),
            Err(e) => {
                println!("    {}: {e}", sc.name);
                ok = false;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        drift < 1e-6 && off.converged && kappa < 1e-3 && inc <= 1e-12 && ok && dmin > 0.0 && secs < 120.0,
        format!("neck drift < 1e-6 over t = 10, offset converges with max|k_g| < 1e-3, L nonincreasing (1e-12), d_min > 0 in 3 scenarios, < 120 s; drift {drift:.1e}, max|k_g| {kappa:.1e} at t = {:.2}, max dL {inc:.1e}, d_min {dmin:.3e}, {secs:.1} s", off.final_curve.time),
    )
}

fn c13_ratio_trend() -> Outcome {
    let a = [0.2, 0.1, 0.05, 0.02];
    let base = main_theorem_ratio(
        &neck_family(&a, HeightRule::QUADRATIC, ShootOptions::default()).unwrap(),
        &QuadratureSpec::default(),
    )
    .unwrap();
    let opts = ShootOptions {
        tol: 0.5 * ShootOptions::default().tol,
        h_max: 0.5 * ShootOptions::default().h_max,
    };
    let fine = main_theorem_ratio(
        &neck_family(&a, HeightRule::QUADRATIC, opts).unwrap(),
        &QuadratureSpec::default().scaled(0.5),
    )
    .unwrap();
    let positive = base
        .rows
        .iter()
        .chain(&fine.rows)
        .all(|r| r.ratio.is_some_and(|v| v > 0.0));
    let (m0, m1) = (
        base.min_ratio.unwrap_or(f64::NAN),
        fine.min_ratio.unwrap_or(f64::NAN),
    );
    let change = ((m1 - m0) / m0).abs();
    outcome(positive && change < 0.1, format!("L/((6pi - W) sqrt A) > 0 on a = 0.2..0.02, min stable within 10% under halved tolerances; min {m0:.6e}, halved {m1:.6e}, change {change:.1e}"))
}

fn main() {
    // Keep the libtest interface: `--list` and filters are ignored.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("figure parameters", c1_figure_parameters),
        ("geodesic verification", c2_geodesic_verification),
        ("closure integral identities", c3_ic_identities),
        ("elliptic integral", c4_elliptic),
        ("energy closed forms", c5_energy_closed_forms),
        ("glued families", c6_glued_families),
        ("tiling and Gauss-Bonnet", c7_tiling),
        ("diameter/interior/monotonicity audits", c8_patch_audits),
        ("Toro curvature", c9_toro),
        ("cutoff energy scaling", c10_cutoff_scaling),
        ("inversion cap identities", c11_inversion),
        ("curve shortening flow", c12_csf),
        ("length/energy ratio trend", c13_ratio_trend),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = std::panic::catch_unwind(f).unwrap_or_else(|_| outcome(false, "panicked".into()));
        if !o.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name} [{:.1} s]: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
