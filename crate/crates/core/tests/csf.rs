use std::f64::consts::{FRAC_PI_2, TAU};
use willmore_geodesics::csf::*;
use willmore_geodesics::geodesic::ShootOptions;
use willmore_geodesics::numerics::{central_diff, Dopri5, Dopri5Options};
use willmore_geodesics::spheroid::solve_parameters;
use willmore_geodesics::surfaces::RevolutionSurface;

fn dumbbell() -> RevolutionSurface {
    RevolutionSurface::dumbbell(0.5, 2.0)
}

fn no_stop() -> StepPolicy {
    StepPolicy {
        convergence_tol: None,
        ..Default::default()
    }
}

/// Latitude of a rotationally symmetric flow: du2/dt = -h' / (h gamma^2).
fn latitude_oracle(s: &RevolutionSurface, u0: f64, t: f64) -> f64 {
    let s = s.clone();
    let rhs = move |_t: f64, y: &[f64; 1]| {
        let j = s.jet(y[0]).unwrap();
        [-j.dh / (j.h * j.speed().powi(2))]
    };
    let ode = Dopri5::new(rhs, Dopri5Options::default());
    ode.advance(0.0, [u0], t).unwrap()[0]
}

fn sup_drift(a: &FlowCurve, b: &FlowCurve) -> f64 {
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(p, q)| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn neck_is_stationary() {
    let s = dumbbell();
    let c = FlowCurve::parallel(&s, 0.0, 128).unwrap();
    assert!(c.max_abs_kappa() < 1e-14);
    let run = evolve(&s, &c, 10.0, no_stop()).unwrap();
    assert!((run.final_curve.time - 10.0).abs() < 1e-12);
    assert!(sup_drift(&c, &run.final_curve) < 1e-6);
    assert_eq!(run.snapshots.len(), 11);
}

#[test]
fn latitude_on_sphere_shrinks_like_the_exact_solution() {
    let s = RevolutionSurface::unit_sphere();
    let u0: f64 = 0.3;
    let c = FlowCurve::parallel(&s, u0, 256).unwrap();
    let policy = StepPolicy {
        snapshot_dt: 0.1,
        ..no_stop()
    };
    let run = evolve(&s, &c, 5.0, policy).unwrap();
    assert!(run.shrunk && run.max_length_increase < 0.0);
    let t_star = -u0.sin().ln();
    assert!(
        (run.final_curve.time - t_star).abs() < 1e-3,
        "{} vs {t_star}",
        run.final_curve.time
    );
    for snap in run.snapshots.iter().filter(|c| c.time < 0.55) {
        let exact = (u0.sin() * snap.time.exp()).asin();
        for p in &snap.samples {
            assert!(
                (p[1] - exact).abs() < 1e-4,
                "t = {}: {} vs {exact}",
                snap.time,
                p[1]
            );
        }
    }
    let lengths: Vec<f64> = run.snapshots.iter().map(|c| c.length).collect();
    assert!(lengths.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn offset_parallel_converges_to_the_neck() {
    let s = dumbbell();
    let c = FlowCurve::parallel(&s, 0.3, 128).unwrap();
    let run = evolve(&s, &c, 50.0, StepPolicy::default()).unwrap();
    assert!(run.converged && run.final_curve.max_abs_kappa() < 1e-3);
    assert!(run.max_length_increase <= 1e-12);
    for snap in &run.snapshots {
        let u = latitude_oracle(&s, 0.3, snap.time);
        assert!(
            snap.samples.iter().all(|p| (p[1] - u).abs() < 1e-4),
            "t = {}",
            snap.time
        );
    }
    assert!(run.final_curve.samples.iter().all(|p| p[1].abs() < 3e-3));
}

#[test]
fn geodesic_curvature_matches_embedded_oracle() {
    let s = dumbbell();
    let curve = |th: f64| [th, 0.5 + 0.2 * th.sin()];
    let c = FlowCurve::from_fn(&s, 1024, 1, curve).unwrap();
    let pos = |th: f64| {
        let p = curve(th);
        s.position(p[0], p[1]).unwrap()
    };
    for (i, k) in c.kappa.iter().enumerate().step_by(37) {
        let th = TAU * i as f64 / 1024.0;
        let d1: Vec<f64> = (0..3)
            .map(|a| central_diff(|t| pos(t)[a], th, 1e-3))
            .collect();
        let d2: Vec<f64> = (0..3)
            .map(|a| central_diff(|t| central_diff(|r| pos(r)[a], t, 1e-3), th, 1e-3))
            .collect();
        let p = curve(th);
        let e1: Vec<f64> = (0..3)
            .map(|a| central_diff(|t| s.position(t, p[1]).unwrap()[a], p[0], 1e-4))
            .collect();
        let e2: Vec<f64> = (0..3)
            .map(|a| central_diff(|t| s.position(p[0], t).unwrap()[a], p[1], 1e-4))
            .collect();
        let cross = |a: &[f64], b: &[f64]| {
            [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let nu = cross(&e1, &e2);
        let nn = (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt();
        let det: f64 = cross(&d1, &d2)
            .iter()
            .zip(&nu)
            .map(|(a, b)| a * b / nn)
            .sum();
        let speed = (d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]).sqrt();
        let oracle = det / speed.powi(3);
        assert!((k - oracle).abs() < 1e-4, "sample {i}: {k} vs {oracle}");
    }
}

#[test]
fn closed_geodesics_are_stationary() {
    let s = RevolutionSurface::unit_sphere();
    let eq = FlowCurve::parallel(&s, 0.0, 256).unwrap();
    let run = evolve(&s, &eq, 1.0, no_stop()).unwrap();
    assert!(sup_drift(&eq, &run.final_curve) < 1e-5);

    let sol = solve_parameters(3, 0.2).unwrap();
    let sph = sol.surface();
    let tr = sol.closed_trace(&sph, ShootOptions::default()).unwrap();
    let c = FlowCurve::from_trace(&sph, &tr, 4.0 * sol.t0, 2048).unwrap();
    assert_eq!(c.winding, 4);
    assert!(c.max_abs_kappa() < 1e-4);
    let run = evolve(
        &sph,
        &c,
        1.0,
        StepPolicy {
            resample_every: usize::MAX,
            ..no_stop()
        },
    )
    .unwrap();
    assert!(
        sup_drift(&c, &run.final_curve) < 1e-5,
        "{}",
        sup_drift(&c, &run.final_curve)
    );
}

#[test]
fn shipped_avoidance_scenarios_stay_disjoint() {
    for sc in shipped_scenarios().unwrap() {
        let rec = avoidance_harness(
            &sc.surface,
            &sc.c1,
            &sc.c2,
            sc.t_end,
            sc.c2_stationary,
            StepPolicy::default(),
        )
        .unwrap();
        assert!(
            rec.min_d > 0.0 && rec.d_min.iter().all(|d| *d > 0.0),
            "{}",
            sc.name
        );
        assert!((rec.times.last().unwrap() - sc.t_end).abs() < 1e-12);
        let (a, b) = &rec.final_curves;
        if sc.c2_stationary {
            assert!(a.samples.iter().all(|p| p[1] > 0.0), "{}", sc.name);
            assert_eq!(b.samples, sc.c2.samples);
        } else {
            assert!(a.samples.iter().all(|p| p[1] > 0.0) && b.samples.iter().all(|p| p[1] < 0.0));
        }
    }
}

#[test]
fn flow_errors() {
    let s = dumbbell();
    let c = FlowCurve::parallel(&s, 0.5, 64).unwrap();
    assert!(matches!(
        avoidance_harness(&s, &c, &c, 1.0, true, StepPolicy::default()),
        Err(FlowError::NotDisjoint(_))
    ));
    assert!(matches!(
        FlowCurve::parallel(&s, 2.5, 64),
        Err(FlowError::Chart { .. })
    ));
    assert!(matches!(
        FlowCurve::parallel(&s, 0.5, 4),
        Err(FlowError::Curve(_))
    ));
    let sphere = RevolutionSurface::unit_sphere();
    let near_pole = FlowCurve::parallel(&sphere, FRAC_PI_2 - 0.05, 64).unwrap();
    let policy = StepPolicy {
        shrink_fraction: 0.0,
        min_dt: 1e-9,
        ..no_stop()
    };
    assert!(matches!(
        evolve(&sphere, &near_pole, 1.0, policy),
        Err(FlowError::Underflow { .. } | FlowError::Chart { .. })
    ));
}
