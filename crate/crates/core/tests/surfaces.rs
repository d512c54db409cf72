use std::f64::consts::{FRAC_PI_2, PI};
use willmore_geodesics::numerics::QuadratureSpec;
use willmore_geodesics::surfaces::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn metric_examples() {
    let m = RevolutionSurface::unit_sphere().metric_at(0.0).unwrap();
    assert_eq!((m.e, m.f, m.g), (1.0, 0.0, 1.0));
    let m = RevolutionSurface::cylinder(0.3, 2.0)
        .metric_at(1.1)
        .unwrap();
    assert!(close(m.e, 0.09, 1e-15) && m.f == 0.0 && close(m.g, 1.0, 1e-15));
    let b = 4.0;
    for t in [-1.2, -0.3, 0.0, 0.7, 1.5] {
        let m = RevolutionSurface::spheroid(b).metric_at(t).unwrap();
        let (s, c) = f64::sin_cos(t);
        assert!(close(m.e, c * c, 1e-15));
        assert!(close(m.g, s * s + b * b * c * c, 1e-13));
    }
    assert!(matches!(
        RevolutionSurface::unit_sphere().metric_at(2.0),
        Err(SurfaceError::Domain { .. })
    ));
}

#[test]
fn curvature_examples() {
    let s = RevolutionSurface::unit_sphere();
    for u in [-1.5, -0.2, 0.0, 0.9, FRAC_PI_2] {
        let k = s.curvatures_at(u).unwrap();
        assert!(
            close(k.gauss, 1.0, 1e-12) && close(k.mean_abs, 2.0, 1e-12),
            "{u} {k:?}"
        );
    }
    let k = RevolutionSurface::cylinder(0.25, 1.0)
        .curvatures_at(0.5)
        .unwrap();
    assert!(close(k.gauss, 0.0, 1e-15) && close(k.mean_abs, 4.0, 1e-12));
    let cat = RevolutionSurface::catenoid(0.3, -0.5, 0.5);
    for t in [-0.5, -0.1, 0.0, 0.2, 0.5] {
        let k = cat.curvatures_at(t / 0.3).unwrap();
        assert!(k.mean_abs < 1e-12, "{t} {k:?}");
        assert!(k.gauss < 0.0);
    }
}

#[test]
fn energy_closed_forms() {
    let e = RevolutionSurface::unit_sphere()
        .area_and_willmore((-FRAC_PI_2, FRAC_PI_2))
        .unwrap();
    assert!(close(e.area, 4.0 * PI, 1e-8) && close(e.willmore, 4.0 * PI, 1e-8));
    for a in [0.1, 0.7, 2.5] {
        let e = RevolutionSurface::hemisphere(a)
            .area_and_willmore((0.0, FRAC_PI_2))
            .unwrap();
        assert!(
            close(e.area, 2.0 * PI * a * a, 1e-8) && close(e.willmore, 2.0 * PI, 1e-8),
            "{e:?}"
        );
        let h = 1.7;
        let e = RevolutionSurface::cylinder(a, h)
            .area_and_willmore((0.0, h))
            .unwrap();
        assert!(
            close(e.area, 2.0 * PI * a * h, 1e-8) && close(e.willmore, PI * h / (2.0 * a), 1e-8)
        );
    }
    let cat = RevolutionSurface::catenoid(0.2, -0.3, 0.4);
    let e = cat.area_and_willmore(cat.domain()).unwrap();
    assert!(e.willmore.abs() < 1e-8);
    // Area of the catenoid: pi a (t + a sinh(t/a) cosh(t/a)) between the ends.
    let f = |t: f64| PI * 0.2 * (t + 0.2 * (t / 0.2).sinh() * (t / 0.2).cosh());
    assert!(close(e.area, f(0.4) - f(-0.3), 1e-8));
}

#[test]
fn scale_invariance_and_gauss_bonnet() {
    let s = RevolutionSurface::spheroid(3.0);
    let e = s.area_and_willmore(s.domain()).unwrap();
    for lambda in [0.01, 0.5, 7.0] {
        let t = s.scaled(lambda);
        let f = t.area_and_willmore(t.domain()).unwrap();
        assert!((f.willmore - e.willmore).abs() < 1e-10);
        assert!(((f.area / (lambda * lambda) - e.area) / e.area).abs() < 1e-10);
    }
    let k = s
        .total_curvature(s.domain(), &QuadratureSpec::default())
        .unwrap();
    assert!(close(k, 4.0 * PI, 1e-6));
}

#[test]
fn diameter_examples() {
    let s = RevolutionSurface::unit_sphere();
    assert!(close(s.diameter_of(s.domain(), 4096).unwrap(), 2.0, 1e-6));
    let c = RevolutionSurface::cylinder(0.4, 1.5);
    assert!(close(
        c.diameter_of(c.domain(), 128).unwrap(),
        (4.0 * 0.16f64 + 2.25).sqrt(),
        1e-12
    ));
    // Cap above latitude 0.6: chord of the boundary circle, checked against a brute-force 3D maximum.
    let cap = RevolutionSurface::spherical_cap(0.6);
    let d = cap.diameter_of(cap.domain(), 512).unwrap();
    assert!(close(d, 2.0 * 0.6f64.cos(), 1e-6));
    let mut brute = 0.0f64;
    let pts: Vec<[f64; 3]> = (0..40)
        .flat_map(|i| (0..40).map(move |k| (i, k)))
        .map(|(i, k)| {
            cap.position(
                2.0 * PI * k as f64 / 40.0,
                0.6 + (FRAC_PI_2 - 0.6) * i as f64 / 39.0,
            )
            .unwrap()
        })
        .collect();
    for p in &pts {
        for q in &pts {
            brute = brute.max(
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt(),
            );
        }
    }
    assert!(brute <= d + 1e-12 && d - brute < 1e-6);
}

#[test]
fn glued_sphere_catenoid_joins_match_closed_form() {
    for a in [0.2, 0.1, 0.05, 0.02] {
        let g = build_glued_family(&GluedFamilyConfig::sphere_catenoid(a, HeightRule::LITERAL))
            .unwrap();
        match g.joins {
            Joins::SphereCatenoid { phi, tau, .. } => {
                assert!(close(phi.cos(), a.sqrt(), 1e-12), "{a}");
                assert!(close(tau.cosh(), 1.0 / a.sqrt(), 1e-10));
            }
            other => panic!("{other:?}"),
        }
        for (p, d) in &g.join_residuals {
            assert!(*p < 1e-10 && *d < 1e-10);
        }
        let k = g
            .surface
            .total_curvature(g.surface.domain(), &QuadratureSpec::default())
            .unwrap();
        assert!(close(k, 4.0 * PI, 1e-6), "{a} {k}");
        let cyl = RevolutionSurface::cylinder(a, 2.0 * a);
        for i in 1..16 {
            let u = g.neck.0 + (g.neck.1 - g.neck.0) * i as f64 / 16.0;
            assert_eq!(g.surface.metric_at(u).unwrap(), cyl.metric_at(u).unwrap());
        }
    }
}

#[test]
fn glued_energy_limits() {
    for a in [0.2, 0.1, 0.05, 0.02] {
        let lit = build_glued_family(&GluedFamilyConfig::sphere_catenoid(a, HeightRule::LITERAL))
            .unwrap();
        let e = lit.surface.area_and_willmore(lit.surface.domain()).unwrap();
        // sphere cap + catenoid + cylinder + hemisphere in closed form
        let expected = 2.0 * PI * (1.0 + (1.0 - a).sqrt()) + PI + 2.0 * PI;
        assert!(
            close(e.willmore, expected, 1e-8),
            "{a}: {} vs {expected}",
            e.willmore
        );
        let van = build_glued_family(&GluedFamilyConfig::sphere_catenoid(
            a,
            HeightRule::QUADRATIC,
        ))
        .unwrap();
        let e = van.surface.area_and_willmore(van.surface.domain()).unwrap();
        let expected = 2.0 * PI * (1.0 + (1.0 - a).sqrt()) + PI * a + 2.0 * PI;
        assert!(close(e.willmore, expected, 1e-8));
        assert!(e.willmore < 6.0 * PI);
    }
}

#[test]
fn capped_spheroid_keeps_band() {
    let b = 4.0;
    let eps = 0.2;
    let g = build_glued_family(&GluedFamilyConfig::capped_spheroid(eps, b)).unwrap();
    assert_eq!(g.neck, (-eps, eps));
    let sph = RevolutionSurface::spheroid(b);
    for i in 1..20 {
        let u = -eps + 2.0 * eps * i as f64 / 20.0;
        assert_eq!(g.surface.metric_at(u).unwrap(), sph.metric_at(u).unwrap());
    }
    let k = g
        .surface
        .total_curvature(g.surface.domain(), &QuadratureSpec::default())
        .unwrap();
    assert!(close(k, 4.0 * PI, 1e-6));
    assert!(matches!(
        build_glued_family(&GluedFamilyConfig {
            bottom: CapKind::CappedUnitSphereWithCatenoid,
            ..GluedFamilyConfig::capped_spheroid(0.1, 4.0)
        }),
        Err(SurfaceError::Unsupported(_))
    ));
}

#[test]
fn height_rule_parsing() {
    assert_eq!("2a".parse::<HeightRule>().unwrap(), HeightRule::LITERAL);
    assert_eq!("2a^2".parse::<HeightRule>().unwrap(), HeightRule::QUADRATIC);
    assert_eq!(
        "a".parse::<HeightRule>().unwrap(),
        HeightRule {
            factor: 1.0,
            power: 1.0
        }
    );
    assert_eq!(
        "0.5".parse::<HeightRule>().unwrap(),
        HeightRule {
            factor: 0.5,
            power: 0.0
        }
    );
    assert!("2b".parse::<HeightRule>().is_err());
    assert_eq!(
        HeightRule::QUADRATIC
            .to_string()
            .parse::<HeightRule>()
            .unwrap(),
        HeightRule::QUADRATIC
    );
}
