use std::f64::consts::PI;
use willmore_geodesics::geodesic::*;
use willmore_geodesics::spheroid::solve_parameters;
use willmore_geodesics::surfaces::{build_glued_family, GluedFamilyConfig, RevolutionSurface};
use willmore_geodesics::tiling::*;

fn equator() -> (RevolutionSurface, GeodesicTrace) {
    let s = RevolutionSurface::unit_sphere();
    let init = GeodesicState {
        t: 0.0,
        u1: 0.0,
        u2: 0.0,
        du1: 1.0,
        du2: 0.0,
    };
    let mut tr = shoot(&s, init, 7.0, 1e-12).unwrap();
    tr.closure = Some(closure_at(&tr, 2.0 * PI).unwrap());
    (s, tr)
}

#[test]
fn equator_splits_into_hemispheres() {
    let (s, tr) = equator();
    let t = decompose_regions(&s, &tr, TilingOptions::default()).unwrap();
    assert_eq!(t.regions.len(), 2);
    for r in &t.regions {
        assert!((r.area - 2.0 * PI).abs() < 1e-6, "{}", r.area);
        let gb = region_gauss_bonnet(r, None);
        assert!(r.corners.is_empty());
        assert!(gb.residual < 1e-6);
        assert!((r.boundary_length - 2.0 * PI).abs() < 1e-6);
    }
    let w = s.area_and_willmore(s.domain()).unwrap().willmore;
    for a in complement_energy_audit(&t.regions, w, None, 1e-6) {
        assert!(a.pass && (a.lhs - 2.0 * PI).abs() < 1e-6, "{a:?}");
    }
}

fn check_tiling(
    s: &RevolutionSurface,
    tr: &GeodesicTrace,
    n: usize,
    opts: TilingOptions,
) -> Tiling {
    let t = decompose_regions(s, tr, opts).unwrap();
    assert_eq!(t.regions.len(), n + 2);
    assert_eq!(t.crossings.points.len(), n);
    let xi = t.xi();
    let e = s.area_and_willmore(s.domain()).unwrap();
    let (area, w) = (e.area, e.willmore);
    let sum_area: f64 = t.regions.iter().map(|r| r.area).sum();
    let sum_k: f64 = t.regions.iter().map(|r| r.kda).sum();
    let sum_w: f64 = t.regions.iter().map(|r| r.willmore).sum();
    assert!(((sum_area - area) / area).abs() < 1e-3);
    assert!((sum_k - 4.0 * PI).abs() < 1e-2);
    assert!(((sum_w - w) / w).abs() < 1e-3);
    let bl: f64 = t.regions.iter().map(|r| r.boundary_length).sum();
    let l = trace_length(tr, (0.0, t.crossings.period)).unwrap().nominal;
    assert!(
        ((bl - 2.0 * l) / (2.0 * l)).abs() < 1e-3,
        "{bl} vs {}",
        2.0 * l
    );
    for r in &t.regions {
        let gb = region_gauss_bonnet(r, Some(xi));
        assert!(gb.residual < 1e-3, "region {}: {gb:?}", r.id);
        assert!(gb.below_two_pi);
        assert!(gb.min_exterior >= -ANGLE_TOL || r.corners.is_empty());
        assert!(gb.kda <= gb.remark_bound.unwrap() + 1e-3);
    }
    for (sec, p) in t.sectors.iter().zip(&t.crossings.points) {
        let th = t.crossings.crossings[p.pairs[0]].angle;
        assert!((sec.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-6);
        let alt = [th, PI - th];
        let ok = |off: usize| (0..4).all(|i| (sec[i] - alt[(i + off) % 2]).abs() < 1e-6);
        assert!(ok(0) || ok(1), "{sec:?} vs {th}");
    }
    for a in complement_energy_audit(&t.regions, w, Some(xi), 1e-3) {
        assert!(a.pass, "{a:?}");
    }
    t
}

#[test]
fn spheroid_tilings_have_n_plus_two_regions() {
    for (n, eps) in [(3, 0.2), (4, 0.2), (3, 0.1), (4, 0.1)] {
        let sol = solve_parameters(n, eps).unwrap();
        let s = sol.surface();
        let tr = sol.closed_trace(&s, ShootOptions::default()).unwrap();
        check_tiling(&s, &tr, n as usize, TilingOptions::default());
    }
}

#[test]
fn refinement_keeps_curvature_integrals() {
    let sol = solve_parameters(3, 0.2).unwrap();
    let s = sol.surface();
    let tr = sol.closed_trace(&s, ShootOptions::default()).unwrap();
    let coarse = check_tiling(&s, &tr, 3, TilingOptions::default());
    let fine = check_tiling(
        &s,
        &tr,
        3,
        TilingOptions {
            n1: 4096,
            n2: 2048,
            ..Default::default()
        },
    );
    let mut a: Vec<f64> = coarse.regions.iter().map(|r| r.kda).collect();
    let mut b: Vec<f64> = fine.regions.iter().map(|r| r.kda).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-3, "{x} vs {y}");
    }
}

#[test]
fn capped_spheroid_complements() {
    let sol = solve_parameters(3, 0.2).unwrap();
    let g = build_glued_family(&GluedFamilyConfig::capped_spheroid(0.2, sol.b)).unwrap();
    let tr = sol
        .closed_trace(&g.surface, ShootOptions::default())
        .unwrap();
    check_tiling(&g.surface, &tr, 3, TilingOptions::default());
}

#[test]
fn open_surface_rejected() {
    let (_, tr) = equator();
    let cyl = RevolutionSurface::cylinder(1.0, 1.0);
    assert!(matches!(
        decompose_regions(&cyl, &tr, TilingOptions::default()),
        Err(TilingError::NotSphere)
    ));
}
