//! wasm-bindgen front end for the static page in `www/`.
//!
//! Each export returns a JSON string; errors become JS exceptions. The
//! `*_json` functions hold the logic so they can be tested natively.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;
use willmore_geodesics::figures::{geodesic_svg, FigureStyle};
use willmore_geodesics::geodesic::ShootOptions;
use willmore_geodesics::graph::toro_curvature;
use willmore_geodesics::spheroid::solve_for_geodesic;
use willmore_geodesics::surfaces::{build_glued_family, GluedFamilyConfig, HeightRule};

#[derive(Serialize)]
struct Piece {
    name: String,
    area: f64,
    willmore: f64,
}

/// Solves for the spheroid with an N-crossing closed geodesic and draws it.
pub fn spheroid_json(n: u32, eps: f64, azimuth: f64, elevation: f64) -> Result<String, String> {
    let sol = solve_for_geodesic(n, eps).map_err(|e| e.to_string())?;
    let s = sol.surface();
    let tr = sol
        .closed_trace(&s, ShootOptions::default())
        .map_err(|e| e.to_string())?;
    let style = FigureStyle {
        azimuth,
        elevation,
        ..Default::default()
    };
    let svg = geodesic_svg(&s, &tr, &style).map_err(|e| e.to_string())?;
    let v = sol.verified.unwrap();
    Ok(json!({
        "N": n,
        "eps": eps,
        "b": sol.b,
        "c": sol.c,
        "length": sol.length,
        "crossings": v.crossings,
        "closure_defect": v.closure_position_defect.max(v.closure_tangent_defect),
        "svg": svg,
    })
    .to_string())
}

/// Per-piece area and Willmore energy of the sphere-catenoid-cylinder
/// surface with neck radius `a`.
pub fn glued_json(a: f64, height_rule: &str) -> Result<String, String> {
    let rule: HeightRule = height_rule.parse()?;
    let g = build_glued_family(&GluedFamilyConfig::sphere_catenoid(a, rule))
        .map_err(|e| e.to_string())?;
    let mut pieces = Vec::new();
    for p in &g.pieces {
        let e = g
            .surface
            .area_and_willmore((p.lo, p.hi))
            .map_err(|e| e.to_string())?;
        pieces.push(Piece {
            name: p.name.clone(),
            area: e.area,
            willmore: e.willmore,
        });
    }
    let area: f64 = pieces.iter().map(|p| p.area).sum();
    let willmore: f64 = pieces.iter().map(|p| p.willmore).sum();
    Ok(json!({
        "a": a,
        "height": rule.height(a),
        "pieces": pieces,
        "area": area,
        "willmore": willmore,
        "willmore_over_pi": willmore / std::f64::consts::PI,
    })
    .to_string())
}

/// Gauss curvature and derivatives of the Toro graph at (x, y).
pub fn toro_json(x: f64, y: f64) -> Result<String, String> {
    let (k, du, d2) = toro_curvature(x, y).map_err(|e| e.to_string())?;
    Ok(json!({"x": x, "y": y, "K": k, "grad": du, "hessian": d2}).to_string())
}

#[wasm_bindgen]
pub fn solve_spheroid(n: u32, eps: f64, azimuth: f64, elevation: f64) -> Result<String, JsError> {
    spheroid_json(n, eps, azimuth, elevation).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn glued_energy(a: f64, height_rule: &str) -> Result<String, JsError> {
    glued_json(a, height_rule).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn toro_gauss(x: f64, y: f64) -> Result<String, JsError> {
    toro_json(x, y).map_err(|e| JsError::new(&e))
}
