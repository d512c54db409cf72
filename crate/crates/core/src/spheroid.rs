//! Closure integral on spheroids and the solver for closed geodesics with a
//! prescribed number of self-intersections.

use crate::geodesic::{
    closure_at, detect_self_intersections, shoot_with, GeodesicError, GeodesicState, GeodesicTrace,
    ShootOptions, CLOSURE_TOL,
};
use crate::numerics::{
    elliptic_k, find_root, integrate_endpoint, EllipticModulus, NumericsError, QuadratureSpec,
    ROOT_TOL,
};
use crate::surfaces::RevolutionSurface;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Relative margin in the rule `c = cos(eps (1 - margin))`.
pub const C_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid arguments: {0}")]
    Arguments(String),
    #[error("no sign change of I_c - (N+1)pi in b; scanned (c, I_c(lo), I_c(hi)): {scanned:?}")]
    Bracket { scanned: Vec<(f64, f64, f64)> },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("verification failed: {0}")]
    Verification(String),
}

/// I_c for the spheroid `(cos t, b sin t)`.
pub fn eval_ic(b: f64, c: f64) -> Result<f64, SolverError> {
    eval_ic_with(b, c, &QuadratureSpec::default())
}

pub fn eval_ic_with(b: f64, c: f64, spec: &QuadratureSpec) -> Result<f64, SolverError> {
    if !(b >= 1.0) || !(c > 0.0 && c < 1.0) {
        return Err(SolverError::Arguments(format!(
            "need b >= 1 and 0 < c < 1, got b = {b}, c = {c}"
        )));
    }
    let bb = b * b - 1.0;
    let e = integrate_endpoint(
        |p| {
            let y = p.x;
            (bb + 1.0 / (y * y)).sqrt() / (p.from_a * (y + c) * p.to_b * (1.0 + y)).sqrt()
        },
        c,
        1.0,
        spec,
    )?;
    Ok(2.0 * c * e.value)
}

/// The lower and upper elliptic bounds `2cbK(k')` and `2 sqrt(c^2(b^2-1)+1) K(k')`.
pub fn ic_bounds(b: f64, c: f64) -> Result<(f64, f64), SolverError> {
    let k = elliptic_k(EllipticModulus::new(((1.0 - c) * (1.0 + c)).sqrt())?);
    Ok((
        2.0 * c * b * k,
        2.0 * (c * c * (b * b - 1.0) + 1.0).sqrt() * k,
    ))
}

/// Quarter period `t0`: arc length from the equator to the turning latitude.
pub fn quarter_period(b: f64, c: f64) -> Result<f64, SolverError> {
    let um = c.acos();
    let e = integrate_endpoint(
        |p| {
            let u = p.x;
            let (s, cs) = u.sin_cos();
            let gamma = (s * s + b * b * cs * cs).sqrt();
            // cos u - cos um without cancellation.
            let diff = 2.0 * (0.5 * (um + u)).sin() * (0.5 * p.to_b).sin();
            gamma * cs / (diff * (cs + c)).sqrt()
        },
        0.0,
        um,
        &QuadratureSpec::default(),
    )?;
    Ok(e.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub closure_position_defect: f64,
    pub closure_tangent_defect: f64,
    pub crossings: usize,
    /// Crossing count after halving the integrator tolerance and step cap.
    pub crossings_refined: usize,
    pub max_multiplicity: usize,
    pub clairaut_drift: f64,
    pub speed_drift: f64,
    /// |u1(t0) - u1(0) - I_c/2|.
    pub half_increment_residual: f64,
    /// |t0(trace) - t0(quadrature)|.
    pub t0_residual: f64,
    pub max_u2: f64,
    pub min_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpheroidSolution {
    pub n: u32,
    pub eps: f64,
    pub b: f64,
    pub c: f64,
    pub t0: f64,
    pub length: f64,
    pub ic: f64,
    pub verified: Option<Verification>,
}

impl SpheroidSolution {
    pub fn surface(&self) -> RevolutionSurface {
        RevolutionSurface::spheroid(self.b)
    }

    pub fn initial_state(&self, s: &RevolutionSurface) -> Result<GeodesicState, GeodesicError> {
        GeodesicState::from_clairaut(s, 0.0, 0.0, self.c, true)
    }

    pub fn invariants_hold(&self) -> bool {
        let n1 = self.n as f64 + 1.0;
        let e = self.eps;
        n1 < self.b
            && self.b < n1 + e
            && 1.0 - e < self.c
            && self.c < 1.0
            && self.c.acos() < e
            && 2.0 * n1 * PI * (1.0 - e) <= self.length
            && self.length <= 2.0 * n1 * PI / (1.0 - e)
    }

    /// Closed trace of the solution on `s` (the spheroid or any surface
    /// containing its band), with closure and crossings filled in.
    pub fn closed_trace(
        &self,
        s: &RevolutionSurface,
        opts: ShootOptions,
    ) -> Result<GeodesicTrace, GeodesicError> {
        let init = self.initial_state(s)?;
        let period = 4.0 * self.t0;
        let mut tr = shoot_with(s, init, period + 0.5, opts)?;
        tr.closure = Some(closure_at(&tr, period)?);
        let rep = detect_self_intersections(&tr)?;
        tr.crossings = rep.crossings;
        Ok(tr)
    }
}

/// Finds (b, c) with I_c = (N+1)pi, without verification.
pub fn solve_parameters(n: u32, eps: f64) -> Result<SpheroidSolution, SolverError> {
    if n == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(SolverError::Arguments(format!(
            "need N >= 1 and 0 < eps < 1, got N = {n}, eps = {eps}"
        )));
    }
    let target = (n as f64 + 1.0) * PI;
    let (lo, hi) = (n as f64 + 1.0, n as f64 + 1.0 + eps);
    let mut c = (eps * (1.0 - C_MARGIN)).cos();
    let mut scanned = Vec::new();
    for _ in 0..60 {
        let (flo, fhi) = (eval_ic(lo, c)?, eval_ic(hi, c)?);
        scanned.push((c, flo, fhi));
        if (flo - target) * (fhi - target) < 0.0 {
            let b = find_root(
                |b| eval_ic(b, c).map(|v| v - target).unwrap_or(f64::NAN),
                lo,
                hi,
                ROOT_TOL,
            )?;
            let ic = eval_ic(b, c)?;
            let t0 = quarter_period(b, c)?;
            return Ok(SpheroidSolution {
                n,
                eps,
                b,
                c,
                t0,
                length: 4.0 * t0,
                ic,
                verified: None,
            });
        }
        c = 0.5 * (1.0 + c);
    }
    Err(SolverError::Bracket { scanned })
}

/// Solves for (b, c) and verifies closure and crossing count along the
/// shot geodesic.
pub fn solve_for_geodesic(n: u32, eps: f64) -> Result<SpheroidSolution, SolverError> {
    let mut sol = solve_parameters(n, eps)?;
    sol.verified = Some(verify(&sol, ShootOptions::default())?);
    Ok(sol)
}

pub fn verify(sol: &SpheroidSolution, opts: ShootOptions) -> Result<Verification, SolverError> {
    let s = sol.surface();
    let tr = sol.closed_trace(&s, opts)?;
    let closure = tr.closure.unwrap();
    let rep = detect_self_intersections(&tr)?;
    let fine = ShootOptions {
        tol: opts.tol * 0.5,
        h_max: opts.h_max * 0.5,
    };
    let rep_fine = detect_self_intersections(&sol.closed_trace(&s, fine)?)?;
    let top = tr.first_u2_maximum()?;
    let v = Verification {
        closure_position_defect: closure.position_defect,
        closure_tangent_defect: closure.tangent_defect,
        crossings: rep.points.len(),
        crossings_refined: rep_fine.points.len(),
        max_multiplicity: rep.max_multiplicity(),
        clairaut_drift: tr.clairaut_drift(),
        speed_drift: tr.speed_drift(),
        half_increment_residual: (top.u1 - tr.states[0].u1 - 0.5 * sol.ic).abs(),
        t0_residual: (top.t - sol.t0).abs(),
        max_u2: top.u2,
        min_angle: rep
            .crossings
            .iter()
            .map(|c| c.angle)
            .fold(f64::INFINITY, f64::min),
    };
    if v.closure_position_defect.max(v.closure_tangent_defect) >= CLOSURE_TOL {
        return Err(SolverError::Verification(format!(
            "closure defect {:e}",
            closure.defect()
        )));
    }
    if v.crossings != sol.n as usize || v.crossings_refined != v.crossings || v.max_multiplicity > 1
    {
        return Err(SolverError::Verification(format!(
            "expected {} crossings, found {} (refined {}, multiplicity {})",
            sol.n, v.crossings, v.crossings_refined, v.max_multiplicity
        )));
    }
    Ok(v)
}
