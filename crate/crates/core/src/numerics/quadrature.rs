use super::NumericsError;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    GaussLegendre,
    TanhSinh,
}

/// Quadrature configuration. For Gauss-Legendre, level `l` means `2^l`
/// panels of `order` nodes; for tanh-sinh it means step `2^-l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub order: usize,
    pub max_level: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::tanh_sinh()
    }
}

impl QuadratureSpec {
    pub fn tanh_sinh() -> Self {
        Self {
            scheme: Scheme::TanhSinh,
            order: 1,
            max_level: 10,
            abs_tol: 1e-11,
            rel_tol: 1e-10,
        }
    }

    pub fn gauss_legendre(order: usize) -> Self {
        Self {
            scheme: Scheme::GaussLegendre,
            order,
            max_level: 12,
            abs_tol: 1e-11,
            rel_tol: 1e-10,
        }
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    /// Multiplies both tolerances by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        let (a, r) = (self.abs_tol * factor, self.rel_tol * factor);
        self.with_tol(a, r)
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(NumericsError::Spec("tolerances must be positive".into()));
        }
        if self.scheme == Scheme::GaussLegendre && self.order == 0 {
            return Err(NumericsError::Spec(
                "Gauss-Legendre order must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub level: u32,
    pub evaluations: usize,
}

/// An abscissa together with its distances to both endpoints, computed
/// without cancellation. Integrands singular at an endpoint should use
/// `from_a` / `to_b` instead of `x - a` / `b - x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_a: f64,
    pub to_b: f64,
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn check(x: f64, v: f64) -> Result<f64, NumericsError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::NonFinite { x, value: v })
    }
}

struct TanhSinh {
    c: f64,
    d: f64,
}

impl TanhSinh {
    const T_MAX: f64 = 6.0;

    /// Weight and endpoint complement at node t >= 0.
    fn node(&self, t: f64) -> (f64, f64) {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        let comp = 2.0 * e / (1.0 + e);
        let w = self.d * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        (w, self.d * comp)
    }

    fn pair<F: FnMut(Abscissa) -> Result<f64, NumericsError>>(
        &self,
        t: f64,
        a: f64,
        b: f64,
        f: &mut F,
        evals: &mut usize,
    ) -> Result<f64, NumericsError> {
        let (w, off) = self.node(t);
        if w == 0.0 || off == 0.0 {
            return Ok(0.0);
        }
        let len = 2.0 * self.d;
        let left = Abscissa {
            x: a + off,
            from_a: off,
            to_b: len - off,
        };
        let right = Abscissa {
            x: b - off,
            from_a: len - off,
            to_b: off,
        };
        *evals += 2;
        Ok(w * (f(left)? + f(right)?))
    }

    fn level_sum<F: FnMut(Abscissa) -> Result<f64, NumericsError>>(
        &self,
        level: u32,
        a: f64,
        b: f64,
        f: &mut F,
        evals: &mut usize,
    ) -> Result<f64, NumericsError> {
        let h = 0.5f64.powi(level as i32);
        let mut s = 0.0;
        if level == 0 {
            *evals += 1;
            s += self.d
                * FRAC_PI_2
                * f(Abscissa {
                    x: self.c,
                    from_a: self.d,
                    to_b: self.d,
                })?;
            let mut k = 1;
            while k as f64 * h <= Self::T_MAX {
                s += self.pair(k as f64 * h, a, b, f, evals)?;
                k += 1;
            }
        } else {
            let mut k = 1;
            while k as f64 * h <= Self::T_MAX {
                s += self.pair(k as f64 * h, a, b, f, evals)?;
                k += 2;
            }
        }
        Ok(s * h)
    }
}

fn gl_level<F: FnMut(f64) -> Result<f64, NumericsError>>(
    nodes: &(Vec<f64>, Vec<f64>),
    level: u32,
    a: f64,
    b: f64,
    f: &mut F,
    evals: &mut usize,
) -> Result<f64, NumericsError> {
    let panels = 1usize << level;
    let width = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let mut ps = 0.0;
        for (xi, wi) in nodes.0.iter().zip(&nodes.1) {
            ps += wi * f(mid + 0.5 * width * xi)?;
        }
        s += 0.5 * width * ps;
        *evals += nodes.0.len();
    }
    Ok(s)
}

fn drive<L: FnMut(u32, f64) -> Result<f64, NumericsError>>(
    spec: &QuadratureSpec,
    mut level_value: L,
    evals: &dyn Fn() -> usize,
) -> Result<Estimate, NumericsError> {
    let mut prev = level_value(0, 0.0)?;
    let mut err = f64::INFINITY;
    for level in 1..=spec.max_level {
        let cur = level_value(level, prev)?;
        err = (cur - prev).abs();
        if level >= 3 && err <= spec.abs_tol.max(spec.rel_tol * cur.abs()) {
            return Ok(Estimate {
                value: cur,
                error: err,
                level,
                evaluations: evals(),
            });
        }
        prev = cur;
    }
    Err(NumericsError::NoConvergence {
        best: prev,
        error: err,
    })
}

/// Adaptive integral with endpoint-aware abscissae (tanh-sinh only).
pub fn integrate_endpoint<F: FnMut(Abscissa) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError> {
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::Interval { a, b });
    }
    if spec.scheme != Scheme::TanhSinh {
        return Err(NumericsError::Spec(
            "endpoint integration requires tanh-sinh".into(),
        ));
    }
    let ts = TanhSinh {
        c: 0.5 * (a + b),
        d: 0.5 * (b - a),
    };
    let evals = std::cell::Cell::new(0usize);
    let mut g = |p: Abscissa| check(p.x, f(p));
    drive(
        spec,
        |level, prev| {
            let mut n = evals.get();
            let s = ts.level_sum(level, a, b, &mut g, &mut n)?;
            evals.set(n);
            Ok(if level == 0 { s } else { 0.5 * prev + s })
        },
        &|| evals.get(),
    )
}

/// Adaptive integral returning the value and its error estimate.
pub fn integrate_1d_estimate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError> {
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::Interval { a, b });
    }
    match spec.scheme {
        Scheme::TanhSinh => integrate_endpoint(
            |p| {
                // Nodes that round onto an endpoint carry negligible weight.
                if p.x <= a || p.x >= b {
                    0.0
                } else {
                    f(p.x)
                }
            },
            a,
            b,
            spec,
        ),
        Scheme::GaussLegendre => {
            let nodes = gauss_legendre_nodes(spec.order);
            let evals = std::cell::Cell::new(0usize);
            let mut g = |x: f64| check(x, f(x));
            drive(
                spec,
                |level, _| {
                    let mut n = evals.get();
                    let s = gl_level(&nodes, level, a, b, &mut g, &mut n)?;
                    evals.set(n);
                    Ok(s)
                },
                &|| evals.get(),
            )
        }
    }
}

/// Integral of `f` over [a, b] to the tolerances of `spec`.
pub fn integrate_1d<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    integrate_1d_estimate(f, a, b, spec).map(|e| e.value)
}

/// Values at every level `0..=spec.max_level`, without early exit.
pub fn level_sequence<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>, NumericsError> {
    spec.validate()?;
    if !(a < b) {
        return Err(NumericsError::Interval { a, b });
    }
    let mut out = Vec::new();
    let mut n = 0;
    match spec.scheme {
        Scheme::TanhSinh => {
            let ts = TanhSinh {
                c: 0.5 * (a + b),
                d: 0.5 * (b - a),
            };
            let mut g = |p: Abscissa| {
                if p.x <= a || p.x >= b {
                    Ok(0.0)
                } else {
                    check(p.x, f(p.x))
                }
            };
            let mut prev = 0.0;
            for level in 0..=spec.max_level {
                let s = ts.level_sum(level, a, b, &mut g, &mut n)?;
                prev = if level == 0 { s } else { 0.5 * prev + s };
                out.push(prev);
            }
        }
        Scheme::GaussLegendre => {
            let nodes = gauss_legendre_nodes(spec.order);
            let mut g = |x: f64| check(x, f(x));
            for level in 0..=spec.max_level {
                out.push(gl_level(&nodes, level, a, b, &mut g, &mut n)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre_nodes(n);
            for deg in 0..2 * n {
                let q: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg} {q} {exact}");
            }
        }
    }

    #[test]
    fn polynomial_and_singular() {
        let v = integrate_1d(|x| x * x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = integrate_1d(|x| x * x, 0.0, 1.0, &QuadratureSpec::gauss_legendre(8)).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = integrate_1d(|x| x.powf(-0.5), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn endpoint_offsets_resolve_shifted_singularity() {
        // (x - 3)^{-1/2} on [3, 4]: cancellation in x - a would lose digits.
        let e = integrate_endpoint(
            |p| p.from_a.powf(-0.5),
            3.0,
            4.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((e.value - 2.0).abs() < 1e-11, "{}", e.value);
        let e = integrate_endpoint(
            |p| 1.0 / (p.from_a * p.to_b).sqrt(),
            -2.0,
            5.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((e.value - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn nan_reports_abscissa() {
        let r = integrate_1d(
            |x| if x > 0.5 { f64::NAN } else { x },
            0.0,
            1.0,
            &Default::default(),
        );
        match r {
            Err(NumericsError::NonFinite { x, .. }) => assert!(x > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_convergence_carries_best_estimate() {
        let spec = QuadratureSpec {
            max_level: 3,
            ..QuadratureSpec::gauss_legendre(2)
        };
        match integrate_1d(|x| (40.0 * x).sin(), 0.0, 3.0, &spec) {
            Err(NumericsError::NoConvergence { best, error }) => {
                assert!(best.is_finite() && error > 0.0)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(integrate_1d(|x| x, 1.0, 0.0, &Default::default()).is_err());
        let spec = QuadratureSpec {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate_1d(|x| x, 0.0, 1.0, &spec).is_err());
    }
}
