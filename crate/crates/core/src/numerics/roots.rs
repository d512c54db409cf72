use super::NumericsError;

pub const MAX_ROOT_ITERATIONS: usize = 200;

/// Brent's method on a sign-changing bracket.
pub fn find_root<F: FnMut(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    find_root_with(f, lo, hi, tol, MAX_ROOT_ITERATIONS)
}

pub fn find_root_with<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64, NumericsError> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(NumericsError::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(NumericsError::RootNoConvergence {
        lo: b.min(c),
        hi: b.max(c),
    })
}

/// Result of a damped Newton solve in two unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solve2d {
    pub x: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton iteration for `F(x) = 0` in two unknowns, with a
/// central-difference Jacobian and residual-halving line search.
pub fn solve_2d<F: Fn([f64; 2]) -> [f64; 2]>(
    f: F,
    x0: [f64; 2],
    tol: f64,
) -> Result<Solve2d, NumericsError> {
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    let mut x = x0;
    let mut fx = f(x);
    let mut r = norm(fx);
    for it in 0..100 {
        if r <= tol {
            return Ok(Solve2d {
                x,
                residual: r,
                iterations: it,
            });
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * (1.0 + x[j].abs());
            let (mut xp, mut xm) = (x, x);
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(xp), f(xm));
            for i in 0..2 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = [
            (jac[1][1] * fx[0] - jac[0][1] * fx[1]) / det,
            (jac[0][0] * fx[1] - jac[1][0] * fx[0]) / det,
        ];
        let mut lambda = 1.0;
        loop {
            let xn = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            let fnew = f(xn);
            let rn = norm(fnew);
            if rn.is_finite() && (rn < r || lambda < 1e-6) {
                x = xn;
                fx = fnew;
                r = rn;
                break;
            }
            lambda *= 0.5;
        }
    }
    if r <= tol {
        Ok(Solve2d {
            x,
            residual: r,
            iterations: 100,
        })
    } else {
        Err(NumericsError::Newton {
            residual: r,
            iterations: 100,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_roots() {
        let r = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let r = find_root(f64::cos, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn bracket_error() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(NumericsError::Bracket { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_bracket() {
        match find_root_with(|x| x - 0.3, 0.0, 1.0, 1e-15, 2) {
            Err(NumericsError::RootNoConvergence { lo, hi }) => {
                assert!(lo <= 0.3 + 1e-9 && hi >= 0.3 - 1e-9)
            }
            Ok(_) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn newton_2d() {
        let s = solve_2d(
            |x| [x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]],
            [1.0, 0.2],
            1e-14,
        )
        .unwrap();
        assert!((s.x[0] - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
