use super::{integrate_endpoint, NumericsError, QuadratureSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Modulus `k` of a complete elliptic integral, restricted to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self, NumericsError> {
        if (0.0..1.0).contains(&k) {
            Ok(Self(k))
        } else {
            Err(NumericsError::Modulus(k))
        }
    }

    pub fn k(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for EllipticModulus {
    type Error = NumericsError;
    fn try_from(k: f64) -> Result<Self, Self::Error> {
        Self::new(k)
    }
}

impl From<EllipticModulus> for f64 {
    fn from(m: EllipticModulus) -> f64 {
        m.0
    }
}

/// Complete elliptic integral of the first kind by the arithmetic-geometric mean.
pub fn elliptic_k(m: EllipticModulus) -> f64 {
    let k = m.0;
    let mut a = 1.0;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    if k == 0.0 {
        return FRAC_PI_2;
    }
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    PI / (a + b)
}

/// K(k) from its defining integral, for cross-checking the AGM value.
pub fn elliptic_k_by_quadrature(
    m: EllipticModulus,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    let k2 = m.0 * m.0;
    integrate_endpoint(
        |p| 1.0 / (1.0 - k2 * p.x.sin().powi(2)).sqrt(),
        0.0,
        FRAC_PI_2,
        spec,
    )
    .map(|e| e.value)
}
