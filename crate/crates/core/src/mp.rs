//! Marchenko–Pastur law for `H†H` with `H` an `M×N` matrix of `CN(0, 1/N)`
//! entries, and its Stieltjes transform outside the bulk.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Bulk edges `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpSupport {
    pub a: f64,
    pub b: f64,
}

impl MpSupport {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }
}

pub fn mp_edges(alpha: f64) -> Result<MpSupport> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Domain(format!("alpha must be finite and >= 1, got {alpha}")));
    }
    let r = alpha.sqrt();
    // (√α − 1)² loses digits for α near 1; (α − 1)² / (√α + 1)² does not.
    let a = ((alpha - 1.0) / (r + 1.0)).powi(2);
    let b = (r + 1.0).powi(2);
    Ok(MpSupport { a, b })
}

/// `p₀(x) = √((x−a)(b−x)) / (2πx)` on `[a, b]`, zero outside.
///
/// For α = 1 the density has an integrable `x^{-1/2}` wall at the origin and
/// `x = 0` evaluates to `+∞`; quadrature never samples that point.
pub fn mp_density(x: f64, alpha: f64) -> Result<f64> {
    let MpSupport { a, b } = mp_edges(alpha)?;
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    if x < a || x > b {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(((x - a) * (b - x)).sqrt() / (2.0 * PI * x))
}

/// `∫ₐᵇ p₀(x) / (x − c) dx` for `c` outside `[a, b]`.
///
/// Closed form `1/(ζ(c) − c)` with
/// `ζ(c) = [sgn(1+α−c)·√((b−c)(a−c)) + c + α − 1] / 2`.
/// The point `1+α` lies strictly inside the bulk, so the sign is `+` for
/// `c <= a` and `−` for `c >= b`. The edges themselves are included as limits.
pub fn stieltjes_mp(c: f64, alpha: f64) -> Result<f64> {
    let MpSupport { a, b } = mp_edges(alpha)?;
    if !c.is_finite() {
        return Err(Error::Domain(format!("c must be finite, got {c}")));
    }
    if c > a && c < b {
        return Err(Error::Domain(format!(
            "c = {c} lies inside the bulk ({a}, {b}); principal values are not supported"
        )));
    }
    let root = ((b - c) * (a - c)).max(0.0).sqrt();
    // 1/(ζ − c) = 2/(±√((b−c)(a−c)) − c + α − 1). Below the bulk both terms
    // are >= 0, above it both are < 0, so neither branch cancels.
    let sign = if c <= a { 1.0 } else { -1.0 };
    Ok(2.0 / (sign * root - c + alpha - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{mp_integrate_converged, QuadratureRule};

    #[test]
    fn edges_examples() {
        let s = mp_edges(1.0).unwrap();
        assert_eq!((s.a, s.b), (0.0, 4.0));
        let s = mp_edges(2.0).unwrap();
        assert!((s.a - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((s.b - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);
        let s = mp_edges(4.0).unwrap();
        assert_eq!((s.a, s.b), (1.0, 9.0));
        assert!(matches!(mp_edges(0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn density_examples() {
        assert!((mp_density(2.0, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(mp_density(4.0, 1.0).unwrap(), 0.0);
        assert!((mp_density(5.0, 4.0).unwrap() - 4.0 / (10.0 * PI)).abs() < 1e-15);
        assert_eq!(mp_density(10.0, 4.0).unwrap(), 0.0);
        assert_eq!(mp_density(0.0, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn stieltjes_examples() {
        assert!((stieltjes_mp(0.0, 2.0).unwrap() - 1.0).abs() < 1e-14);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((stieltjes_mp(-1.0, 1.0).unwrap() - golden).abs() < 1e-14);
        assert!((stieltjes_mp(4.0, 1.0).unwrap() + 0.5).abs() < 1e-14);
        assert!(stieltjes_mp(2.0, 1.0).is_err());
    }

    #[test]
    fn stieltjes_upper_edge_is_limit_of_quadrature() {
        // c = b + 10^{-k}, k = 2..6, computed by the quadrature oracle.
        let rule = |c: f64| {
            mp_integrate_converged(|x| 1.0 / (x - c), 1.0, 1e-12).unwrap()
        };
        let mut last = 0.0;
        for k in 2..=6 {
            let c = 4.0 + 10f64.powi(-k);
            last = rule(c);
            assert!((last - stieltjes_mp(c, 1.0).unwrap()).abs() < 1e-9);
        }
        assert!((last + 0.5).abs() < 5e-3);
    }

    #[test]
    fn large_c_asymptotics() {
        for &alpha in &[1.0, 2.0, 4.0] {
            let c = 1e8;
            let g = stieltjes_mp(c, alpha).unwrap();
            // −1/c − α/c² − ...
            assert!((g * c + 1.0).abs() < 1e-7);
            let g = stieltjes_mp(-c, alpha).unwrap();
            assert!((g * c - 1.0).abs() < 1e-7);
        }
        let _ = QuadratureRule::new(1.0, 16).unwrap();
    }
}
