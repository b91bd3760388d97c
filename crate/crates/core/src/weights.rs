//! Mean eigenvector weights conditioned on the normalized SINR.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mp::mp_edges;
use crate::params::{Receiver, SystemParams};
use crate::ratefn::{self, regime_of, solve_w_for_mass, Regime};

/// Weights below this are treated as the critical point itself.
const CRITICAL_WEIGHT: f64 = 1e-12;

/// `t(x|z) = (s(z) − s(p))/(s(x) − s(p)) = 1/(λ + k·s(x))` for `x` in the bulk.
///
/// Returns `+∞` at a bulk edge that coincides with the pole (critical `z`).
pub fn conditional_weight(x: f64, z: f64, params: &SystemParams) -> Result<f64> {
    let support = mp_edges(params.alpha)?;
    if !support.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x} outside the bulk [{}, {}]",
            support.a, support.b
        )));
    }
    let (lam, k) = ratefn::tilt_parameters(z, params)?;
    Ok(weight_at(x, lam, k, params))
}

#[inline]
fn weight_at(x: f64, lam: f64, k: f64, params: &SystemParams) -> f64 {
    let sx = params.sigma(x);
    let denom = lam * sx + k;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        sx / denom
    }
}

/// Closed-form mean macroscopic weight of the detached eigenvalue,
/// `1 − z((1+ρα)(z−α)+ρα) / ((1+ρz)(z−α)²(z−α+1))` (ZF: `1 − α/(z−α)²`).
pub fn detached_weight_closed_form(z: f64, params: &SystemParams) -> f64 {
    let alpha = params.alpha;
    let d = z - alpha;
    match params.receiver {
        Receiver::Mmse => {
            let rho = params.rho;
            1.0 - z * ((1.0 + rho * alpha) * d + rho * alpha)
                / ((1.0 + rho * z) * d * d * (d + 1.0))
        }
        Receiver::Zf => 1.0 - alpha / (d * d),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetachedWeight {
    /// Position of the detached eigenvalue.
    pub y: f64,
    /// Closed-form mean weight `T = E[t_y]/N`.
    pub weight: f64,
    /// Condensation scale; `−∞` exactly at a critical point.
    pub w: f64,
    /// `1 − 1/w + 1/(eʷ − 1)` with `w` root-found from the bulk integral.
    pub weight_from_w: f64,
}

/// Detached eigenvalue data for `|z − α| >= √α`.
///
/// At the critical points `T = 0`, `y` is the bulk edge and `w = −∞`.
pub fn detached_weight(z: f64, params: &SystemParams) -> Result<DetachedWeight> {
    let regime = regime_of(z, params.alpha)?;
    let (lo, hi) = ratefn::critical_points(params.alpha);
    let on_edge = z == lo || z == hi;
    if regime == Regime::Inner && !on_edge {
        return Err(Error::Domain(format!(
            "z = {z} is in the inner regime; no eigenvalue detaches"
        )));
    }
    let y = ratefn::pole_location(z, params.alpha)?;
    let weight = detached_weight_closed_form(z, params);
    if on_edge || weight.abs() <= CRITICAL_WEIGHT {
        return Ok(DetachedWeight { y, weight: weight.max(0.0), w: f64::NEG_INFINITY, weight_from_w: 0.0 });
    }
    let mass = ratefn::bulk_mass(z, params)?;
    let w = solve_w_for_mass(mass)?;
    Ok(DetachedWeight { y, weight, w, weight_from_w: ratefn::detached_weight_from_w(w) })
}

/// Conditional weight profile over the bulk, on Chebyshev nodes so that the
/// edges are sampled densely.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightProfile {
    pub z: f64,
    pub regime: Regime,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub detached: Option<DetachedWeight>,
}

/// Chebyshev points of the first kind on `[a, b]`, ascending; no endpoint.
pub fn chebyshev_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    (0..n)
        .map(|j| {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            m - h * theta.cos()
        })
        .collect()
}

pub fn weight_profile(z: f64, params: &SystemParams, grid_size: usize) -> Result<WeightProfile> {
    if grid_size < 2 {
        return Err(Error::Domain("grid_size must be >= 2".into()));
    }
    let regime = regime_of(z, params.alpha)?;
    let support = mp_edges(params.alpha)?;
    let (lam, k) = ratefn::tilt_parameters(z, params)?;
    let xs = chebyshev_nodes(support.a, support.b, grid_size);
    let ts = xs.iter().map(|&x| weight_at(x, lam, k, params)).collect();
    let detached = if regime.is_outer() {
        Some(detached_weight(z, params)?)
    } else {
        None
    };
    Ok(WeightProfile { z, regime, xs, ts, detached })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::mp_integrate_converged;
    use crate::ratefn::{critical_points, ergodic_stats};

    fn zf(alpha: f64) -> SystemParams {
        SystemParams::asymptotic(alpha, 1.0, Receiver::Zf).unwrap()
    }

    fn mmse(alpha: f64, rho: f64) -> SystemParams {
        SystemParams::asymptotic(alpha, rho, Receiver::Mmse).unwrap()
    }

    #[test]
    fn conditional_weight_examples() {
        let p = mmse(2.0, 3.0);
        let z_erg = ergodic_stats(&p).z_erg;
        for x in [0.2, 1.0, 5.0] {
            assert!((conditional_weight(x, z_erg, &p).unwrap() - 1.0).abs() < 1e-12);
        }
        let p = zf(2.0);
        let s = mp_edges(2.0).unwrap();
        let tb = conditional_weight(s.b, 2.5, &p).unwrap();
        assert!((tb - 2.0 * s.b / (7.5 - s.b)).abs() < 1e-12);
        assert!((tb - 6.973_584_234_383_089).abs() < 1e-10);
        let ta = conditional_weight(s.a, 2.5, &p).unwrap();
        assert!((ta - 0.046_824).abs() < 1e-6);
        assert!(conditional_weight(s.b + 0.1, 2.5, &p).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert!((detached_weight_closed_form(3.0, &mmse(1.0, 1.0)) - 0.6875).abs() < 1e-15);
        assert!((detached_weight_closed_form(3.0, &zf(1.0)) - 0.75).abs() < 1e-15);
        for &alpha in &[1.0, 2.0, 4.0] {
            let (lo, hi) = critical_points(alpha);
            for p in [zf(alpha), mmse(alpha, 1.0), mmse(alpha, 10.0)] {
                assert!(detached_weight_closed_form(hi, &p).abs() < 1e-12);
                if alpha > 1.0 {
                    assert!(detached_weight_closed_form(lo, &p).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn detached_examples() {
        let d = detached_weight(3.0, &zf(1.0)).unwrap();
        assert_eq!(d.y, 4.5);
        assert!((d.weight - 0.75).abs() < 1e-15);
        assert!((d.weight_from_w - d.weight).abs() < 1e-6);
        let (_, hi) = critical_points(2.0);
        let d = detached_weight(hi, &zf(2.0)).unwrap();
        assert_eq!(d.weight, 0.0);
        assert_eq!(d.w, f64::NEG_INFINITY);
        assert!((d.y - mp_edges(2.0).unwrap().b).abs() < 1e-12);
        assert!(matches!(detached_weight(2.0, &zf(2.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn detached_low_side_below_half() {
        // ZF α = 2, z = 0.3: T ≈ 0.3080 < 1/2, so w < 0.
        let d = detached_weight(0.3, &zf(2.0)).unwrap();
        assert!(d.w < 0.0);
        assert!((d.weight - 0.307_958_477_508_650_5).abs() < 1e-12);
        assert!((d.weight_from_w - d.weight).abs() < 1e-6);
    }

    #[test]
    fn profile_normalization_and_mean() {
        for p in [zf(2.0), mmse(2.0, 1.0), mmse(4.0, 10.0)] {
            for &z in &[0.3, 0.9, 1.8, 2.9, 4.0, 8.0] {
                let (lam, k) = ratefn::tilt_parameters(z, &p).unwrap();
                let mass = mp_integrate_converged(|x| weight_at(x, lam, k, &p), p.alpha, 1e-12).unwrap();
                let mean = mp_integrate_converged(
                    |x| weight_at(x, lam, k, &p) * p.s_unchecked(x),
                    p.alpha,
                    1e-12,
                )
                .unwrap();
                let regime = regime_of(z, p.alpha).unwrap();
                if regime.is_outer() {
                    let d = detached_weight(z, &p).unwrap();
                    assert!((mass + d.weight - 1.0).abs() < 1e-6, "{z}");
                    let target = p.s_unchecked(z) - d.weight * p.s_unchecked(d.y);
                    assert!((mean - target).abs() < 1e-6, "{z}");
                } else {
                    assert!((mass - 1.0).abs() < 1e-6, "{z}");
                    assert!((mean - p.s_unchecked(z)).abs() < 1e-6, "{z}");
                }
            }
        }
    }

    #[test]
    fn profile_shapes() {
        let p = mmse(2.0, 1.0);
        let z_erg = ergodic_stats(&p).z_erg;
        let prof = weight_profile(z_erg, &p, 64).unwrap();
        assert!(prof.detached.is_none());
        assert!(prof.ts.iter().all(|t| (t - 1.0).abs() < 1e-12));

        // Near-edge divergence approaching the upper critical point.
        let (_, hi) = critical_points(2.0);
        let prof = weight_profile(hi, &zf(2.0), 64).unwrap();
        assert!(*prof.ts.last().unwrap() > 10.0);
        let s = mp_edges(2.0).unwrap();
        assert_eq!(conditional_weight(s.b, hi, &zf(2.0)).unwrap(), f64::INFINITY);

        let prof = weight_profile(3.0, &zf(1.0), 32).unwrap();
        let d = prof.detached.unwrap();
        assert_eq!(d.y, 4.5);
        assert!((d.weight - 0.75).abs() < 1e-15);
        assert!((d.w - 3.593_511_969_447_426).abs() < 1e-8);
    }

    #[test]
    fn mmse_profiles_approach_zf() {
        let big = mmse(2.0, 1e6);
        let z = 2.5;
        let a = weight_profile(z, &big, 40).unwrap();
        let b = weight_profile(z, &zf(2.0), 40).unwrap();
        for (ta, tb) in a.ts.iter().zip(&b.ts) {
            assert!((ta - tb).abs() < 1e-4);
        }
    }
}
