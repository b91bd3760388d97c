//! Saddle point of the tilted weight problem and the large-deviation rate
//! function of the normalized SINR `z`.
//!
//! Inside `|z − α| <= √α` every eigenvector weight stays `O(1)` and the saddle
//! is fixed by a fictitious charge `c` outside the bulk. Outside that window
//! one extreme eigenvalue detaches to `y` and carries a macroscopic weight.
//! Both `c` and `y` are `z(1 + 1/(z − α))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mp::mp_edges;
use crate::params::{Receiver, SystemParams};
use crate::quad::mp_integrate_converged;
use crate::roots::{find_root, DEFAULT_TOL};
use crate::weights;

/// Tolerance used for bulk integrals whose integrand may have a pole close to
/// an edge.
pub(crate) const BULK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Inner,
    /// `z < α − √α`: the smallest eigenvalue detaches.
    OuterLow,
    /// `z > α + √α`: the largest eigenvalue detaches.
    OuterHigh,
}

impl Regime {
    pub fn is_outer(self) -> bool {
        self != Regime::Inner
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Inner => "inner",
            Regime::OuterLow => "outer_low",
            Regime::OuterHigh => "outer_high",
        })
    }
}

fn check_z(z: f64) -> Result<()> {
    if z.is_finite() && z > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("z must be finite and > 0, got {z}")))
    }
}

/// Critical values `α ∓ √α` of `z`.
pub fn critical_points(alpha: f64) -> (f64, f64) {
    let r = alpha.sqrt();
    (alpha - r, alpha + r)
}

/// Boundary points `|z − α| = √α` count as inner.
pub fn regime_of(z: f64, alpha: f64) -> Result<Regime> {
    check_z(z)?;
    mp_edges(alpha)?;
    let (lo, hi) = critical_points(alpha);
    Ok(if z < lo {
        Regime::OuterLow
    } else if z > hi {
        Regime::OuterHigh
    } else {
        Regime::Inner
    })
}

/// `z(1 + 1/(z − α))`: the resonance `c` (inner) or the detached eigenvalue
/// `y` (outer). Undefined at `z = α`, where the pole sits at infinity.
pub fn pole_location(z: f64, alpha: f64) -> Result<f64> {
    check_z(z)?;
    mp_edges(alpha)?;
    if z == alpha {
        return Err(Error::Domain(format!(
            "z = alpha = {alpha}: k = 0 point, the pole is at infinity"
        )));
    }
    Ok(z * (z - alpha + 1.0) / (z - alpha))
}

/// Tilt multipliers `(λ, k)` with `λ + k·s(z) = 1`.
///
/// These are `λ = s(p)/(s(p) − s(z))`, `k = 1/(s(z) − s(p))` with `p` the
/// pole, reduced to forms that stay finite at `z = α`:
///
/// * MMSE: `λ = (1+ρz)(α−z)/(ρz)`, `k = (1+ρz)[(z−α+1) + (z−α)/(ρz)]`
/// * ZF: `λ = α − z`, `k = z(z−α+1)`
///
/// The outer regime uses the same expressions to leading order.
pub fn tilt_parameters(z: f64, params: &SystemParams) -> Result<(f64, f64)> {
    check_z(z)?;
    let alpha = params.alpha;
    Ok(match params.receiver {
        Receiver::Mmse => {
            let rho = params.rho;
            let lam = (1.0 + rho * z) * (alpha - z) / (rho * z);
            let k = (1.0 + rho * z) * ((z - alpha + 1.0) + (z - alpha) / (rho * z));
            (lam, k)
        }
        Receiver::Zf => (alpha - z, z * (z - alpha + 1.0)),
    })
}

/// Right-hand side of the condensation equation, `1/w − 1/(eʷ − 1)`.
///
/// Strictly decreasing on all of ℝ from 1 (w → −∞) to 0 (w → +∞), with value
/// 1/2 at the removable point `w = 0`.
pub fn condensation_mass(w: f64) -> f64 {
    if w.abs() < 1e-4 {
        0.5 - w / 12.0 + w.powi(3) / 720.0
    } else {
        1.0 / w - 1.0 / w.exp_m1()
    }
}

/// Macroscopic weight `1 − 1/w + 1/(eʷ − 1)` of the detached eigenvalue.
pub fn detached_weight_from_w(w: f64) -> f64 {
    if w == f64::NEG_INFINITY {
        return 0.0;
    }
    1.0 - condensation_mass(w)
}

/// Bulk weight `∫ p₀(x) t(x|z) dx`, the left side of the condensation equation.
pub fn bulk_mass(z: f64, params: &SystemParams) -> Result<f64> {
    let (lam, k) = tilt_parameters(z, params)?;
    mp_integrate_converged(
        |x| {
            let sx = params.sigma(x);
            sx / (lam * sx + k)
        },
        params.alpha,
        BULK_TOL,
    )
}

/// Condensation scale `w` solving `∫p₀ (s(z)−s(y))/(s(x)−s(y)) = 1/w − 1/(eʷ−1)`.
///
/// `w` is negative when the detached weight is below 1/2, and tends to −∞ at
/// the critical points.
pub fn solve_w(z: f64, params: &SystemParams) -> Result<f64> {
    if !regime_of(z, params.alpha)?.is_outer() {
        return Err(Error::Domain(format!("z = {z} is not in an outer regime")));
    }
    let mass = bulk_mass(z, params)?;
    solve_w_for_mass(mass)
}

pub(crate) fn solve_w_for_mass(mass: f64) -> Result<f64> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::Infeasible { bulk_mass: mass });
    }
    let f = |w: f64| condensation_mass(w) - mass;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f(lo) < 0.0 {
        lo *= 2.0;
        if lo < -1e6 {
            return Err(Error::Infeasible { bulk_mass: mass });
        }
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Infeasible { bulk_mass: mass });
        }
    }
    find_root(f, lo, hi, DEFAULT_TOL)
}

/// Per-`z` saddle data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltSolution {
    pub z: f64,
    pub regime: Regime,
    /// `c` (inner) or `y` (outer); `±∞` at `z = α`.
    pub pole: f64,
    pub lambda: f64,
    pub k: f64,
    /// Outer regime only.
    pub w: Option<f64>,
    /// Outer regime only.
    pub detached_weight: Option<f64>,
}

pub fn solve_tilt(z: f64, params: &SystemParams) -> Result<TiltSolution> {
    let regime = regime_of(z, params.alpha)?;
    let (lambda, k) = tilt_parameters(z, params)?;
    let pole = if z == params.alpha {
        f64::INFINITY
    } else {
        pole_location(z, params.alpha)?
    };
    let (w, detached_weight) = if regime.is_outer() {
        let d = weights::detached_weight(z, params)?;
        (Some(d.w), Some(d.weight))
    } else {
        (None, None)
    };
    Ok(TiltSolution { z, regime, pole, lambda, k, w, detached_weight })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicStats {
    /// Most probable normalized SINR.
    pub z_erg: f64,
    /// `ρ·z_erg`: γ_erg for MMSE, β_erg for ZF.
    pub sinr_erg: f64,
    /// Variance of `z` is `v_erg / N`.
    pub v_erg: f64,
    /// ZF with α = 1: `v_erg = 0` and the Gaussian approximation breaks down.
    pub degenerate: bool,
}

pub fn ergodic_stats(params: &SystemParams) -> ErgodicStats {
    let alpha = params.alpha;
    let rho = params.rho;
    match params.receiver {
        Receiver::Mmse => {
            let d = ((1.0 - (alpha - 1.0) * rho).powi(2) + 4.0 * alpha * rho).sqrt();
            let bq = rho * (alpha - 1.0) - 1.0;
            // (d + bq)/2, rationalized when bq < 0.
            let gamma = if bq >= 0.0 {
                0.5 * (d + bq)
            } else {
                2.0 * alpha * rho / (d - bq)
            };
            // The ρ term carries (α−1)², which reproduces 1/I''(z_erg) and the
            // ZF limit α−1; the two forms agree for α ∈ {1, 2}.
            let v = ((alpha - 1.0) * d + rho * (alpha - 1.0).powi(2) + alpha + 1.0) / (2.0 * d);
            ErgodicStats { z_erg: gamma / rho, sinr_erg: gamma, v_erg: v, degenerate: false }
        }
        Receiver::Zf => ErgodicStats {
            z_erg: alpha - 1.0,
            sinr_erg: rho * (alpha - 1.0),
            v_erg: alpha - 1.0,
            degenerate: alpha == 1.0,
        },
    }
}

/// `z`-dependent part of the exponent; `I(z) = g(z) − g(z_erg)`.
fn exponent_g(z: f64, params: &SystemParams) -> f64 {
    let alpha = params.alpha;
    match params.receiver {
        Receiver::Mmse => z - alpha * z.ln() + (1.0 / params.rho + z).ln(),
        Receiver::Zf => {
            if alpha == 1.0 {
                z
            } else {
                z - (alpha - 1.0) * z.ln()
            }
        }
    }
}

/// Rate function `I(z) >= 0`, zero at `z_erg`. The density of `z` behaves as
/// `exp(−N·I(z))` for every `z > 0`, across both regimes.
pub fn rate_function(z: f64, params: &SystemParams) -> Result<f64> {
    check_z(z)?;
    let erg = ergodic_stats(params);
    let g0 = if erg.z_erg > 0.0 {
        exponent_g(erg.z_erg, params)
    } else {
        // ZF, α = 1: g(z) = z, infimum 0 at z → 0⁺.
        0.0
    };
    Ok(exponent_g(z, params) - g0)
}

/// `dI/dz`.
pub fn rate_function_derivative(z: f64, params: &SystemParams) -> Result<f64> {
    check_z(z)?;
    let alpha = params.alpha;
    Ok(match params.receiver {
        Receiver::Mmse => 1.0 - alpha / z + 1.0 / (1.0 / params.rho + z),
        Receiver::Zf => 1.0 - (alpha - 1.0) / z,
    })
}

/// Unnormalized saddle-point exponent `−(k·s(z)+λ) + ∫ p₀ ln(λ + k·s(x)) dx`,
/// evaluated by quadrature. Differences across `z` reproduce differences of
/// [`rate_function`]; used as an independent check of the closed form.
pub fn rate_exponent_numeric(z: f64, params: &SystemParams) -> Result<f64> {
    let regime = regime_of(z, params.alpha)?;
    let (lo, hi) = critical_points(params.alpha);
    if regime != Regime::Inner || z == lo || z == hi {
        return Err(Error::Regime(format!("z = {z} is not strictly inside the inner regime")));
    }
    let (lam, k) = tilt_parameters(z, params)?;
    let support = mp_edges(params.alpha)?;
    for x in [support.a, support.b] {
        let sx = params.sigma(x);
        // λ + k/σ(x), written to stay finite at σ = 0.
        if lam * sx + k <= 0.0 && sx > 0.0 {
            return Err(Error::Regime(format!("λ + k·s(x) <= 0 at bulk edge x = {x}")));
        }
    }
    let sz = params.s_unchecked(z);
    // ZF at α = 1 puts the pole of s(x) = 1/x on the edge a = 0; split off
    // ∫p₀ ln x = −1 so the remaining integrand is analytic on the bulk.
    let split_log = params.receiver == Receiver::Zf && support.a == 0.0;
    let integral = mp_integrate_converged(
        |x| {
            let arg = if split_log { lam * x + k } else { lam + k * params.s_unchecked(x) };
            if arg > 0.0 {
                arg.ln()
            } else {
                f64::NAN
            }
        },
        params.alpha,
        1e-12,
    )
    .map(|v| if split_log { v + 1.0 } else { v })
    .map_err(|e| match e {
        Error::Integration(m) => Error::Regime(m),
        other => other,
    })?;
    Ok(-(k * sz + lam) + integral)
}

/// Gaussian log-density of `z` with mean `z_erg` and variance `v_erg/N`.
pub fn gaussian_logpdf(z: f64, params: &SystemParams) -> Result<f64> {
    let n = params.dims()?.n as f64;
    let erg = ergodic_stats(params);
    if !(erg.v_erg > 0.0) {
        return Err(Error::Degenerate(
            "v_erg = 0 (ZF with alpha = 1); the Gaussian approximation breaks down".into(),
        ));
    }
    let var = erg.v_erg / n;
    Ok(-0.5 * (2.0 * std::f64::consts::PI * var).ln() - (z - erg.z_erg).powi(2) / (2.0 * var))
}
