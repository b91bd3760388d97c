//! Normalized densities, CDFs and outage probabilities of the SINR.
//!
//! Everything is computed in the normalized variable `z`; the SINR is
//! `ρ·z` (γ for MMSE, β for ZF) and densities pick up the Jacobian `1/ρ`.

use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::params::{Receiver, SystemParams};
use crate::quad::integrate_interval;
use crate::ratefn::{ergodic_stats, rate_function};
use crate::roots::find_root;

/// Log-density value used for `z <= 0`.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

pub const DEFAULT_POINTS: usize = 4096;

/// Grid ends where the density has fallen by `e^{-40}` from its peak.
const TAIL_EXPONENT: f64 = 40.0;
/// Largest boundary density, relative to the peak, accepted by [`normalize`].
const COVERAGE_RATIO: f64 = 1e-10;
const OUTAGE_PANELS: usize = 4096;

pub fn z_from_sinr(sinr: f64, params: &SystemParams) -> f64 {
    sinr / params.rho
}

pub fn sinr_from_z(z: f64, params: &SystemParams) -> f64 {
    params.rho * z
}

/// `ln` of the Jacobian `dz/dSINR = 1/ρ`.
pub fn log_jacobian(params: &SystemParams) -> f64 {
    -params.rho.ln()
}

/// Leading-order log-density of `z`, up to an additive constant:
/// `M ln z − N ln(1/ρ + z) − N z` (MMSE), `(M−N) ln z − N z` (ZF).
///
/// Equals `−N·I(z)` plus a constant. Returns [`LOG_ZERO`] for `z <= 0`.
pub fn logpdf_unnormalized(z: f64, params: &SystemParams) -> Result<f64> {
    let d = params.dims()?;
    let (m, n) = (d.m as f64, d.n as f64);
    if !(z > 0.0) {
        return Ok(LOG_ZERO);
    }
    Ok(match params.receiver {
        Receiver::Mmse => m * z.ln() - n * (1.0 / params.rho + z).ln() - n * z,
        Receiver::Zf => {
            if d.m == d.n {
                -n * z
            } else {
                (m - n) * z.ln() - n * z
            }
        }
    })
}

/// `d/dz` of [`logpdf_unnormalized`].
pub fn logpdf_gradient(z: f64, params: &SystemParams) -> Result<f64> {
    let d = params.dims()?;
    let (m, n) = (d.m as f64, d.n as f64);
    if !(z > 0.0) {
        return Err(Error::Domain(format!("z must be > 0, got {z}")));
    }
    Ok(match params.receiver {
        Receiver::Mmse => m / z - n / (1.0 / params.rho + z) - n,
        Receiver::Zf => (m - n) / z - n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Analytic,
    Gaussian,
    GammaFit,
    Empirical,
}

impl std::fmt::Display for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurveKind::Analytic => "analytic",
            CurveKind::Gaussian => "gaussian",
            CurveKind::GammaFit => "gamma_fit",
            CurveKind::Empirical => "empirical",
        })
    }
}

/// Normalized log-density of `z` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdfCurve {
    pub grid: Vec<f64>,
    pub logpdf: Vec<f64>,
    pub kind: CurveKind,
    pub params: SystemParams,
    /// Log of the normalizer that was subtracted.
    pub log_norm: f64,
}

impl PdfCurve {
    pub fn pdf(&self) -> Vec<f64> {
        self.logpdf.iter().map(|l| l.exp()).collect()
    }

    /// Trapezoidal mass on the grid.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.pdf())
    }

    /// Grid point of largest density.
    pub fn mode(&self) -> f64 {
        let (i, _) = self
            .logpdf
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bl), (i, &l)| if l > bl { (i, l) } else { (bi, bl) });
        self.grid[i]
    }

    /// Cumulative trapezoid at the grid points.
    pub fn cdf(&self) -> Vec<f64> {
        let pdf = self.pdf();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(pdf.len());
        out.push(0.0);
        for i in 1..pdf.len() {
            acc += 0.5 * (pdf[i] + pdf[i - 1]) * (self.grid[i] - self.grid[i - 1]);
            out.push(acc);
        }
        out
    }

    /// Linear interpolation of [`PdfCurve::cdf`], normalized to end at 1;
    /// 0 below the grid and 1 above it.
    pub fn cdf_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        let cdf = self.cdf();
        let last = *cdf.last().unwrap();
        move |z: f64| {
            let g = &self.grid;
            if z <= g[0] {
                return 0.0;
            }
            if z >= g[g.len() - 1] {
                return 1.0;
            }
            let i = g.partition_point(|&x| x <= z);
            let t = (z - g[i - 1]) / (g[i] - g[i - 1]);
            (cdf[i - 1] + t * (cdf[i] - cdf[i - 1])) / last
        }
    }

    /// Mean and variance of `z` under the curve.
    pub fn moments(&self) -> (f64, f64) {
        let pdf = self.pdf();
        let m1: Vec<f64> = pdf.iter().zip(&self.grid).map(|(p, z)| p * z).collect();
        let m2: Vec<f64> = pdf.iter().zip(&self.grid).map(|(p, z)| p * z * z).collect();
        let mass = trapezoid(&self.grid, &pdf);
        let mean = trapezoid(&self.grid, &m1) / mass;
        let second = trapezoid(&self.grid, &m2) / mass;
        (mean, second - mean * mean)
    }

    /// Histogram-backed curve; no coverage checks.
    pub fn empirical(centers: Vec<f64>, density: &[f64], params: SystemParams) -> Self {
        let logpdf = density.iter().map(|&d| if d > 0.0 { d.ln() } else { LOG_ZERO }).collect();
        PdfCurve { grid: centers, logpdf, kind: CurveKind::Empirical, params, log_norm: 0.0 }
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (yw[0] + yw[1]) * (xw[1] - xw[0]))
        .sum()
}

/// Natural scale of `z`: `z_erg`, or `1/N` when the mode sits at the origin.
fn z_scale(params: &SystemParams) -> Result<f64> {
    let n = params.dims()?.n as f64;
    Ok(ergodic_stats(params).z_erg.max(1.0 / n))
}

/// A grid starting below this counts as reaching the origin.
fn near_zero(params: &SystemParams) -> Result<f64> {
    Ok(1e-6 * z_scale(params)?)
}

/// Uniform grid over the region where `N·I(z) <= 40`, widened to at least
/// `z_erg ± 8√(v_erg/N)` (clipped at the origin).
///
/// A uniform grid keeps the trapezoid rule spectrally accurate for densities
/// that decay at both ends.
pub fn default_grid(params: &SystemParams, points: usize) -> Result<Vec<f64>> {
    if points < 16 {
        return Err(Error::Domain(format!("need at least 16 grid points, got {points}")));
    }
    let n = params.dims()?.n as f64;
    let erg = ergodic_stats(params);
    let sd = (erg.v_erg / n).sqrt();
    let scale = z_scale(params)?;
    let tiny = 1e-9 * scale;
    let excess = |z: f64| -> f64 {
        match rate_function(z, params) {
            Ok(i) => n * i - TAIL_EXPONENT,
            Err(_) => f64::NAN,
        }
    };

    let start = erg.z_erg.max(tiny);
    let mut hi = start + sd.max(scale);
    while excess(hi) < 0.0 {
        hi = start + 2.0 * (hi - start);
        if hi > 1e12 * scale {
            return Err(Error::Numeric("could not bracket the upper tail".into()));
        }
    }
    let upper = find_root(excess, start, hi, 1e-10)?.max(erg.z_erg + 8.0 * sd);

    let density_vanishes_at_zero = match params.receiver {
        Receiver::Mmse => true,
        Receiver::Zf => params.alpha > 1.0,
    };
    let lower = if density_vanishes_at_zero && erg.z_erg > tiny && excess(tiny) > 0.0 {
        let root = find_root(excess, tiny, erg.z_erg, 1e-10)?;
        root.min((erg.z_erg - 8.0 * sd).max(tiny))
    } else {
        tiny
    };
    let step = (upper - lower) / (points - 1) as f64;
    Ok((0..points).map(|i| lower + step * i as f64).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

fn from_log_density<F: Fn(f64) -> Result<f64>>(
    grid: &[f64],
    params: &SystemParams,
    kind: CurveKind,
    log_density: F,
) -> Result<PdfCurve> {
    check_grid(grid)?;
    let raw = grid.iter().map(|&z| log_density(z)).collect::<Result<Vec<_>>>()?;
    let peak = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::Numeric("log-density has no finite maximum on the grid".into()));
    }
    let left = (raw[0] - peak).exp();
    let right = (raw[raw.len() - 1] - peak).exp();
    if grid[0] > near_zero(params)? && left > COVERAGE_RATIO {
        return Err(Error::Coverage(format!(
            "density at the lower grid end is {left:e} of the peak"
        )));
    }
    if right > COVERAGE_RATIO {
        return Err(Error::Coverage(format!(
            "density at the upper grid end is {right:e} of the peak"
        )));
    }
    let shifted: Vec<f64> = raw.iter().map(|l| (l - peak).exp()).collect();
    let log_norm = peak + trapezoid(grid, &shifted).ln();
    Ok(PdfCurve {
        grid: grid.to_vec(),
        logpdf: raw.iter().map(|l| l - log_norm).collect(),
        kind,
        params: *params,
        log_norm,
    })
}

/// Normalized analytic density of `z` on `grid`.
pub fn normalize(grid: &[f64], params: &SystemParams) -> Result<PdfCurve> {
    from_log_density(grid, params, CurveKind::Analytic, |z| logpdf_unnormalized(z, params))
}

/// Curve of the requested kind on `grid`. The Gaussian is truncated to
/// `z > 0`; the Gamma fit matches `z_erg` and `v_erg/N`.
pub fn curve(grid: &[f64], params: &SystemParams, kind: CurveKind) -> Result<PdfCurve> {
    match kind {
        CurveKind::Analytic => normalize(grid, params),
        CurveKind::Gaussian => {
            let (mu, var) = gaussian_moments(params)?;
            from_log_density(grid, params, kind, |z| Ok(-(z - mu).powi(2) / (2.0 * var)))
        }
        CurveKind::GammaFit => {
            let law = gamma_fit_in_z(params)?;
            from_log_density(grid, params, kind, |z| Ok(law.ln_pdf(z)))
        }
        CurveKind::Empirical => Err(Error::Domain(
            "empirical curves are built from histograms".into(),
        )),
    }
}

fn gaussian_moments(params: &SystemParams) -> Result<(f64, f64)> {
    let n = params.dims()?.n as f64;
    let erg = ergodic_stats(params);
    if !(erg.v_erg > 0.0) {
        return Err(Error::Degenerate(
            "v_erg = 0 (ZF with alpha = 1); the Gaussian approximation breaks down".into(),
        ));
    }
    Ok((erg.z_erg, erg.v_erg / n))
}

/// Moment-matched Gamma law of `z` from the ergodic mean and variance.
pub fn gamma_fit_in_z(params: &SystemParams) -> Result<GammaLaw> {
    let (mean, var) = gaussian_moments(params)?;
    gamma_moment_fit(mean, var)
}

/// Gamma law with density `x^{k−1} e^{−x/θ} / (Γ(k) θ^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaLaw {
    pub shape: f64,
    pub scale: f64,
}

impl GammaLaw {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
            return Err(Error::Domain(format!(
                "Gamma law needs shape, scale > 0, got ({shape}, {scale})"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return LOG_ZERO;
        }
        if x == 0.0 {
            return if self.shape < 1.0 {
                f64::INFINITY
            } else if self.shape == 1.0 {
                -self.scale.ln()
            } else {
                LOG_ZERO
            };
        }
        (self.shape - 1.0) * x.ln() - x / self.scale - ln_gamma(self.shape) - self.shape * self.scale.ln()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x.is_infinite() {
            1.0
        } else {
            gamma_lr(self.shape, x / self.scale)
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile needs p in (0, 1), got {p}")));
        }
        let mut hi = self.mean().max(self.scale);
        while self.cdf(hi) < p {
            hi *= 2.0;
        }
        find_root(|x| self.cdf(x) - p, 0.0, hi, 1e-14)
    }

    /// Law of `c·X`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { shape: self.shape, scale: self.scale * c }
    }
}

/// Exact law of the ZF SINR `β`: Gamma with shape `M−N+1`, scale `ρ/N`.
pub fn zf_exact(m: usize, n: usize, rho: f64) -> Result<GammaLaw> {
    if n == 0 || m < n {
        return Err(Error::Domain(format!("need M >= N >= 1, got M={m}, N={n}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be finite and > 0, got {rho}")));
    }
    GammaLaw::new((m - n + 1) as f64, rho / n as f64)
}

pub fn gamma_moment_fit(mean: f64, variance: f64) -> Result<GammaLaw> {
    if !(mean > 0.0 && variance > 0.0) {
        return Err(Error::Domain(format!(
            "moment fit needs mean, variance > 0, got ({mean}, {variance})"
        )));
    }
    GammaLaw::new(mean * mean / variance, variance / mean)
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Gaussian approximation `N(z_erg, v_erg/N)` restricted to `z > 0` and
/// renormalized.
pub fn truncated_gaussian_logpdf(z: f64, params: &SystemParams) -> Result<f64> {
    let (mu, var) = gaussian_moments(params)?;
    if !(z > 0.0) {
        return Ok(LOG_ZERO);
    }
    let sd = var.sqrt();
    let kept = 1.0 - normal_cdf(-mu / sd);
    Ok(-0.5 * (2.0 * std::f64::consts::PI * var).ln() - (z - mu).powi(2) / (2.0 * var) - kept.ln())
}

pub fn truncated_gaussian_cdf(z: f64, params: &SystemParams) -> Result<f64> {
    let (mu, var) = gaussian_moments(params)?;
    if !(z > 0.0) {
        return Ok(0.0);
    }
    let sd = var.sqrt();
    let below_zero = normal_cdf(-mu / sd);
    Ok((normal_cdf((z - mu) / sd) - below_zero) / (1.0 - below_zero))
}

/// `ln` of the normalizer of [`logpdf_unnormalized`], from the default grid.
pub fn log_normalizer(params: &SystemParams) -> Result<f64> {
    Ok(normalize(&default_grid(params, DEFAULT_POINTS)?, params)?.log_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageMethod {
    Analytic,
    Gaussian,
    GammaFit,
    /// Exact Gamma law; ZF only.
    Exact,
}

impl std::str::FromStr for OutageMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "gaussian" => Ok(Self::Gaussian),
            "gamma-fit" | "gamma_fit" => Ok(Self::GammaFit),
            "exact" => Ok(Self::Exact),
            other => Err(Error::Domain(format!("unknown outage method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageResult {
    /// SINR threshold (γ or β).
    pub target: f64,
    /// `P(SINR < target)`.
    pub probability: f64,
    pub method: OutageMethod,
}

/// `P(SINR < target)` under the selected density.
pub fn outage(target_sinr: f64, params: &SystemParams, method: OutageMethod) -> Result<OutageResult> {
    if !(target_sinr > 0.0) {
        return Err(Error::Domain(format!("target SINR must be > 0, got {target_sinr}")));
    }
    let zt = z_from_sinr(target_sinr, params);
    let probability = match method {
        OutageMethod::Analytic => {
            let curve = normalize(&default_grid(params, DEFAULT_POINTS)?, params)?;
            let end = *curve.grid.last().unwrap();
            let upper = zt.min(end);
            let log_norm = curve.log_norm;
            let f = |z: f64| match logpdf_unnormalized(z, params) {
                Ok(l) => (l - log_norm).exp(),
                Err(_) => 0.0,
            };
            integrate_interval(f, 0.0, upper, OUTAGE_PANELS)
        }
        OutageMethod::Gaussian => truncated_gaussian_cdf(zt, params)?,
        OutageMethod::GammaFit => gamma_fit_in_z(params)?.cdf(zt),
        OutageMethod::Exact => {
            if params.receiver != Receiver::Zf {
                return Err(Error::Domain("the exact law is only available for ZF".into()));
            }
            let d = params.dims()?;
            zf_exact(d.m, d.n, params.rho)?.cdf(target_sinr)
        }
    };
    Ok(OutageResult { target: target_sinr, probability: probability.clamp(0.0, 1.0), method })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(m: usize, n: usize, rho: f64, r: Receiver) -> SystemParams {
        SystemParams::with_dims(m, n, rho, r).unwrap()
    }

    #[test]
    fn logpdf_examples() {
        let v = logpdf_unnormalized(1.0, &dims(6, 6, 1.0, Receiver::Mmse)).unwrap();
        assert!((v - (-6.0 * 2f64.ln() - 6.0)).abs() < 1e-13);
        let v = logpdf_unnormalized(1.0, &dims(6, 3, 1.0, Receiver::Zf)).unwrap();
        assert_eq!(v, -3.0);
        let v = logpdf_unnormalized(1.0, &dims(6, 3, 10.0, Receiver::Mmse)).unwrap();
        assert!((v + 3.285_930).abs() < 1e-6);
        assert_eq!(logpdf_unnormalized(0.0, &dims(6, 3, 10.0, Receiver::Mmse)).unwrap(), LOG_ZERO);
        let asym = SystemParams::asymptotic(2.0, 1.0, Receiver::Mmse).unwrap();
        assert!(logpdf_unnormalized(1.0, &asym).is_err());
    }

    #[test]
    fn consistent_with_rate_function() {
        for p in [dims(6, 6, 1.0, Receiver::Mmse), dims(8, 4, 10.0, Receiver::Mmse), dims(6, 3, 1.0, Receiver::Zf)] {
            let n = p.dims.unwrap().n as f64;
            let vals: Vec<f64> = (1..=200)
                .map(|i| {
                    let z = 0.02 * i as f64;
                    logpdf_unnormalized(z, &p).unwrap() + n * rate_function(z, &p).unwrap()
                })
                .collect();
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
                - vals.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < 1e-9, "{spread}");
        }
    }

    #[test]
    fn zf_curve_is_exact_gamma() {
        let p = dims(6, 3, 10.0, Receiver::Zf);
        let curve = normalize(&default_grid(&p, DEFAULT_POINTS).unwrap(), &p).unwrap();
        let exact = zf_exact(6, 3, 10.0).unwrap();
        let jac = log_jacobian(&p);
        let sup = curve
            .grid
            .iter()
            .zip(&curve.logpdf)
            .map(|(&z, &l)| ((l + jac).exp() - exact.pdf(sinr_from_z(z, &p))).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-8, "{sup}");
        assert!((curve.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_is_ergodic() {
        let p = dims(6, 6, 1.0, Receiver::Mmse);
        let curve = normalize(&default_grid(&p, DEFAULT_POINTS).unwrap(), &p).unwrap();
        let z_erg = ergodic_stats(&p).z_erg;
        let step = curve.grid[1] - curve.grid[0];
        assert!((curve.mode() - z_erg).abs() <= step);
        assert!(logpdf_gradient(z_erg, &p).unwrap().abs() < 1e-8);
    }

    #[test]
    fn coverage_error() {
        let p = dims(6, 6, 1.0, Receiver::Mmse);
        let grid: Vec<f64> = (0..100).map(|i| 0.3 + 0.005 * i as f64).collect();
        assert!(matches!(normalize(&grid, &p), Err(Error::Coverage(_))));
        assert!(normalize(&[1.0, 0.5], &p).is_err());
    }

    #[test]
    fn every_kind_has_unit_mass() {
        for p in [dims(6, 6, 1.0, Receiver::Mmse), dims(6, 3, 10.0, Receiver::Mmse), dims(6, 3, 10.0, Receiver::Zf)] {
            let grid = default_grid(&p, DEFAULT_POINTS).unwrap();
            for kind in [CurveKind::Analytic, CurveKind::Gaussian, CurveKind::GammaFit] {
                let c = curve(&grid, &p, kind).unwrap();
                assert!((c.mass() - 1.0).abs() < 1e-6, "{kind}");
            }
        }
    }

    #[test]
    fn zf_square_grid_reaches_origin() {
        let p = dims(4, 4, 1.0, Receiver::Zf);
        let grid = default_grid(&p, DEFAULT_POINTS).unwrap();
        assert!(grid[0] < 1e-8);
        let c = normalize(&grid, &p).unwrap();
        // Exponential law with rate N = 4.
        let exact = zf_exact(4, 4, 1.0).unwrap();
        let mid = grid.len() / 4;
        assert!((c.logpdf[mid].exp() - exact.pdf(grid[mid])).abs() < 1e-4);
        assert!(curve(&grid, &p, CurveKind::Gaussian).is_err());
    }

    #[test]
    fn exact_law_examples() {
        let g = zf_exact(6, 3, 10.0).unwrap();
        assert!((g.mean() - 40.0 / 3.0).abs() < 1e-12);
        assert!((g.variance() - 400.0 / 9.0).abs() < 1e-12);
        let g = zf_exact(5, 5, 2.0).unwrap();
        assert_eq!(g.shape, 1.0);
        assert!((g.mean() - 0.4).abs() < 1e-15);
        assert!(zf_exact(2, 3, 1.0).is_err());
    }

    #[test]
    fn moment_fit_examples() {
        let g = gamma_moment_fit(2.0, 2.0).unwrap();
        assert_eq!((g.shape, g.scale), (2.0, 1.0));
        let g = gamma_moment_fit(1.0, 1.0).unwrap();
        assert_eq!(g.shape, 1.0);
        assert!(gamma_moment_fit(0.0, 1.0).is_err());
        assert!(gamma_moment_fit(1.0, -1.0).is_err());
        // ZF ergodic moments give shape (α−1)N = M−N, close to M−N+1.
        for n in [10usize, 100, 1000] {
            let p = dims(2 * n, n, 1.0, Receiver::Zf);
            let g = gamma_fit_in_z(&p).unwrap();
            let exact = (n + 1) as f64;
            assert!((g.shape - n as f64).abs() < 1e-9);
            assert!((g.shape / exact - 1.0).abs() <= 1.0 / exact + 1e-12);
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn gamma_special_functions_against_high_precision() {
        // mpmath, 40 digits.
        let cases = [
            (4.0, 1.0, 0.018_988_156_876_153_809),
            (4.0, 4.0, 0.566_529_879_633_291_07),
            (4.0, 10.0, 0.989_663_949_324_074_28),
            (1.0, 0.5, 0.393_469_340_287_366_58),
            (0.5, 2.0, 0.954_499_736_103_641_59),
            (17.0, 16.0, 0.434_037_576_990_123_43),
            (2.5, 30.0, 0.999_999_999_987_845_43),
            (100.0, 90.0, 0.158_220_989_186_430_17),
        ];
        for (a, x, p) in cases {
            let got = GammaLaw::new(a, 1.0).unwrap().cdf(x);
            assert!((got - p).abs() < 1e-12, "P({a},{x}) = {got} vs {p}");
        }
        for (x, lg) in [
            (0.5, 0.572_364_942_924_700_09),
            (3.5, 1.200_973_602_347_074_2),
            (10.5, 13.940_625_219_403_764),
            (100.0, 359.134_205_369_575_4),
        ] {
            assert!((ln_gamma(x) - lg).abs() < 1e-12 * lg.abs().max(1.0));
        }
    }

    #[test]
    fn outage_examples() {
        let p = dims(6, 3, 10.0, Receiver::Zf);
        // Median of Gamma(4, 10/3), mpmath: 12.24020249616965368.
        let median = 12.240_202_496_169_654;
        assert!((zf_exact(6, 3, 10.0).unwrap().quantile(0.5).unwrap() - median).abs() < 1e-9);
        for m in [OutageMethod::Analytic, OutageMethod::Exact] {
            let r = outage(median, &p, m).unwrap();
            assert!((r.probability - 0.5).abs() < 1e-6, "{m:?}: {}", r.probability);
        }
        let q = dims(6, 6, 1.0, Receiver::Mmse);
        for m in [OutageMethod::Analytic, OutageMethod::Gaussian, OutageMethod::GammaFit] {
            assert!(outage(1e-9, &q, m).unwrap().probability < 1e-6);
            assert!(outage(1e6, &q, m).unwrap().probability > 1.0 - 1e-9);
        }
        assert!(outage(1.0, &q, OutageMethod::Exact).is_err());
        assert!(outage(0.0, &q, OutageMethod::Analytic).is_err());
        assert!("weibull".parse::<OutageMethod>().is_err());
    }

    #[test]
    fn truncated_gaussian_is_normalized() {
        let p = dims(6, 6, 1.0, Receiver::Mmse);
        let mass = integrate_interval(|z| truncated_gaussian_logpdf(z, &p).unwrap().exp(), 1e-12, 5.0, 2000);
        assert!((mass - 1.0).abs() < 1e-10);
        assert!((truncated_gaussian_cdf(5.0, &p).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(truncated_gaussian_cdf(-1.0, &p).unwrap(), 0.0);
        assert!(truncated_gaussian_logpdf(1.0, &dims(4, 4, 1.0, Receiver::Zf)).is_err());
    }

    #[test]
    fn interpolated_cdf() {
        let p = dims(6, 3, 10.0, Receiver::Zf);
        let c = normalize(&default_grid(&p, DEFAULT_POINTS).unwrap(), &p).unwrap();
        let f = c.cdf_fn();
        let exact = zf_exact(6, 3, 10.0).unwrap();
        for z in [0.3, 1.0, 1.3, 2.0, 4.0] {
            assert!((f(z) - exact.cdf(10.0 * z)).abs() < 1e-5);
        }
        assert_eq!(f(-1.0), 0.0);
        assert_eq!(f(1e9), 1.0);
    }

    #[test]
    fn outage_monotone() {
        let p = dims(6, 6, 1.0, Receiver::Mmse);
        let mut last = 0.0;
        for i in 1..40 {
            let r = outage(0.05 * i as f64, &p, OutageMethod::Analytic).unwrap();
            assert!(r.probability >= last);
            last = r.probability;
        }
    }

    #[test]
    fn analytic_mmse_is_not_gamma() {
        // Sup-distance between the analytic density and the Gamma law matched
        // to its own first two moments. Locked from the first computation.
        let p = dims(6, 6, 1.0, Receiver::Mmse);
        let c = normalize(&default_grid(&p, DEFAULT_POINTS).unwrap(), &p).unwrap();
        let (mean, var) = c.moments();
        let g = gamma_moment_fit(mean, var).unwrap();
        let sup = c
            .grid
            .iter()
            .zip(c.pdf())
            .map(|(&z, f)| (f - g.pdf(z)).abs())
            .fold(0.0, f64::max);
        assert!((sup - 0.037_160_031_214_177_77).abs() < 1e-9, "{sup}");
    }
}
