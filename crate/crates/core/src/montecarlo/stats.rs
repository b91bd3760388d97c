//! Histograms, summaries and the Kolmogorov–Smirnov statistic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::find_root;

/// Fixed-width bins over `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// All values offered, in range or not.
    pub total: u64,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(hi > lo && lo.is_finite() && hi.is_finite()) || bins == 0 {
            return Err(Error::Domain(format!("bad histogram range [{lo}, {hi}) with {bins} bins")));
        }
        let w = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..=bins).map(|i| lo + w * i as f64).collect();
        edges[bins] = hi;
        Ok(Self { edges, counts: vec![0; bins], total: 0, below: 0, above: 0 })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn lo(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi(&self) -> f64 {
        self.edges[self.bins()]
    }

    pub fn width(&self) -> f64 {
        (self.hi() - self.lo()) / self.bins() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    pub fn add(&mut self, x: f64) {
        self.total += 1;
        if x < self.lo() {
            self.below += 1;
        } else if x >= self.hi() {
            self.above += 1;
        } else {
            let i = (((x - self.lo()) / self.width()) as usize).min(self.bins() - 1);
            self.counts[i] += 1;
        }
    }

    pub fn in_range(&self) -> u64 {
        self.total - self.below - self.above
    }

    /// Density normalized over the in-range values; integrates to 1.
    pub fn density(&self) -> Vec<f64> {
        let n = self.in_range().max(1) as f64;
        let w = self.width();
        self.counts.iter().map(|&c| c as f64 / (n * w)).collect()
    }

    /// Binomial standard error of [`Histogram::density`].
    pub fn density_se(&self) -> Vec<f64> {
        let n = self.in_range().max(1) as f64;
        let w = self.width();
        self.counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n;
                (p * (1.0 - p) / n).sqrt() / w
            })
            .collect()
    }

    /// Bin probabilities over the in-range values.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.in_range().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Moments of a sample with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::Domain("summary needs at least two samples".into()));
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let (mut m2, mut m4) = (0.0, 0.0);
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &x in xs {
            let d = x - mean;
            m2 += d * d;
            m4 += d * d * d * d;
            min = min.min(x);
            max = max.max(x);
        }
        let variance = m2 / (n - 1.0);
        let m4 = m4 / n;
        let pop_var = m2 / n;
        Ok(Self {
            count: xs.len() as u64,
            mean,
            mean_se: (variance / n).sqrt(),
            variance,
            variance_se: ((m4 - pop_var * pop_var).max(0.0) / n).sqrt(),
            min,
            max,
        })
    }
}

/// `sup |F_n(x) − F(x)|` against a reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("KS statistic needs at least one sample".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// Limiting Kolmogorov CDF `P(√n·D ≤ x)`.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        s += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (1.0 - 2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic KS critical value at significance `level` for `n` samples
/// (`≈ 1.6276/√n` at 1%).
pub fn ks_critical_value(n: usize, level: f64) -> Result<f64> {
    if n == 0 || !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("bad KS critical value request n={n}, level={level}")));
    }
    let k = find_root(|x| kolmogorov_cdf(x) - (1.0 - level), 0.2, 5.0, 1e-12)?;
    Ok(k / (n as f64).sqrt())
}
