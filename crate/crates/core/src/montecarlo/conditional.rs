//! Eigenvector weights conditioned on the SINR of stream 1.

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::linalg::CMatrix;
use super::rng::{purpose, StreamRng};
use super::runner::{chunked, McConfig};
use super::sampler::{analyze_channel, channel_draw, sinr, ChannelMatrix, SinrSample};
use crate::error::{Error, Result};
use crate::mp::mp_edges;
use crate::params::{Receiver, SystemParams};
use crate::weights::conditional_weight;

/// Bins with fewer eigenvalues than this are not reported.
pub const MIN_BIN_COUNT: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionalSampler {
    /// Unconditioned draws; only those landing in the `z` bin are kept.
    Plain,
    /// ZF only: draws `H` exactly from its law given `z` in the bin.
    ZfExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightBin {
    pub x_lo: f64,
    pub x_hi: f64,
    pub count: u64,
    pub mean_t: f64,
    pub se_t: f64,
    /// Mean of `t(x|z_ref)` over the eigenvalues in the bin.
    pub analytic_t: Option<f64>,
}

impl WeightBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.x_lo + self.x_hi)
    }
}

/// Mean weight `t/N` and position of an extreme eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremeStats {
    pub mean_weight: f64,
    pub weight_se: f64,
    pub mean_position: f64,
    pub position_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalWeightStats {
    pub z_lo: f64,
    pub z_hi: f64,
    /// `z` at which the analytic profile is evaluated (bin midpoint).
    pub z_ref: f64,
    pub sampler: ConditionalSampler,
    pub draws: u64,
    /// Draws whose `z` fell in the bin.
    pub conditioned: u64,
    pub bulk_lo: f64,
    pub bulk_hi: f64,
    /// Populated bins (at least [`MIN_BIN_COUNT`] eigenvalues), ascending.
    pub bins: Vec<WeightBin>,
    /// `(bin center, count)` of suppressed bins.
    pub suppressed: Vec<(f64, u64)>,
    /// Eigenvalues that fell outside `[a, b]`.
    pub outside_bulk: u64,
    pub largest: Option<ExtremeStats>,
    pub smallest: Option<ExtremeStats>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    s: f64,
    s2: f64,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.n += 1;
        self.s += x;
        self.s2 += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.s += o.s;
        self.s2 += o.s2;
    }

    fn mean(&self) -> f64 {
        self.s / self.n as f64
    }

    fn se(&self) -> f64 {
        let n = self.n as f64;
        if self.n < 2 {
            return f64::NAN;
        }
        let var = (self.s2 - self.s * self.s / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }
}

#[derive(Debug, Clone, Default)]
struct Partial {
    conditioned: u64,
    t: Vec<Moments>,
    analytic: Vec<Moments>,
    outside: u64,
    max_w: Moments,
    max_x: Moments,
    min_w: Moments,
    min_x: Moments,
}

impl Partial {
    fn new(bins: usize) -> Self {
        Self { t: vec![Moments::default(); bins], analytic: vec![Moments::default(); bins], ..Default::default() }
    }

    fn merge(&mut self, o: &Partial) {
        self.conditioned += o.conditioned;
        self.outside += o.outside;
        for (a, b) in self.t.iter_mut().zip(&o.t) {
            a.merge(b);
        }
        for (a, b) in self.analytic.iter_mut().zip(&o.analytic) {
            a.merge(b);
        }
        self.max_w.merge(&o.max_w);
        self.max_x.merge(&o.max_x);
        self.min_w.merge(&o.min_w);
        self.min_x.merge(&o.min_x);
    }
}

struct Binning<'a> {
    a: f64,
    b: f64,
    bins: usize,
    z_ref: f64,
    params: &'a SystemParams,
}

impl Binning<'_> {
    fn record(&self, s: &SinrSample, acc: &mut Partial) {
        let n = s.weights.len() as f64;
        acc.conditioned += 1;
        let width = (self.b - self.a) / self.bins as f64;
        for (&x, &t) in s.eigenvalues.iter().zip(&s.weights) {
            if x < self.a || x > self.b {
                acc.outside += 1;
                continue;
            }
            let i = (((x - self.a) / width) as usize).min(self.bins - 1);
            acc.t[i].add(t);
            if let Ok(v) = conditional_weight(x, self.z_ref, self.params) {
                if v.is_finite() {
                    acc.analytic[i].add(v);
                }
            }
        }
        let last = s.eigenvalues.len() - 1;
        acc.max_w.add(s.weights[last] / n);
        acc.max_x.add(s.eigenvalues[last]);
        acc.min_w.add(s.weights[0] / n);
        acc.min_x.add(s.eigenvalues[0]);
    }
}

/// Mean weight profile of draws whose `z` lies in `[z_lo, z_hi]`, binned by
/// eigenvalue into `x_bins` equal bins over the bulk `[a, b]`.
pub fn run_conditional_weights(
    params: &SystemParams,
    cfg: &McConfig,
    z_lo: f64,
    z_hi: f64,
    x_bins: usize,
    sampler: ConditionalSampler,
) -> Result<ConditionalWeightStats> {
    let d = params.dims()?;
    if !(z_lo >= 0.0 && z_hi > z_lo && z_hi.is_finite()) {
        return Err(Error::Domain(format!("bad z bin [{z_lo}, {z_hi}]")));
    }
    if x_bins == 0 {
        return Err(Error::Domain("need at least one eigenvalue bin".into()));
    }
    if sampler == ConditionalSampler::ZfExact && params.receiver != Receiver::Zf {
        return Err(Error::Domain("the exact conditional sampler is ZF only".into()));
    }
    let support = mp_edges(params.alpha)?;
    let z_ref = 0.5 * (z_lo + z_hi);
    let binning = Binning { a: support.a, b: support.b, bins: x_bins, z_ref, params };
    let law = ZfConditionalLaw::new(d.m, d.n, z_lo, z_hi)?;

    let parts = chunked(cfg.samples, cfg.workers, |start, end| {
        let mut acc = Partial::new(x_bins);
        for idx in start..end {
            let sample = match sampler {
                ConditionalSampler::Plain => {
                    let h = channel_draw(params, cfg.seed, idx)?;
                    let z = sinr(&h, params)?;
                    if z < z_lo || z > z_hi {
                        continue;
                    }
                    analyze_channel(&h, params)?
                }
                ConditionalSampler::ZfExact => {
                    let z = law.draw(&mut StreamRng::new(cfg.seed, purpose::CONDITIONAL_Z, idx));
                    let mut rng = StreamRng::new(cfg.seed, purpose::CHANNEL, idx);
                    analyze_channel(&zf_conditional_channel(d.m, d.n, z, &mut rng)?, params)?
                }
            };
            binning.record(&sample, &mut acc);
        }
        Ok(acc)
    })?;
    let mut total = Partial::new(x_bins);
    for p in &parts {
        total.merge(p);
    }

    let width = (support.b - support.a) / x_bins as f64;
    let mut bins = Vec::new();
    let mut suppressed = Vec::new();
    let mut warnings = Vec::new();
    for i in 0..x_bins {
        let (x_lo, x_hi) = (support.a + width * i as f64, support.a + width * (i + 1) as f64);
        let m = total.t[i];
        if m.n < MIN_BIN_COUNT {
            suppressed.push((0.5 * (x_lo + x_hi), m.n));
            continue;
        }
        let an = total.analytic[i];
        bins.push(WeightBin {
            x_lo,
            x_hi,
            count: m.n,
            mean_t: m.mean(),
            se_t: m.se(),
            analytic_t: (an.n > 0).then(|| an.mean()),
        });
    }
    if !suppressed.is_empty() {
        warnings.push(format!(
            "{} of {x_bins} eigenvalue bins hold fewer than {MIN_BIN_COUNT} values and were suppressed",
            suppressed.len()
        ));
    }
    if total.conditioned == 0 {
        warnings.push(format!("no draw landed in z bin [{z_lo}, {z_hi}]"));
    }
    let extreme = |w: &Moments, x: &Moments| {
        (w.n > 0).then(|| ExtremeStats {
            mean_weight: w.mean(),
            weight_se: w.se(),
            mean_position: x.mean(),
            position_se: x.se(),
        })
    };
    Ok(ConditionalWeightStats {
        z_lo,
        z_hi,
        z_ref,
        sampler,
        draws: cfg.samples,
        conditioned: total.conditioned,
        bulk_lo: support.a,
        bulk_hi: support.b,
        bins,
        suppressed,
        outside_bulk: total.outside,
        largest: extreme(&total.max_w, &total.max_x),
        smallest: extreme(&total.min_w, &total.min_x),
        warnings,
    })
}

/// Law of the ZF `z = ‖h₁⊥‖²`, Gamma(M−N+1, 1/N), restricted to a bin.
#[derive(Debug, Clone, Copy)]
struct ZfConditionalLaw {
    shape: f64,
    rate: f64,
    lo: f64,
    hi: f64,
    log_max: f64,
}

impl ZfConditionalLaw {
    fn new(m: usize, n: usize, lo: f64, hi: f64) -> Result<Self> {
        let shape = (m - n + 1) as f64;
        let rate = n as f64;
        let mode = (shape - 1.0) / rate;
        let mut law = Self { shape, rate, lo, hi, log_max: 0.0 };
        law.log_max = law.log_density(mode.clamp(lo, hi));
        if !law.log_max.is_finite() {
            return Err(Error::Domain(format!("z bin [{lo}, {hi}] carries no probability")));
        }
        Ok(law)
    }

    fn log_density(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return if self.shape == 1.0 { self.rate.ln() } else { f64::NEG_INFINITY };
        }
        self.shape * self.rate.ln() + (self.shape - 1.0) * z.ln() - self.rate * z - ln_gamma(self.shape)
    }

    /// Rejection from the uniform law on the bin.
    fn draw(&self, rng: &mut StreamRng) -> f64 {
        loop {
            let z = self.lo + (self.hi - self.lo) * rng.uniform();
            if rng.uniform().ln() <= self.log_density(z) - self.log_max {
                return z.min(self.hi);
            }
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Removes the components along the orthonormal `basis` (two passes).
fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
}

/// Channel drawn from its law given the ZF SINR `z` of stream 1.
///
/// Columns 2..N are unconditioned; column 1 keeps its unconditioned
/// component inside their span, and its orthogonal component gets an
/// isotropic direction with squared norm exactly `z`. Since that squared norm
/// is independent of everything else, this is the exact conditional law.
pub fn zf_conditional_channel(m: usize, n: usize, z: f64, rng: &mut StreamRng) -> Result<ChannelMatrix> {
    if n == 0 || m < n {
        return Err(Error::Domain(format!("need M >= N >= 1, got M={m}, N={n}")));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("conditioning value must be > 0, got {z}")));
    }
    let var = 1.0 / n as f64;
    let rest: Vec<Vec<Complex64>> = (1..n).map(|_| (0..m).map(|_| rng.complex_normal(var)).collect()).collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n - 1);
    for col in &rest {
        let mut v = col.clone();
        project_out(&mut v, &basis);
        let norm = dot(&v, &v).re.sqrt();
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
    let g: Vec<Complex64> = (0..m).map(|_| rng.complex_normal(var)).collect();
    let mut perp = g.clone();
    project_out(&mut perp, &basis);
    let parallel: Vec<Complex64> = g.iter().zip(&perp).map(|(a, b)| a - b).collect();
    let mut dir: Vec<Complex64> = (0..m).map(|_| rng.complex_normal(1.0)).collect();
    project_out(&mut dir, &basis);
    let scale = (z / dot(&dir, &dir).re).sqrt();
    let h1: Vec<Complex64> = parallel.iter().zip(&dir).map(|(p, d)| p + d * scale).collect();
    let h = CMatrix::from_fn(m, n, |r, c| if c == 0 { h1[r] } else { rest[c - 1][r] });
    ChannelMatrix::from_matrix(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::sampler::sinr_zf;

    #[test]
    fn conditional_channel_hits_target() {
        let mut rng = StreamRng::new(3, 0, 0);
        for (m, n, z) in [(8, 8, 3.0), (32, 16, 2.5), (4, 1, 0.7), (6, 3, 1e-3)] {
            let h = zf_conditional_channel(m, n, z, &mut rng).unwrap();
            assert!((sinr_zf(&h).unwrap() - z).abs() < 1e-10 * z);
        }
        assert!(zf_conditional_channel(4, 2, 0.0, &mut rng).is_err());
    }

    #[test]
    fn truncated_law_stays_in_bin() {
        let law = ZfConditionalLaw::new(8, 8, 2.9, 3.1).unwrap();
        let mut rng = StreamRng::new(1, 1, 0);
        let draws: Vec<f64> = (0..20_000).map(|_| law.draw(&mut rng)).collect();
        assert!(draws.iter().all(|&z| (2.9..=3.1).contains(&z)));
        // Exponential with rate 8 on [2.9, 3.1]: mean 2.9 + 1/8 − 0.2/(e^{1.6} − 1).
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let exact = 2.9 + 0.125 - 0.2 / (1.6f64.exp() - 1.0);
        assert!((mean - exact).abs() < 2e-3, "{mean} vs {exact}");
    }

    #[test]
    fn plain_sampler_rejects_and_reports() {
        let p = SystemParams::with_dims(4, 4, 1.0, Receiver::Zf).unwrap();
        let stats = run_conditional_weights(&p, &McConfig::new(2000, 5), 20.0, 21.0, 8, ConditionalSampler::Plain).unwrap();
        assert_eq!(stats.conditioned, 0);
        assert!(stats.bins.is_empty() && stats.largest.is_none());
        assert_eq!(stats.warnings.len(), 2);
        let mmse = SystemParams::with_dims(4, 4, 1.0, Receiver::Mmse).unwrap();
        assert!(run_conditional_weights(&mmse, &McConfig::new(10, 5), 1.0, 2.0, 8, ConditionalSampler::ZfExact).is_err());
    }

    #[test]
    fn ergodic_bin_flat_at_large_n() {
        let p = SystemParams::with_dims(16, 8, 1.0, Receiver::Zf).unwrap();
        let stats =
            run_conditional_weights(&p, &McConfig::new(4000, 2), 0.95, 1.05, 4, ConditionalSampler::ZfExact).unwrap();
        assert_eq!(stats.conditioned, 4000);
        for b in &stats.bins {
            assert!((b.analytic_t.unwrap() - 1.0).abs() < 0.06);
            assert!((b.mean_t - 1.0).abs() < 0.25, "{b:?}");
        }
    }
}
