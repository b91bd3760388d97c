//! Parallel plain Monte-Carlo over channel draws.
//!
//! Draw indices are cut into fixed chunks; each chunk is produced by one
//! worker and chunks are merged in index order, so the output is identical
//! for any worker count.

use rayon::prelude::*;
use serde::Serialize;

use super::sampler::{channel_draw, sinr, sinr_all_streams};
use super::stats::{Histogram, Summary};
use crate::error::{Error, Result};
use crate::params::SystemParams;

pub const CHUNK: u64 = 4096;
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
    /// Use all `N` streams of each matrix instead of stream 1 only. The
    /// values are correlated within a matrix: fine for histograms, wrong for
    /// tests that assume independence.
    pub all_streams: bool,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, workers: 0, all_streams: false }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }
}

/// Runs `f(first, end)` over consecutive chunks of `0..total` and returns
/// the chunk results in order.
pub(crate) fn chunked<T, F>(total: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numeric(format!("cannot start worker pool: {e}")))?;
    let chunks = total.div_ceil(CHUNK);
    pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| f(c * CHUNK, ((c + 1) * CHUNK).min(total)))
            .collect()
    })
}

/// Normalized SINR values in draw order.
pub fn sample_z(params: &SystemParams, cfg: &McConfig) -> Result<Vec<f64>> {
    params.dims()?;
    let parts = chunked(cfg.samples, cfg.workers, |start, end| {
        let mut out = Vec::with_capacity((end - start) as usize);
        for idx in start..end {
            let h = channel_draw(params, cfg.seed, idx)?;
            if cfg.all_streams {
                out.extend(sinr_all_streams(&h, params)?);
            } else {
                out.push(sinr(&h, params)?);
            }
        }
        Ok(out)
    })?;
    Ok(parts.concat())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRun {
    pub histogram: Histogram,
    pub summary: Summary,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

/// Histogram of `z` over `[lo, hi)` plus moments of all draws.
pub fn run_histogram(
    params: &SystemParams,
    cfg: &McConfig,
    lo: f64,
    hi: f64,
    bins: usize,
) -> Result<HistogramRun> {
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            cfg.samples
        )));
    }
    let mut histogram = Histogram::uniform(lo, hi, bins)?;
    let samples = sample_z(params, cfg)?;
    for &z in &samples {
        histogram.add(z);
    }
    let summary = Summary::from_samples(&samples)?;
    Ok(HistogramRun { histogram, summary, samples })
}
