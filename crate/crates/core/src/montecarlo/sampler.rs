//! Channel draws and the exact per-sample SINR.

use num_complex::Complex64;
use serde::Serialize;

use super::linalg::{hermitian_eig, CMatrix, Cholesky, HermitianEigen};
use super::rng::{purpose, StreamRng};
use crate::error::{Error, Result};
use crate::params::{Receiver, SystemParams};

/// `M×N` channel with i.i.d. `CN(0, 1/N)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    h: CMatrix,
}

impl ChannelMatrix {
    pub fn from_matrix(h: CMatrix) -> Result<Self> {
        if h.cols() == 0 || h.rows() < h.cols() {
            return Err(Error::Domain(format!(
                "channel must be M x N with M >= N >= 1, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        Ok(Self { h })
    }

    pub fn m(&self) -> usize {
        self.h.rows()
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    /// `H†H`.
    pub fn gram(&self) -> CMatrix {
        self.h.gram()
    }
}

/// Fills an `M×N` channel from `rng`, row by row.
pub fn sample_channel(m: usize, n: usize, rng: &mut StreamRng) -> Result<ChannelMatrix> {
    if n == 0 || m < n {
        return Err(Error::Domain(format!("need M >= N >= 1, got M={m}, N={n}")));
    }
    let var = 1.0 / n as f64;
    Ok(ChannelMatrix { h: CMatrix::from_fn(m, n, |_, _| rng.complex_normal(var)) })
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("rho must be finite and > 0, got {rho}")))
    }
}

fn check_stream(i: usize, n: usize) -> Result<()> {
    if i < n {
        Ok(())
    } else {
        Err(Error::Domain(format!("stream {i} out of range for N={n}")))
    }
}

/// `I + ρW` for a Gram matrix `W`.
fn regularized(w: &CMatrix, rho: f64) -> CMatrix {
    let n = w.rows();
    CMatrix::from_fn(n, n, |r, c| {
        let v = w[(r, c)] * rho;
        if r == c {
            v + Complex64::new(1.0, 0.0)
        } else {
            v
        }
    })
}

fn finite(z: f64) -> Result<f64> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::Numeric(format!("non-finite SINR {z}")))
    }
}

/// Normalized MMSE SINR of stream `i`: `(1/[(I+ρH†H)⁻¹]_{ii} − 1)/ρ`.
pub fn sinr_mmse_from_gram(w: &CMatrix, rho: f64, i: usize) -> Result<f64> {
    check_rho(rho)?;
    check_stream(i, w.rows())?;
    let ch = Cholesky::new(&regularized(w, rho))?;
    finite((1.0 / ch.inverse_diagonal_entry(i) - 1.0) / rho)
}

/// Normalized ZF SINR of stream `i`: `1/[(H†H)⁻¹]_{ii}`.
pub fn sinr_zf_from_gram(w: &CMatrix, i: usize) -> Result<f64> {
    check_stream(i, w.rows())?;
    let ch = Cholesky::new(w)?;
    finite(1.0 / ch.inverse_diagonal_entry(i))
}

/// MMSE `z` of the first stream. Never below the ZF value of the same
/// channel, and decreasing in `ρ` toward it.
pub fn sinr_mmse(h: &ChannelMatrix, rho: f64) -> Result<f64> {
    sinr_mmse_from_gram(&h.gram(), rho, 0)
}

/// ZF `z` of the first stream.
pub fn sinr_zf(h: &ChannelMatrix) -> Result<f64> {
    sinr_zf_from_gram(&h.gram(), 0)
}

pub fn sinr(h: &ChannelMatrix, params: &SystemParams) -> Result<f64> {
    match params.receiver {
        Receiver::Mmse => sinr_mmse(h, params.rho),
        Receiver::Zf => sinr_zf(h),
    }
}

/// `z` of every stream of one channel (correlated values).
pub fn sinr_all_streams(h: &ChannelMatrix, params: &SystemParams) -> Result<Vec<f64>> {
    let w = h.gram();
    let diag = match params.receiver {
        Receiver::Mmse => {
            check_rho(params.rho)?;
            Cholesky::new(&regularized(&w, params.rho))?
                .inverse_diagonal()
                .into_iter()
                .map(|d| (1.0 / d - 1.0) / params.rho)
                .collect::<Vec<_>>()
        }
        Receiver::Zf => Cholesky::new(&w)?.inverse_diagonal().into_iter().map(|d| 1.0 / d).collect(),
    };
    diag.into_iter().map(finite).collect()
}

/// `t_j = N·|U_{ij}|²` for stream `i`; column `j` of `U` is eigenvector `j`.
pub fn weights_from_eig(u: &CMatrix, i: usize) -> Vec<f64> {
    let n = u.cols() as f64;
    (0..u.cols()).map(|j| n * u[(i, j)].norm_sqr()).collect()
}

/// One draw: `z` of stream 1, ascending eigenvalues of `H†H` and the weights
/// of stream 1 on each eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinrSample {
    pub z: f64,
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SinrSample {
    /// `z` rebuilt from the spectrum: `1/(1+ρz) = Σ t_j/(N(1+ρx_j))` (MMSE),
    /// `1/z = Σ t_j/(N x_j)` (ZF).
    pub fn spectral_z(&self, params: &SystemParams) -> f64 {
        let n = self.weights.len() as f64;
        let pairs = self.eigenvalues.iter().zip(&self.weights);
        match params.receiver {
            Receiver::Mmse => {
                let rho = params.rho;
                let inv: f64 = pairs.map(|(x, t)| t / (n * (1.0 + rho * x))).sum();
                (1.0 / inv - 1.0) / rho
            }
            Receiver::Zf => 1.0 / pairs.map(|(x, t)| t / (n * x)).sum::<f64>(),
        }
    }
}

/// Full sample with eigendecomposition.
pub fn analyze_channel(h: &ChannelMatrix, params: &SystemParams) -> Result<SinrSample> {
    let w = h.gram();
    let z = match params.receiver {
        Receiver::Mmse => sinr_mmse_from_gram(&w, params.rho, 0)?,
        Receiver::Zf => sinr_zf_from_gram(&w, 0)?,
    };
    let HermitianEigen { values, vectors, .. } = hermitian_eig(&w)?;
    Ok(SinrSample { z, weights: weights_from_eig(&vectors, 0), eigenvalues: values })
}

/// Channel number `index` of the run keyed by `seed`.
pub fn channel_draw(params: &SystemParams, seed: u64, index: u64) -> Result<ChannelMatrix> {
    let d = params.dims()?;
    sample_channel(d.m, d.n, &mut StreamRng::new(seed, purpose::CHANNEL, index))
}
