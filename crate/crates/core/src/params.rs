//! Channel geometry, SNR and the receiver-dependent SINR map `s(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Receiver {
    Mmse,
    /// Zero forcing. Treated as the ρ → ∞ limit of MMSE, analytically.
    Zf,
}

impl std::fmt::Display for Receiver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Receiver::Mmse => f.write_str("mmse"),
            Receiver::Zf => f.write_str("zf"),
        }
    }
}

impl std::str::FromStr for Receiver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mmse" => Ok(Receiver::Mmse),
            "zf" => Ok(Receiver::Zf),
            other => Err(Error::Domain(format!("unknown receiver `{other}`"))),
        }
    }
}

/// Antenna counts: `m` receive, `n` transmit, `n <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
}

/// Channel geometry and SNR.
///
/// `alpha = M/N >= 1`. `rho` is the per-stream SNR; for ZF it only scales
/// the normalized SINR `z` into the SINR `β = ρ z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub alpha: f64,
    pub rho: f64,
    pub receiver: Receiver,
    pub dims: Option<Dims>,
}

impl SystemParams {
    /// Large-N parameters given only the ratio α.
    pub fn asymptotic(alpha: f64, rho: f64, receiver: Receiver) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::Domain(format!("alpha must be finite and >= 1, got {alpha}")));
        }
        check_rho(rho)?;
        Ok(Self { alpha, rho, receiver, dims: None })
    }

    /// Finite-size parameters; `alpha` is set to `m / n`.
    pub fn with_dims(m: usize, n: usize, rho: f64, receiver: Receiver) -> Result<Self> {
        if n == 0 || m < n {
            return Err(Error::Domain(format!("need M >= N >= 1, got M={m}, N={n}")));
        }
        check_rho(rho)?;
        Ok(Self {
            alpha: m as f64 / n as f64,
            rho,
            receiver,
            dims: Some(Dims { m, n }),
        })
    }

    pub fn dims(&self) -> Result<Dims> {
        self.dims
            .ok_or_else(|| Error::Domain("antenna counts M, N required".into()))
    }

    /// `s(x)`: `1/(1+ρx)` for MMSE, `1/x` for ZF.
    pub fn s(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("s(x) needs x >= 0, got {x}")));
        }
        if self.receiver == Receiver::Zf && x == 0.0 {
            return Err(Error::Domain("ZF s(x) = 1/x is undefined at x = 0".into()));
        }
        Ok(self.s_unchecked(x))
    }

    #[inline]
    pub(crate) fn s_unchecked(&self, x: f64) -> f64 {
        1.0 / self.sigma(x)
    }

    /// `1/s(x)`, which stays finite where `s` does not.
    #[inline]
    pub(crate) fn sigma(&self, x: f64) -> f64 {
        match self.receiver {
            Receiver::Mmse => 1.0 + self.rho * x,
            Receiver::Zf => x,
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("rho must be finite and > 0, got {rho}")))
    }
}
