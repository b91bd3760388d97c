//! Large-deviation tails of the MMSE and zero-forcing SINR of Gaussian MIMO
//! channels, i.e. of diagonal elements of `(I + ρH†H)⁻¹` and `(H†H)⁻¹`,
//! together with Monte-Carlo machinery to check them.
//!
//! All analytic quantities are functions of the normalized SINR `z = SINR/ρ`
//! and of `α = M/N`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod montecarlo;
pub mod mp;
pub mod params;
pub mod quad;
pub mod ratefn;
pub mod roots;
pub mod weights;

pub use error::{Error, Result};
pub use params::{Dims, Receiver, SystemParams};
