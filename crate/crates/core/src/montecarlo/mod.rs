//! Monte-Carlo ground truth: Gaussian channels, exact SINR, eigenvalues and
//! eigenvector weights.

pub mod conditional;
pub mod linalg;
pub mod rng;
pub mod runner;
pub mod sampler;
pub mod stats;

pub use conditional::{
    run_conditional_weights, zf_conditional_channel, ConditionalSampler, ConditionalWeightStats,
    ExtremeStats, WeightBin,
};
pub use linalg::{hermitian_eig, CMatrix, Cholesky, HermitianEigen};
pub use rng::StreamRng;
pub use runner::{run_histogram, sample_z, HistogramRun, McConfig};
pub use sampler::{
    analyze_channel, channel_draw, sample_channel, sinr, sinr_all_streams, sinr_mmse, sinr_zf,
    weights_from_eig, ChannelMatrix, SinrSample,
};
pub use stats::{ks_critical_value, ks_statistic, Histogram, Summary};
