use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sinrtail::distributions::OutageMethod;
use sinrtail::montecarlo::ConditionalSampler;
use sinrtail::{Receiver, SystemParams};

use crate::error::{invalid, CliResult};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "sinrtail", version, about = "Large-deviation tails of MIMO MMSE and ZF SINR")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Progress messages on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Marchenko–Pastur bulk edges a, b.
    Edges(EdgesArgs),
    /// Rate function, tilt parameters and log-densities over a z grid.
    Rate(RateArgs),
    /// Normalized densities of z.
    Pdf(PdfArgs),
    /// Outage probability P(SINR < target).
    Outage(OutageArgs),
    /// Conditional eigenvector weight profiles.
    Weights(WeightsArgs),
    /// Monte-Carlo histograms, summaries and conditional weights.
    Mc(McArgs),
    /// Run the invariant suites and report residuals.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Antenna ratio M/N (>= 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Receive antennas.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Transmit streams.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Signal-to-noise ratio (ZF uses it only to scale beta = rho*z).
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value = "mmse")]
    pub receiver: Receiver,
}

impl SystemArgs {
    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or(1.0)
    }

    /// Parameters with dimensions when `--M/--N` are given, asymptotic
    /// otherwise.
    pub fn params(&self) -> CliResult<SystemParams> {
        let rho = self.rho();
        match (self.m, self.n) {
            (Some(m), Some(n)) => {
                if n == 0 || m < n {
                    return invalid(format!("need M >= N >= 1, got M={m}, N={n}"));
                }
                if let Some(a) = self.alpha {
                    let ratio = m as f64 / n as f64;
                    if (a - ratio).abs() > 1e-12 * ratio {
                        return invalid(format!("--alpha {a} disagrees with M/N = {ratio}"));
                    }
                }
                Ok(SystemParams::with_dims(m, n, rho, self.receiver)?)
            }
            (None, None) => match self.alpha {
                Some(a) => Ok(SystemParams::asymptotic(a, rho, self.receiver)?),
                None => invalid("give --alpha or both --M and --N"),
            },
            _ => invalid("--M and --N must be given together"),
        }
    }

    pub fn params_with_dims(&self) -> CliResult<SystemParams> {
        if self.m.is_none() || self.n.is_none() {
            return invalid("this command needs --M and --N");
        }
        self.params()
    }

    /// Note printed when ZF is combined with an explicit `--rho`.
    pub fn zf_rho_note(&self) -> Option<&'static str> {
        (self.receiver == Receiver::Zf && self.rho.is_some())
            .then_some("note: ZF ignores rho except for the scaling beta = rho*z")
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (tables default to csv, records to json).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct EdgesArgs {
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Grid `min:max:step`; defaults to z_erg ± 8 standard deviations.
    #[arg(long)]
    pub z: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PdfArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Grid `min:max:step`; defaults to the automatic uniform grid.
    #[arg(long)]
    pub z: Option<String>,
    /// Points of the automatic grid.
    #[arg(long, default_value_t = sinrtail::distributions::DEFAULT_POINTS)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutageArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// SINR threshold (gamma for MMSE, beta for ZF).
    #[arg(long)]
    pub target: f64,
    /// analytic, gaussian, gamma-fit or exact (ZF only).
    #[arg(long, default_value = "analytic")]
    pub method: OutageMethod,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Comma-separated z values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub z: Vec<f64>,
    /// Eigenvalue nodes per profile.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SamplerArg {
    Plain,
    ZfExact,
}

impl From<SamplerArg> for ConditionalSampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Plain => ConditionalSampler::Plain,
            SamplerArg::ZfExact => ConditionalSampler::ZfExact,
        }
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0: one per core).
    #[arg(long, env = "SINRTAIL_WORKERS", default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    /// Histogram window `min:max`; defaults to z_erg ± 8 standard deviations.
    #[arg(long)]
    pub window: Option<String>,
    /// Use all N streams of every matrix (correlated values; KS is then
    /// reported but not meaningful).
    #[arg(long)]
    pub all_streams: bool,
    /// Also collect eigenvector weights conditioned on z in `min:max`.
    #[arg(long)]
    pub weights_z: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub x_bins: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub sampler: SamplerArg,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// File name prefix.
    #[arg(long, default_value = "mc")]
    pub tag: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict the grid to one alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Restrict the grid to one rho.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Restrict the grid to one receiver.
    #[arg(long)]
    pub receiver: Option<Receiver>,
    /// Monte-Carlo samples per configuration for the per-sample identities.
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    /// Inject a deliberate fault to check that breaches are reported.
    #[arg(long)]
    pub self_test_fault: bool,
    /// Write the JSON report here as well.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Parses `min:max:step` into an inclusive grid.
pub fn parse_range(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return invalid(format!("range `{spec}` is not min:max:step"));
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| crate::error::CliError::Validation(format!("bad number `{p}` in `{spec}`"))))
        .collect::<CliResult<Vec<_>>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || !(hi >= lo) || !(step > 0.0) {
        return invalid(format!("range `{spec}` needs finite min <= max and step > 0"));
    }
    let count = ((hi - lo) / step * (1.0 + 1e-12)).floor() as u64 + 1;
    if count > 1_000_000 {
        return invalid(format!("range `{spec}` has {count} points (limit 1000000)"));
    }
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

/// Parses `min:max`.
pub fn parse_interval(spec: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || crate::error::CliError::Validation(format!("interval `{spec}` is not min:max"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let g = parse_range("0.2:4.0:0.01").unwrap();
        assert_eq!(g.len(), 381);
        assert!((g[380] - 4.0).abs() < 1e-12);
        assert_eq!(parse_range("1:1:0.5").unwrap(), vec![1.0]);
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("a:1:0.1").is_err());
        assert_eq!(parse_interval("2.9:3.1").unwrap(), (2.9, 3.1));
        assert!(parse_interval("3:2").is_err());
    }

    #[test]
    fn system_validation() {
        let mut s = SystemArgs { alpha: Some(2.0), m: Some(6), n: Some(3), rho: None, receiver: Receiver::Mmse };
        assert_eq!(s.params().unwrap().alpha, 2.0);
        s.alpha = Some(1.5);
        assert!(s.params().is_err());
        s.n = None;
        assert!(s.params().is_err());
        s.m = None;
        assert!(s.params().unwrap().dims.is_none());
        assert!(s.params_with_dims().is_err());
    }
}
