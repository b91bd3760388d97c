//! Monte-Carlo command: histogram CSV, summary JSON, optional weights CSV.

use std::path::PathBuf;

use serde_json::json;
use sinrtail::distributions::{
    default_grid, gamma_fit_in_z, log_normalizer, logpdf_unnormalized, normalize, truncated_gaussian_cdf,
    truncated_gaussian_logpdf, zf_exact, DEFAULT_POINTS,
};
use sinrtail::montecarlo::{
    ks_critical_value, ks_statistic, run_conditional_weights, run_histogram, ConditionalWeightStats, McConfig,
};
use sinrtail::ratefn::ergodic_stats;
use sinrtail::{Receiver, SystemParams};

use crate::args::{parse_interval, McArgs};
use crate::error::{invalid, CliResult};
use crate::output::{json_num, pretty, write_to, Table};

pub struct McFiles {
    pub histogram: PathBuf,
    pub summary: PathBuf,
    pub weights: Option<PathBuf>,
}

/// z_erg ± 8 standard deviations, clipped at 0; the automatic density grid
/// when the variance vanishes.
fn default_window(p: &SystemParams) -> CliResult<(f64, f64)> {
    let erg = ergodic_stats(p);
    if erg.degenerate {
        let g = default_grid(p, DEFAULT_POINTS)?;
        return Ok((0.0, g[g.len() - 1]));
    }
    let sd = (erg.v_erg / p.dims()?.n as f64).sqrt();
    Ok(((erg.z_erg - 8.0 * sd).max(0.0), erg.z_erg + 8.0 * sd))
}

fn weights_table(stats: &ConditionalWeightStats) -> Table {
    let mut t = Table::new(vec!["x_center", "x_lo", "x_hi", "count", "mean_t", "se_t", "analytic_t"]);
    for b in &stats.bins {
        t.push(vec![
            b.center().into(),
            b.x_lo.into(),
            b.x_hi.into(),
            b.count.into(),
            b.mean_t.into(),
            b.se_t.into(),
            b.analytic_t.into(),
        ]);
    }
    t
}

pub fn mc(args: &McArgs, verbose: bool) -> CliResult<McFiles> {
    let p = args.system.params_with_dims()?;
    let d = p.dims()?;
    if args.bins == 0 {
        return invalid("--bins must be positive");
    }
    if args.tag.is_empty() || args.tag.contains(['/', '\\']) {
        return invalid("--tag must be a plain file name prefix");
    }
    let (lo, hi) = match &args.window {
        Some(w) => parse_interval(w)?,
        None => default_window(&p)?,
    };
    let cfg = McConfig { samples: args.samples, seed: args.seed, workers: args.workers, all_streams: args.all_streams };
    if verbose {
        eprintln!("sampling {} channels ({}x{}, {})", args.samples, d.m, d.n, p.receiver);
    }
    let run = run_histogram(&p, &cfg, lo, hi, args.bins)?;
    let h = &run.histogram;

    let log_norm = log_normalizer(&p)?;
    let gamma = gamma_fit_in_z(&p).ok();
    let exact = match p.receiver {
        Receiver::Zf => Some(zf_exact(d.m, d.n, p.rho)?),
        Receiver::Mmse => None,
    };
    let mut table = Table::new(vec!["z", "density", "se", "analytic", "gaussian", "gamma_fit"]);
    for ((z, dens), se) in h.centers().into_iter().zip(h.density()).zip(h.density_se()) {
        let analytic = if z > 0.0 { (logpdf_unnormalized(z, &p)? - log_norm).exp() } else { 0.0 };
        table.push(vec![
            z.into(),
            dens.into(),
            se.into(),
            analytic.into(),
            truncated_gaussian_logpdf(z, &p).ok().map(f64::exp).into(),
            gamma.map(|g| g.pdf(z)).into(),
        ]);
    }

    let curve = normalize(&default_grid(&p, DEFAULT_POINTS)?, &p)?;
    let analytic_cdf = curve.cdf_fn();
    let ks_analytic = ks_statistic(&run.samples, &analytic_cdf)?;
    let ks_gauss = match truncated_gaussian_cdf(1.0, &p) {
        Ok(_) => Some(ks_statistic(&run.samples, |z| truncated_gaussian_cdf(z, &p).unwrap_or(f64::NAN))?),
        Err(_) => None,
    };
    let ks_gamma = match gamma {
        Some(g) => Some(ks_statistic(&run.samples, |z| g.cdf(z))?),
        None => None,
    };
    let ks_exact = match exact {
        Some(g) => Some(ks_statistic(&run.samples, |z| g.cdf(p.rho * z))?),
        None => None,
    };
    let mut warnings: Vec<String> = Vec::new();
    if args.all_streams {
        warnings.push("all streams used: values are correlated within a matrix, KS critical value does not apply".into());
    }
    if ergodic_stats(&p).degenerate {
        warnings.push("ZF with alpha = 1: zero ergodic variance, no Gaussian or Gamma-fit reference".into());
    }

    let prefix = |suffix: &str| args.out_dir.join(format!("{}_{suffix}", args.tag));
    let files = McFiles {
        histogram: prefix("histogram.csv"),
        summary: prefix("summary.json"),
        weights: args.weights_z.as_ref().map(|_| prefix("weights.csv")),
    };

    let mut weights_json = serde_json::Value::Null;
    if let (Some(spec), Some(path)) = (&args.weights_z, &files.weights) {
        let (z_lo, z_hi) = parse_interval(spec)?;
        if verbose {
            eprintln!("collecting conditional weights for z in [{z_lo}, {z_hi}]");
        }
        let stats = run_conditional_weights(&p, &cfg, z_lo, z_hi, args.x_bins, args.sampler.into())?;
        warnings.extend(stats.warnings.iter().cloned());
        let extreme = |e: Option<sinrtail::montecarlo::ExtremeStats>| {
            e.map(|e| {
                json!({
                    "mean_weight": json_num(e.mean_weight),
                    "weight_se": json_num(e.weight_se),
                    "mean_position": json_num(e.mean_position),
                    "position_se": json_num(e.position_se),
                })
            })
        };
        weights_json = json!({
            "z_lo": z_lo,
            "z_hi": z_hi,
            "sampler": stats.sampler,
            "conditioned": stats.conditioned,
            "outside_bulk": stats.outside_bulk,
            "suppressed_bins": stats.suppressed.len(),
            "largest": extreme(stats.largest),
            "smallest": extreme(stats.smallest),
        });
        std::fs::create_dir_all(&args.out_dir)?;
        write_to(Some(path), &weights_table(&stats).to_csv())?;
    }

    let s = &run.summary;
    let opt = |x: Option<f64>| x.map_or(serde_json::Value::Null, json_num);
    let summary = json!({
        "config": {
            "receiver": p.receiver.to_string(),
            "M": d.m,
            "N": d.n,
            "rho": p.rho,
            "samples": args.samples,
            "seed": args.seed,
            "all_streams": args.all_streams,
            "bins": args.bins,
            "window": [lo, hi],
        },
        "ergodic": {
            "z_erg": ergodic_stats(&p).z_erg,
            "v_erg": ergodic_stats(&p).v_erg,
        },
        "summary": {
            "count": s.count,
            "mean": json_num(s.mean),
            "mean_se": json_num(s.mean_se),
            "variance": json_num(s.variance),
            "variance_se": json_num(s.variance_se),
            "min": json_num(s.min),
            "max": json_num(s.max),
            "sinr_mean": json_num(p.rho * s.mean),
        },
        "histogram": {
            "below": h.below,
            "above": h.above,
        },
        "ks": {
            "analytic": json_num(ks_analytic),
            "gaussian": opt(ks_gauss),
            "gamma_fit": opt(ks_gamma),
            "exact": opt(ks_exact),
            "critical_1pct": json_num(ks_critical_value(run.samples.len(), 0.01)?),
        },
        "conditional_weights": weights_json,
        "warnings": warnings,
    });

    std::fs::create_dir_all(&args.out_dir)?;
    write_to(Some(&files.histogram), &table.to_csv())?;
    write_to(Some(&files.summary), &pretty(&summary))?;
    Ok(files)
}
