//! Analytic commands: edges, rate, pdf, outage, weights.

use sinrtail::distributions::{
    default_grid, gamma_fit_in_z, log_normalizer, logpdf_unnormalized, outage, sinr_from_z,
    truncated_gaussian_logpdf, zf_exact,
};
use sinrtail::mp::mp_edges;
use sinrtail::ratefn::{critical_points, ergodic_stats, gaussian_logpdf, rate_function, solve_tilt};
use sinrtail::weights::weight_profile;
use sinrtail::{Receiver, SystemParams};

use crate::args::{parse_range, EdgesArgs, OutageArgs, PdfArgs, RateArgs, WeightsArgs};
use crate::error::{invalid, CliResult};
use crate::output::{Cell, Output, Table};

pub fn edges(args: &EdgesArgs) -> CliResult<Output> {
    let s = mp_edges(args.alpha)?;
    Ok(Output::Record(vec![("a", s.a.into()), ("b", s.b.into())]))
}

/// z_erg ± 8 standard deviations in 400 steps; asymptotic parameters use
/// `N = 1` for the width. The degenerate ZF case spans both critical points.
fn default_rate_grid(p: &SystemParams) -> Vec<f64> {
    let erg = ergodic_stats(p);
    let (lo, hi) = if erg.degenerate {
        (0.01, critical_points(p.alpha).1 + 2.0)
    } else {
        let n = p.dims.map_or(1.0, |d| d.n as f64);
        let sd = (erg.v_erg / n).sqrt();
        ((erg.z_erg - 8.0 * sd).max(1e-3 * erg.z_erg), erg.z_erg + 8.0 * sd)
    };
    let steps = 400;
    (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect()
}

/// Adds `z_erg` to a grid it falls inside of.
fn with_ergodic_point(mut grid: Vec<f64>, z_erg: f64) -> Vec<f64> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if z_erg > lo && z_erg < hi && !grid.iter().any(|&z| (z - z_erg).abs() <= 1e-12 * z_erg) {
        let i = grid.partition_point(|&z| z < z_erg);
        grid.insert(i, z_erg);
    }
    grid
}

fn check_positive(grid: &[f64]) -> CliResult<()> {
    if grid.iter().any(|&z| !(z > 0.0)) {
        return invalid("z grid must be strictly positive");
    }
    Ok(())
}

pub fn rate(args: &RateArgs) -> CliResult<Output> {
    let p = args.system.params()?;
    let grid = match &args.z {
        Some(spec) => parse_range(spec)?,
        None => default_rate_grid(&p),
    };
    check_positive(&grid)?;
    let grid = with_ergodic_point(grid, ergodic_stats(&p).z_erg);

    let log_norm = match p.dims {
        Some(_) => Some(log_normalizer(&p)?),
        None => None,
    };
    let gamma = p.dims.and_then(|_| gamma_fit_in_z(&p).ok());
    let mut table = Table::new(vec![
        "z",
        "regime",
        "pole",
        "lambda",
        "k",
        "w",
        "detached_weight",
        "rate",
        "logpdf_analytic",
        "logpdf_gaussian",
        "logpdf_gamma_fit",
    ]);
    for z in grid {
        let t = solve_tilt(z, &p)?;
        let analytic = match log_norm {
            Some(ln) => Some(logpdf_unnormalized(z, &p)? - ln),
            None => None,
        };
        table.push(vec![
            z.into(),
            t.regime.to_string().into(),
            t.pole.into(),
            t.lambda.into(),
            t.k.into(),
            t.w.into(),
            t.detached_weight.into(),
            rate_function(z, &p)?.into(),
            analytic.into(),
            gaussian_logpdf(z, &p).ok().into(),
            gamma.map(|g| g.ln_pdf(z)).into(),
        ]);
    }
    Ok(Output::Table(table))
}

pub fn pdf(args: &PdfArgs) -> CliResult<Output> {
    let p = args.system.params_with_dims()?;
    let grid = match &args.z {
        Some(spec) => parse_range(spec)?,
        None => default_grid(&p, args.points)?,
    };
    check_positive(&grid)?;
    let log_norm = log_normalizer(&p)?;
    let gamma = gamma_fit_in_z(&p).ok();
    let exact = match p.receiver {
        Receiver::Zf => {
            let d = p.dims()?;
            Some(zf_exact(d.m, d.n, p.rho)?)
        }
        Receiver::Mmse => None,
    };
    let mut table =
        Table::new(vec!["z", "sinr", "pdf_analytic", "pdf_gaussian", "pdf_gamma_fit", "pdf_exact"]);
    for z in grid {
        table.push(vec![
            z.into(),
            sinr_from_z(z, &p).into(),
            (logpdf_unnormalized(z, &p)? - log_norm).exp().into(),
            truncated_gaussian_logpdf(z, &p).ok().map(f64::exp).into(),
            gamma.map(|g| g.pdf(z)).into(),
            // Density of z = β/ρ.
            exact.map(|g| p.rho * g.pdf(sinr_from_z(z, &p))).into(),
        ]);
    }
    Ok(Output::Table(table))
}

pub fn outage_cmd(args: &OutageArgs) -> CliResult<Output> {
    let p = args.system.params_with_dims()?;
    let d = p.dims()?;
    let r = outage(args.target, &p, args.method)?;
    let method = serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    Ok(Output::Record(vec![
        ("receiver", p.receiver.to_string().into()),
        ("M", (d.m as u64).into()),
        ("N", (d.n as u64).into()),
        ("rho", p.rho.into()),
        ("target", r.target.into()),
        ("method", method.into()),
        ("probability", r.probability.into()),
    ]))
}

pub fn weights(args: &WeightsArgs) -> CliResult<Output> {
    let p = args.system.params()?;
    let mut table = Table::new(vec!["z", "regime", "x", "t", "detached_y", "detached_weight", "w"]);
    for &z in &args.z {
        let prof = weight_profile(z, &p, args.points)?;
        let (y, wt, w) = match prof.detached {
            Some(d) => (Cell::from(d.y), Cell::from(d.weight), Cell::from(d.w)),
            None => (Cell::Empty, Cell::Empty, Cell::Empty),
        };
        for (x, t) in prof.xs.iter().zip(&prof.ts) {
            table.push(vec![
                z.into(),
                prof.regime.to_string().into(),
                (*x).into(),
                (*t).into(),
                y.clone(),
                wt.clone(),
                w.clone(),
            ]);
        }
    }
    Ok(Output::Table(table))
}
