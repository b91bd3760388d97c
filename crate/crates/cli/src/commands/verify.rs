//! Invariant suites with maximal residuals per family.

use serde_json::json;
use sinrtail::distributions::logpdf_unnormalized;
use sinrtail::montecarlo::{analyze_channel, channel_draw};
use sinrtail::mp::{mp_edges, stieltjes_mp};
use sinrtail::quad::mp_integrate_converged;
use sinrtail::ratefn::{
    critical_points, ergodic_stats, pole_location, rate_exponent_numeric, rate_function, tilt_parameters,
};
use sinrtail::weights::{detached_weight, detached_weight_closed_form};
use sinrtail::{Receiver, SystemParams};

use crate::args::VerifyArgs;
use crate::error::{invalid, CliResult};
use crate::output::{json_num, pretty, Format};

const SEED: u64 = 7;

#[derive(Debug, Clone)]
pub struct Family {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl Family {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, max_residual: 0.0, tolerance, cases: 0 }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        // NaN residuals count as breaches.
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
        }
    }

    pub fn pass(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub families: Vec<Family>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.families.iter().all(Family::pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{:<24} {:>12} {:>10} {:>7}  status\n", "family", "max_residual", "tolerance", "cases");
        for f in &self.families {
            s.push_str(&format!(
                "{:<24} {:>12.3e} {:>10.0e} {:>7}  {}\n",
                f.name,
                f.max_residual,
                f.tolerance,
                f.cases,
                if f.pass() { "ok" } else { "BREACH" }
            ));
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let families: Vec<_> = self
            .families
            .iter()
            .map(|f| {
                json!({
                    "name": f.name,
                    "max_residual": json_num(f.max_residual),
                    "tolerance": f.tolerance,
                    "cases": f.cases,
                    "pass": f.pass(),
                })
            })
            .collect();
        pretty(&json!({ "pass": self.pass(), "families": families, "warnings": self.warnings }))
    }

    pub fn render(&self, format: Option<Format>) -> String {
        match format {
            Some(Format::Json) => self.to_json(),
            _ => self.to_text(),
        }
    }
}

fn sigma(x: f64, p: &SystemParams) -> f64 {
    match p.receiver {
        Receiver::Mmse => 1.0 + p.rho * x,
        Receiver::Zf => x,
    }
}

/// Outer-regime sample points: above `α+√α` and, for `α > 1`, below `α−√α`.
fn outer_points(alpha: f64) -> Vec<f64> {
    let (lo, hi) = critical_points(alpha);
    let mut zs: Vec<f64> = (0..10).map(|i| hi + 0.02 + 0.5 * i as f64).collect();
    if alpha > 1.0 {
        zs.extend((0..10).map(|i| lo * (0.05 + 0.09 * i as f64)));
    }
    zs
}

pub fn run_verify(args: &VerifyArgs) -> CliResult<VerifyReport> {
    let alphas: Vec<f64> = args.alpha.map_or(vec![1.0, 2.0, 4.0], |a| vec![a]);
    let rhos: Vec<f64> = args.rho.map_or(vec![1.0, 10.0], |r| vec![r]);
    let receivers: Vec<Receiver> = args.receiver.map_or(vec![Receiver::Mmse, Receiver::Zf], |r| vec![r]);
    if alphas.iter().any(|&a| !(a >= 1.0 && a.is_finite())) || rhos.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return invalid("verify needs alpha >= 1 and rho > 0");
    }
    let fault = if args.self_test_fault { 1e-3 } else { 0.0 };

    let mut saddle = Family::new("saddle_equations", 1e-8);
    let mut stieltjes = Family::new("stieltjes_closed_form", 1e-9);
    let mut balance = Family::new("weight_balance", 1e-6);
    let mut force = Family::new("force_balance", 1e-8);
    let mut critical = Family::new("critical_weight", 1e-6);
    let mut numeric = Family::new("numeric_exponent", 1e-7);
    let mut consistency = Family::new("rate_pdf_consistency", 1e-9);
    let mut curvature = Family::new("curvature", 1e-5);
    let mut cont_value = Family::new("continuity_value", 1e-8);
    let mut cont_slope = Family::new("continuity_slope", 1e-4);
    let mut identities = Family::new("sample_identities", 1e-10);
    let mut warnings = Vec::new();

    for &alpha in &alphas {
        let support = mp_edges(alpha)?;
        for i in 0..20 {
            let gap = 10f64.powf(-3.0 + 5.0 * i as f64 / 19.0);
            let c = if i % 2 == 0 { support.b + gap } else { support.a - gap };
            let closed = stieltjes_mp(c, alpha)?;
            let quad = mp_integrate_converged(|x| 1.0 / (x - c), alpha, 1e-13)?;
            stieltjes.record(((closed - quad) / quad).abs());
        }
        let (lo, hi) = critical_points(alpha);
        for &rho in &rhos {
            for &r in &receivers {
                let p = SystemParams::asymptotic(alpha, rho, r)?;
                for i in 0..40 {
                    let z = lo + (hi - lo) * (i as f64 + 0.5) / 40.0;
                    let (lam, k) = tilt_parameters(z, &p)?;
                    let lam = lam + fault;
                    let norm = mp_integrate_converged(|x| sigma(x, &p) / (lam * sigma(x, &p) + k), alpha, 1e-12)?;
                    let mean = mp_integrate_converged(|x| 1.0 / (lam * sigma(x, &p) + k), alpha, 1e-12)?;
                    saddle.record((norm - 1.0).abs().max((mean - p.s(z)?).abs()));
                }
                let z0 = lo + 0.5 * (hi - lo);
                let base = rate_exponent_numeric(z0, &p)?;
                for i in 1..10 {
                    let z = lo + (hi - lo) * (0.1 + 0.08 * i as f64);
                    let d = rate_exponent_numeric(z, &p)? - base;
                    numeric.record((d - (rate_function(z, &p)? - rate_function(z0, &p)?)).abs());
                }
                for z in outer_points(alpha) {
                    let dw = detached_weight(z, &p)?;
                    let (lam, k) = tilt_parameters(z, &p)?;
                    let bulk = mp_integrate_converged(|x| sigma(x, &p) / (lam * sigma(x, &p) + k), alpha, 1e-12)?;
                    balance.record((bulk + dw.weight - 1.0).abs().max((dw.weight - dw.weight_from_w).abs()));
                    let y = pole_location(z, alpha)?;
                    let lhs = -stieltjes_mp(y, alpha)?;
                    force.record((lhs - (1.0 - (alpha - 1.0) / y - 1.0 / (y - z))).abs());
                }
                critical.record(detached_weight_closed_form(hi, &p).abs());
                if alpha > 1.0 {
                    critical.record(detached_weight_closed_form(lo, &p).abs());
                }
                let erg = ergodic_stats(&p);
                if erg.degenerate {
                    warnings.push(format!(
                        "ZF with alpha = {alpha}: zero ergodic variance (degenerate Gaussian limit); curvature check skipped"
                    ));
                } else {
                    let z = erg.z_erg;
                    let h = 1e-4 * z;
                    let i2 = (rate_function(z + h, &p)? - 2.0 * rate_function(z, &p)? + rate_function(z - h, &p)?) / (h * h);
                    curvature.record((i2 * erg.v_erg - 1.0).abs());
                }
                let d = 1e-6;
                for zc in [lo, hi] {
                    if zc <= 2.0 * d {
                        continue;
                    }
                    let f = |z: f64| rate_function(z, &p);
                    let left_slope = (f(zc - d)? - f(zc - 2.0 * d)?) / d;
                    let right_slope = (f(zc + 2.0 * d)? - f(zc + d)?) / d;
                    let left = f(zc - d)? + d * left_slope;
                    let right = f(zc + d)? - d * right_slope;
                    cont_value.record((right - left).abs());
                    cont_slope.record((right_slope - left_slope).abs());
                }

                let n = 4usize;
                let m = (alpha * n as f64).round() as usize;
                if (m as f64 / n as f64 - alpha).abs() < 1e-12 {
                    let pd = SystemParams::with_dims(m, n, rho, r)?;
                    let vals = (1..=100)
                        .map(|i| {
                            let z = 0.05 * i as f64;
                            Ok(logpdf_unnormalized(z, &pd)? + n as f64 * rate_function(z, &pd)?)
                        })
                        .collect::<CliResult<Vec<f64>>>()?;
                    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
                    consistency.record(spread);
                    for idx in 0..args.samples {
                        let s = analyze_channel(&channel_draw(&pd, SEED, idx)?, &pd)?;
                        identities.record((s.weights.iter().sum::<f64>() - n as f64).abs());
                        identities.record((s.spectral_z(&pd) - s.z).abs() / s.z.max(1.0));
                    }
                }
            }
        }
    }
    warnings.dedup();
    Ok(VerifyReport {
        families: vec![
            saddle, stieltjes, balance, force, critical, numeric, consistency, curvature, cont_value, cont_slope,
            identities,
        ],
        warnings,
    })
}
