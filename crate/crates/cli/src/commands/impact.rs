//! `impact`: Student-t regression of prices on the tweet-trend rolling
//! mean, with the fit report and prediction bands.

use std::path::PathBuf;

use serde::Serialize;
use trendlens_core::bayes::{fit, predict_bands, FitConfig, ParamDiagnostics, Posterior};
use trendlens_core::corpus::{align_for_regression, count_time_series, rolling_mean};
use trendlens_core::mathx;

use super::{ensure_out_dir, out_path, write_text};
use crate::error::Error;
use crate::io::{corpus_file, fields, prices};

pub struct ImpactOpts {
    pub corpus: PathBuf,
    pub fields: PathBuf,
    pub field: String,
    pub prices: PathBuf,
    pub window: usize,
    pub chains: usize,
    pub draws: usize,
    pub warmup: usize,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ParamReport {
    mean: f64,
    sd: f64,
    q05: f64,
    q50: f64,
    q95: f64,
    rhat: f64,
    ess: f64,
}

#[derive(Serialize)]
struct FitReport {
    alpha: ParamReport,
    beta: ParamReport,
    sigma: ParamReport,
    nu: ParamReport,
    chains: usize,
    draws_per_chain: usize,
    rhat_warning: bool,
}

fn summarize(samples: &[f64], diag: &ParamDiagnostics) -> ParamReport {
    ParamReport {
        mean: mathx::mean(samples),
        sd: mathx::sqrt(mathx::population_variance(samples)),
        q05: mathx::quantile_of(samples, 0.05),
        q50: mathx::quantile_of(samples, 0.50),
        q95: mathx::quantile_of(samples, 0.95),
        rhat: diag.rhat,
        ess: diag.ess,
    }
}

fn fit_report(posterior: &Posterior, rhat_warning: bool) -> FitReport {
    FitReport {
        alpha: summarize(&posterior.alpha, &posterior.diagnostics.alpha),
        beta: summarize(&posterior.beta, &posterior.diagnostics.beta),
        sigma: summarize(&posterior.sigma, &posterior.diagnostics.sigma),
        nu: summarize(&posterior.nu, &posterior.diagnostics.nu),
        chains: posterior.chains,
        draws_per_chain: posterior.draws_per_chain,
        rhat_warning,
    }
}

pub fn run(opts: &ImpactOpts) -> Result<(), Error> {
    let corpus = corpus_file::load_corpus(&opts.corpus)?;
    let field_list = fields::load_fields(&opts.fields)?;
    let field = field_list
        .iter()
        .find(|f| f.name == opts.field)
        .ok_or_else(|| Error::input(format!("thematic field '{}' not found", opts.field)))?;
    let price_series = prices::load_prices(&opts.prices)?;

    let counts = count_time_series(&corpus, field)?;
    let smoothed = rolling_mean(&counts, opts.window)?;
    let data = align_for_regression(&smoothed, &price_series)?;

    let config = FitConfig {
        chains: opts.chains,
        draws: opts.draws,
        warmup: opts.warmup,
        seed: opts.seed,
    };
    let posterior = fit(&data, &config)?;

    let worst_rhat = posterior.diagnostics.worst_rhat();
    let rhat_warning = worst_rhat > 1.1;
    if rhat_warning {
        eprintln!("warning: max R-hat {worst_rhat:.4} exceeds 1.1; chains may not have mixed");
    }

    ensure_out_dir(&opts.out)?;
    let report = fit_report(&posterior, rhat_warning);
    write_text(
        &out_path(&opts.out, "fit.json"),
        &serde_json::to_string_pretty(&report).expect("serializable report"),
    )?;

    let band = predict_bands(&posterior, &data.x, opts.seed.wrapping_add(1))?;
    let mut csv = String::from("x,mean,q01,q05,q95,q99\n");
    for point in &band.points {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            point.x, point.mean, point.q01, point.q05, point.q95, point.q99
        ));
    }
    write_text(&out_path(&opts.out, "bands.csv"), &csv)?;
    Ok(())
}
