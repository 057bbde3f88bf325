//! Bayesian Student-t regression: y ~ StudentT(nu, alpha + beta * x, sigma).
//!
//! The sampler is an adaptive random-walk Metropolis-within-Gibbs. Scale
//! parameters move on unconstrained coordinates (log sigma, log(nu - 1))
//! with the Jacobian folded into the target density, and each coordinate's
//! step size adapts during warmup by Robbins-Monro toward a 0.44 acceptance
//! rate, then freezes. Priors, frozen for reproducibility:
//!
//! * alpha, beta ~ Normal(0, 5^2)
//! * sigma ~ HalfNormal(2.5)
//! * nu ~ Gamma(shape 2, rate 0.1), truncated to nu > 1
//!
//! Everything is deterministic given (data, config, seed); chains use
//! independent derived seeds and are concatenated in chain order.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::corpus::RegressionData;
use crate::mathx;
use crate::rng::Rng;

/// Sampler configuration. `draws` counts kept iterations per chain after
/// `warmup` discarded ones.
#[derive(Clone, Copy, Debug)]
pub struct FitConfig {
    pub chains: usize,
    pub draws: usize,
    pub warmup: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            chains: 4,
            draws: 2000,
            warmup: 1000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamDiagnostics {
    pub rhat: f64,
    pub ess: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub alpha: ParamDiagnostics,
    pub beta: ParamDiagnostics,
    pub sigma: ParamDiagnostics,
    pub nu: ParamDiagnostics,
}

impl Diagnostics {
    pub fn worst_rhat(&self) -> f64 {
        [self.alpha, self.beta, self.sigma, self.nu]
            .iter()
            .map(|d| d.rhat)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_ess(&self) -> f64 {
        [self.alpha, self.beta, self.sigma, self.nu]
            .iter()
            .map(|d| d.ess)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Posterior samples, chains concatenated in order.
#[derive(Clone, Debug)]
pub struct Posterior {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub sigma: Vec<f64>,
    pub nu: Vec<f64>,
    pub chains: usize,
    pub draws_per_chain: usize,
    pub diagnostics: Diagnostics,
}

impl Posterior {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// Per-point posterior-predictive summary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandPoint {
    pub x: f64,
    pub mean: f64,
    pub q01: f64,
    pub q05: f64,
    pub q95: f64,
    pub q99: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionBand {
    pub points: Vec<BandPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BayesError {
    ConstantX,
    NonFinite,
    TooShort(usize),
    EmptyPosterior,
    EmptyInputs,
    TooFewSamples { got: usize, need: usize },
}

impl fmt::Display for BayesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BayesError::ConstantX => write!(f, "unidentifiable slope: x is constant"),
            BayesError::NonFinite => write!(f, "non-finite value in regression data"),
            BayesError::TooShort(n) => write!(f, "need at least 3 points, got {n}"),
            BayesError::EmptyPosterior => write!(f, "posterior holds no samples"),
            BayesError::EmptyInputs => write!(f, "no prediction points supplied"),
            BayesError::TooFewSamples { got, need } => {
                write!(f, "need at least {need} samples, got {got}")
            }
        }
    }
}

impl core::error::Error for BayesError {}

const PRIOR_LOC_SD: f64 = 5.0;
const PRIOR_SIGMA_SCALE: f64 = 2.5;
const PRIOR_NU_SHAPE: f64 = 2.0;
const PRIOR_NU_RATE: f64 = 0.1;
const TARGET_ACCEPTANCE: f64 = 0.44;

/// Unconstrained coordinates: (alpha, beta, ln sigma, ln(nu - 1)).
#[derive(Clone, Copy)]
struct State {
    theta: [f64; 4],
}

impl State {
    fn sigma(&self) -> f64 {
        mathx::exp(self.theta[2])
    }
    fn nu(&self) -> f64 {
        1.0 + mathx::exp(self.theta[3])
    }
}

fn log_posterior(state: &State, x: &[f64], y: &[f64]) -> f64 {
    let [alpha, beta, log_sigma, log_numinus1] = state.theta;
    let sigma = mathx::exp(log_sigma);
    let nu = 1.0 + mathx::exp(log_numinus1);
    if !(sigma.is_finite() && nu.is_finite()) {
        return f64::NEG_INFINITY;
    }

    // Student-t log-likelihood with per-call constants hoisted.
    let half_nup1 = (nu + 1.0) / 2.0;
    let constant =
        mathx::lgamma(half_nup1) - mathx::lgamma(nu / 2.0) - 0.5 * mathx::ln(nu * PI) - log_sigma;
    let mut log_lik = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let z = (yi - alpha - beta * xi) / sigma;
        log_lik += constant - half_nup1 * mathx::ln(1.0 + z * z / nu);
    }

    let log_prior = -alpha * alpha / (2.0 * PRIOR_LOC_SD * PRIOR_LOC_SD)
        - beta * beta / (2.0 * PRIOR_LOC_SD * PRIOR_LOC_SD)
        - sigma * sigma / (2.0 * PRIOR_SIGMA_SCALE * PRIOR_SIGMA_SCALE)
        + (PRIOR_NU_SHAPE - 1.0) * mathx::ln(nu)
        - PRIOR_NU_RATE * nu;
    // Jacobians of the log transforms.
    let log_jacobian = log_sigma + log_numinus1;

    log_lik + log_prior + log_jacobian
}

/// Fits the regression by MCMC. `data` must have finite columns, length >= 3,
/// and non-constant x.
pub fn fit(data: &RegressionData, config: &FitConfig) -> Result<Posterior, BayesError> {
    let x = &data.x;
    let y = &data.y;
    if x.len() != y.len() || x.len() < 3 {
        return Err(BayesError::TooShort(x.len().min(y.len())));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(BayesError::NonFinite);
    }
    if mathx::population_sd(x) == 0.0 {
        return Err(BayesError::ConstantX);
    }

    let chains = config.chains.max(1);
    let draws = config.draws.max(1);
    let warmup = config.warmup;

    // Data-informed center for chain initialization.
    let mean_x = mathx::mean(x);
    let mean_y = mathx::mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mean_x) * (v - mean_x)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .map(|(&xv, &yv)| (xv - mean_x) * (yv - mean_y))
        .sum();
    let ols_slope = sxy / sxx;
    let ols_intercept = mean_y - ols_slope * mean_x;
    let residual_sd = {
        let ss: f64 = x
            .iter()
            .zip(y)
            .map(|(&xv, &yv)| {
                let r = yv - ols_intercept - ols_slope * xv;
                r * r
            })
            .sum();
        mathx::sqrt(ss / x.len() as f64).max(1e-3)
    };

    let mut alpha = Vec::with_capacity(chains * draws);
    let mut beta = Vec::with_capacity(chains * draws);
    let mut sigma = Vec::with_capacity(chains * draws);
    let mut nu = Vec::with_capacity(chains * draws);

    for chain in 0..chains {
        let mut rng = Rng::seed_from_u64(
            config
                .seed
                .wrapping_add((chain as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        // overdispersed but data-aware starting point
        let mut state = State {
            theta: [
                ols_intercept + 0.5 * rng.normal(),
                ols_slope + 0.5 * rng.normal(),
                mathx::ln(residual_sd) + 0.3 * rng.normal(),
                mathx::ln(9.0) + 0.3 * rng.normal(), // nu near 10
            ],
        };
        let mut log_post = log_posterior(&state, x, y);
        let mut log_step = [mathx::ln(0.5); 4];
        let mut adapt_count = [0u64; 4];

        for iteration in 0..(warmup + draws) {
            let adapting = iteration < warmup;
            for p in 0..4 {
                let step = mathx::exp(log_step[p]);
                let mut proposal = state;
                proposal.theta[p] += step * rng.normal();
                let proposal_log_post = log_posterior(&proposal, x, y);
                let accept_prob = if proposal_log_post >= log_post {
                    1.0
                } else {
                    mathx::exp(proposal_log_post - log_post)
                };
                let accepted = rng.uniform() < accept_prob;
                if accepted {
                    state = proposal;
                    log_post = proposal_log_post;
                }
                if adapting {
                    adapt_count[p] += 1;
                    let gamma = mathx::powf(adapt_count[p] as f64, -0.6);
                    log_step[p] += gamma * (accept_prob - TARGET_ACCEPTANCE);
                }
            }
            if iteration >= warmup {
                alpha.push(state.theta[0]);
                beta.push(state.theta[1]);
                sigma.push(state.sigma());
                nu.push(state.nu());
            }
        }
    }

    let diagnostics = Diagnostics {
        alpha: chain_diagnostics(&alpha, chains, draws),
        beta: chain_diagnostics(&beta, chains, draws),
        sigma: chain_diagnostics(&sigma, chains, draws),
        nu: chain_diagnostics(&nu, chains, draws),
    };

    Ok(Posterior {
        alpha,
        beta,
        sigma,
        nu,
        chains,
        draws_per_chain: draws,
        diagnostics,
    })
}

/// Split R-hat and effective sample size over concatenated chains.
fn chain_diagnostics(samples: &[f64], chains: usize, draws: usize) -> ParamDiagnostics {
    // Split each chain in half; drop the middle element of odd chains.
    let half = draws / 2;
    if half < 2 {
        return ParamDiagnostics {
            rhat: f64::NAN,
            ess: samples.len() as f64,
        };
    }
    let mut sequences: Vec<&[f64]> = Vec::with_capacity(chains * 2);
    for c in 0..chains {
        let chain = &samples[c * draws..(c + 1) * draws];
        sequences.push(&chain[..half]);
        sequences.push(&chain[draws - half..]);
    }
    let m = sequences.len();
    let n = half;

    let means: Vec<f64> = sequences.iter().map(|s| mathx::mean(s)).collect();
    let variances: Vec<f64> = sequences
        .iter()
        .map(|s| mathx::sample_variance(s))
        .collect();
    let w = mathx::mean(&variances);
    let b_over_n = mathx::sample_variance(&means);
    let var_plus = (n as f64 - 1.0) / n as f64 * w + b_over_n;

    if w == 0.0 || !w.is_finite() {
        return ParamDiagnostics {
            rhat: 1.0,
            ess: samples.len() as f64,
        };
    }
    let rhat = mathx::sqrt(var_plus / w);

    // Combined autocorrelation, Geyer initial monotone sequence.
    let max_lag = n - 1;
    let mut rho = Vec::with_capacity(max_lag);
    for t in 1..max_lag {
        let mut mean_acov = 0.0;
        for (seq, seq_mean) in sequences.iter().zip(&means) {
            let mut acov = 0.0;
            for i in 0..(n - t) {
                acov += (seq[i] - seq_mean) * (seq[i + t] - seq_mean);
            }
            mean_acov += acov / n as f64;
        }
        mean_acov /= m as f64;
        rho.push(1.0 - (w - mean_acov) / var_plus);
    }

    let mut tau = 1.0;
    let mut prev_pair = f64::INFINITY;
    let mut t = 0;
    while t + 1 < rho.len() {
        let pair = rho[t] + rho[t + 1];
        if pair < 0.0 {
            break;
        }
        let pair = pair.min(prev_pair); // enforce monotone decrease
        tau += 2.0 * pair;
        prev_pair = pair;
        t += 2;
    }
    let total = (m * n) as f64;
    let ess = (total / tau).min(total);
    ParamDiagnostics { rhat, ess }
}

/// Posterior-predictive bands: one Student-t draw per posterior sample per
/// point, summarized by the empirical mean and the 0.01/0.05/0.95/0.99
/// quantiles.
pub fn predict_bands(
    posterior: &Posterior,
    x_values: &[f64],
    seed: u64,
) -> Result<PredictionBand, BayesError> {
    if posterior.is_empty() {
        return Err(BayesError::EmptyPosterior);
    }
    if x_values.is_empty() {
        return Err(BayesError::EmptyInputs);
    }
    let mut rng = Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(x_values.len());
    let mut draws = alloc::vec![0.0; posterior.len()];
    for &x in x_values {
        for s in 0..posterior.len() {
            let mu = posterior.alpha[s] + posterior.beta[s] * x;
            draws[s] = mu + posterior.sigma[s] * rng.student_t(posterior.nu[s]);
        }
        let mean = mathx::mean(&draws);
        let mut sorted = draws.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.push(BandPoint {
            x,
            mean,
            q01: mathx::quantile(&sorted, 0.01),
            q05: mathx::quantile(&sorted, 0.05),
            q95: mathx::quantile(&sorted, 0.95),
            q99: mathx::quantile(&sorted, 0.99),
        });
    }
    Ok(PredictionBand { points })
}

/// The 0.05 predictive quantile per point: the value-at-risk column.
pub fn value_at_risk(band: &PredictionBand) -> Vec<f64> {
    band.points.iter().map(|p| p.q05).collect()
}

/// Density-normalized histogram of the slope samples.
pub fn beta_density(
    posterior: &Posterior,
    bins: usize,
) -> Result<(Vec<f64>, Vec<f64>), BayesError> {
    let samples = &posterior.beta;
    if samples.len() < 100 {
        return Err(BayesError::TooFewSamples {
            got: samples.len(),
            need: 100,
        });
    }
    let bins = bins.max(1);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &s in samples {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = alloc::vec![0usize; bins];
    for &s in samples {
        let idx = (((s - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = samples.len() as f64;
    let heights: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    Ok((edges, heights))
}
