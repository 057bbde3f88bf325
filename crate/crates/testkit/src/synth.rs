//! Synthetic regression datasets with planted ground truth.

use crate::rng::TestRng;

/// A linear dataset with Student-t noise: y = alpha + beta * x + sigma * t_nu.
pub struct PlantedRegression {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub nu: u32,
}

pub fn planted_regression(
    seed: u64,
    n: usize,
    alpha: f64,
    beta: f64,
    sigma: f64,
    nu: u32,
) -> PlantedRegression {
    let mut rng = TestRng::new(seed);
    let raw: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    // z-score x so the intercept and slope stay decorrelated, mirroring how
    // the production pipeline feeds the sampler.
    let mean = raw.iter().sum::<f64>() / n as f64;
    let sd = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let x: Vec<f64> = raw.iter().map(|v| (v - mean) / sd).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&xv| alpha + beta * xv + sigma * rng.student_t_int(nu))
        .collect();
    PlantedRegression {
        x,
        y,
        alpha,
        beta,
        sigma,
        nu,
    }
}
