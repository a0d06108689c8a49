//! Separable (diagonal covariance) CMA-ES with cumulative step-size adaptation.
//!
//! Learning rates follow the usual (μ/μ_w, λ)-CMA-ES defaults, with the rank-one
//! and rank-μ rates scaled by `(D + 2) / 3` for the diagonal model.

use super::{initial_point, AlgorithmConfig, Budgeted, InitMode};
use crate::rng::InstanceStream;

struct Strategy {
    lambda: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
}

impl Strategy {
    fn new(dim: usize, lambda: usize) -> Self {
        let n = dim as f64;
        let mu = (lambda / 2).max(1);
        let raw: Vec<f64> = (0..mu)
            .map(|i| (mu as f64 + 0.5).ln() - ((i + 1) as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let diag_boost = (n + 2.0) / 3.0;
        let c_1 = (diag_boost * 2.0 / ((n + 1.3).powi(2) + mu_eff)).min(1.0);
        let c_mu = (diag_boost * 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff))
            .min(1.0 - c_1)
            .max(0.0);
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
        Self {
            lambda,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
        }
    }
}

pub(super) fn run(config: &AlgorithmConfig, eval: &mut Budgeted<'_>, rng: &mut InstanceStream) {
    let dim = eval.dim();
    let s = Strategy::new(dim, config.effective_population(dim));
    let mu = s.weights.len();

    let mut mean = match config.init_mode() {
        InitMode::OriginGaussian => vec![0.0; dim],
        InitMode::Uniform => initial_point(InitMode::Uniform, 0.0, dim, rng),
    };
    let mut sigma = config.sigma0;
    let mut diag = vec![1.0f64; dim];
    let mut p_sigma = vec![0.0; dim];
    let mut p_c = vec![0.0; dim];
    let mut generation = 0u64;

    let mut zs = vec![vec![0.0; dim]; s.lambda];
    let mut xs = vec![vec![0.0; dim]; s.lambda];
    let mut fit = vec![0.0; s.lambda];
    let mut order: Vec<usize> = (0..s.lambda).collect();

    loop {
        generation += 1;
        for k in 0..s.lambda {
            for j in 0..dim {
                zs[k][j] = rng.normal();
                xs[k][j] = mean[j] + sigma * diag[j].sqrt() * zs[k][j];
            }
            let Some(f) = eval.eval(&xs[k]) else { return };
            fit[k] = f;
        }
        order.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]));

        let mut z_w = vec![0.0; dim];
        let mut y_w = vec![0.0; dim];
        for (w, &k) in s.weights.iter().zip(&order[..mu]) {
            for j in 0..dim {
                z_w[j] += w * zs[k][j];
                y_w[j] += w * diag[j].sqrt() * zs[k][j];
            }
        }
        for j in 0..dim {
            mean[j] += sigma * y_w[j];
        }

        let cs_norm = (s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff).sqrt();
        for j in 0..dim {
            p_sigma[j] = (1.0 - s.c_sigma) * p_sigma[j] + cs_norm * z_w[j];
        }
        let ps_norm = p_sigma.iter().map(|v| v * v).sum::<f64>().sqrt();
        let decay = 1.0 - (1.0 - s.c_sigma).powf(2.0 * generation as f64);
        let h_sigma = ps_norm / decay.sqrt() / s.chi_n < 1.4 + 2.0 / (dim as f64 + 1.0);
        let h = if h_sigma { 1.0 } else { 0.0 };

        let cc_norm = (s.c_c * (2.0 - s.c_c) * s.mu_eff).sqrt();
        for j in 0..dim {
            p_c[j] = (1.0 - s.c_c) * p_c[j] + h * cc_norm * y_w[j];
        }

        for j in 0..dim {
            let rank_mu: f64 = s
                .weights
                .iter()
                .zip(&order[..mu])
                .map(|(w, &k)| w * diag[j] * zs[k][j] * zs[k][j])
                .sum();
            let stall = (1.0 - h) * s.c_c * (2.0 - s.c_c) * diag[j];
            diag[j] = (1.0 - s.c_1 - s.c_mu) * diag[j]
                + s.c_1 * (p_c[j] * p_c[j] + stall)
                + s.c_mu * rank_mu;
        }

        sigma *= ((s.c_sigma / s.d_sigma) * (ps_norm / s.chi_n - 1.0)).exp();

        let spread = sigma * diag.iter().cloned().fold(0.0, f64::max).sqrt();
        if !spread.is_finite() || spread < 1e-300 || diag.iter().any(|d| !(*d > 0.0)) {
            return;
        }
    }
}
