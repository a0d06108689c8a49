//! Estimation of Multivariate Normal Algorithm: sample, truncate, refit.

use super::{initial_point, AlgorithmConfig, Budgeted, InitMode, ORIGIN_SPREAD};
use crate::rng::InstanceStream;
use nalgebra::{DMatrix, DVector};

const JITTER: f64 = 1e-10;

pub(super) fn run(config: &AlgorithmConfig, eval: &mut Budgeted<'_>, rng: &mut InstanceStream) {
    let dim = eval.dim();
    let lambda = config.effective_population(dim);
    let mu = ((config.selection_ratio * lambda as f64).floor() as usize).clamp(2, lambda);

    let mut mean = match config.init_mode() {
        InitMode::OriginGaussian => DVector::zeros(dim),
        InitMode::Uniform => DVector::from_vec(initial_point(InitMode::Uniform, 0.0, dim, rng)),
    };
    let mut cov = DMatrix::identity(dim, dim) * (ORIGIN_SPREAD * ORIGIN_SPREAD);

    let mut samples: Vec<(f64, DVector<f64>)> = Vec::with_capacity(lambda);
    loop {
        let Some(factor) = cholesky_with_jitter(&cov) else { return };
        samples.clear();
        for _ in 0..lambda {
            let z = DVector::from_fn(dim, |_, _| rng.normal());
            let x = &mean + &factor * z;
            let Some(f) = eval.eval(x.as_slice()) else { return };
            samples.push((f, x));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let selected = &samples[..mu];

        mean = selected
            .iter()
            .fold(DVector::zeros(dim), |acc, (_, x)| acc + x)
            / mu as f64;
        let mut next = DMatrix::zeros(dim, dim);
        for (_, x) in selected {
            let d = x - &mean;
            next += &d * d.transpose();
        }
        cov = next / mu as f64 + DMatrix::identity(dim, dim) * JITTER;
    }
}

fn cholesky_with_jitter(cov: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut extra = 0.0;
    for _ in 0..10 {
        let attempt = cov + DMatrix::identity(cov.nrows(), cov.ncols()) * extra;
        if let Some(ch) = attempt.cholesky() {
            return Some(ch.l());
        }
        extra = if extra == 0.0 { JITTER } else { extra * 100.0 };
    }
    None
}
