//! Global-best particle swarm with inertia weight and velocity clamping.

use super::{initial_point, AlgorithmConfig, Budgeted, DOMAIN_LOWER, DOMAIN_UPPER, ORIGIN_SPREAD};
use crate::rng::InstanceStream;

pub(super) fn run(config: &AlgorithmConfig, eval: &mut Budgeted<'_>, rng: &mut InstanceStream) {
    let dim = eval.dim();
    let n = config.effective_population(dim);
    let vmax = 0.5 * (DOMAIN_UPPER - DOMAIN_LOWER);
    let mode = config.init_mode();

    let mut pos: Vec<Vec<f64>> = (0..n)
        .map(|_| initial_point(mode, ORIGIN_SPREAD, dim, rng))
        .collect();
    let mut vel: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.uniform_in(-vmax, vmax)).collect())
        .collect();
    let mut personal = pos.clone();
    let mut personal_fit = Vec::with_capacity(n);
    for x in &pos {
        let Some(f) = eval.eval(x) else { return };
        personal_fit.push(f);
    }
    let mut leader = argmin(&personal_fit);
    let mut global = personal[leader].clone();
    let mut global_fit = personal_fit[leader];

    loop {
        for i in 0..n {
            for j in 0..dim {
                let r1 = rng.uniform();
                let r2 = rng.uniform();
                let v = config.inertia * vel[i][j]
                    + config.cognitive * r1 * (personal[i][j] - pos[i][j])
                    + config.social * r2 * (global[j] - pos[i][j]);
                vel[i][j] = v.clamp(-vmax, vmax);
                pos[i][j] += vel[i][j];
            }
            let Some(f) = eval.eval(&pos[i]) else { return };
            if f < personal_fit[i] {
                personal_fit[i] = f;
                personal[i].copy_from_slice(&pos[i]);
                if f < global_fit {
                    global_fit = f;
                    leader = i;
                    global.copy_from_slice(&personal[leader]);
                }
            }
        }
    }
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}
