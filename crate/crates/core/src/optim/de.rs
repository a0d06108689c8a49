//! DE/rand/1/bin with generational replacement.

use super::{initial_point, AlgorithmConfig, Budgeted, ORIGIN_SPREAD};
use crate::rng::InstanceStream;

pub(super) fn run(config: &AlgorithmConfig, eval: &mut Budgeted<'_>, rng: &mut InstanceStream) {
    let dim = eval.dim();
    let np = config.effective_population(dim);
    let mode = config.init_mode();

    let mut pop: Vec<Vec<f64>> = (0..np)
        .map(|_| initial_point(mode, ORIGIN_SPREAD, dim, rng))
        .collect();
    let mut fit = Vec::with_capacity(np);
    for x in &pop {
        let Some(f) = eval.eval(x) else { return };
        fit.push(f);
    }

    let mut trial = vec![0.0; dim];
    loop {
        let mut next_pop = pop.clone();
        let mut next_fit = fit.clone();
        for i in 0..np {
            let [r1, r2, r3] = distinct_others(i, np, rng);
            let forced = rng.below(dim);
            for j in 0..dim {
                trial[j] = if j == forced || rng.uniform() < config.crossover_rate {
                    pop[r1][j] + config.differential_weight * (pop[r2][j] - pop[r3][j])
                } else {
                    pop[i][j]
                };
            }
            let Some(f) = eval.eval(&trial) else { return };
            if f <= fit[i] {
                next_pop[i].copy_from_slice(&trial);
                next_fit[i] = f;
            }
        }
        pop = next_pop;
        fit = next_fit;
    }
}

/// Three mutually distinct indices in `0..n`, all different from `i`.
fn distinct_others(i: usize, n: usize, rng: &mut InstanceStream) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        picked[k] = loop {
            let r = rng.below(n);
            if r != i && !picked[..k].contains(&r) {
                break r;
            }
        };
    }
    picked
}
