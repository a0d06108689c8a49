//! Nelder-Mead simplex with restarts once the simplex collapses.

use super::{initial_point, AlgorithmConfig, Budgeted};
use crate::rng::InstanceStream;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const MIN_DIAMETER: f64 = 1e-12;
const EDGE: f64 = 1.0;

pub(super) fn run(config: &AlgorithmConfig, eval: &mut Budgeted<'_>, rng: &mut InstanceStream) {
    let dim = eval.dim();
    let mode = config.init_mode();
    loop {
        let start = initial_point(mode, 1.0, dim, rng);
        if descend(start, eval).is_none() {
            return;
        }
    }
}

/// Runs one simplex until it collapses (`Some`) or the budget runs out (`None`).
fn descend(start: Vec<f64>, eval: &mut Budgeted<'_>) -> Option<()> {
    let dim = start.len();
    let mut simplex = Vec::with_capacity(dim + 1);
    simplex.push(start.clone());
    for i in 0..dim {
        let mut v = start.clone();
        v[i] += EDGE;
        simplex.push(v);
    }
    let mut values = Vec::with_capacity(dim + 1);
    for v in &simplex {
        values.push(eval.eval(v)?);
    }

    let mut order: Vec<usize> = (0..=dim).collect();
    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        order = (0..=dim).collect();

        if diameter(&simplex) < MIN_DIAMETER {
            return Some(());
        }

        let worst = dim;
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(REFLECT);
        let f_r = eval.eval(&reflected)?;
        if f_r < values[0] {
            let expanded = along(EXPAND);
            let f_e = eval.eval(&expanded)?;
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[dim - 1] {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }

        let accepted = if f_r < values[worst] {
            let outside = along(REFLECT * CONTRACT);
            let f_c = eval.eval(&outside)?;
            (f_c <= f_r).then_some((outside, f_c))
        } else {
            let inside = along(-CONTRACT);
            let f_c = eval.eval(&inside)?;
            (f_c < values[worst]).then_some((inside, f_c))
        };
        match accepted {
            Some((point, f)) => {
                simplex[worst] = point;
                values[worst] = f;
            }
            None => {
                for i in 1..=dim {
                    let shrunk: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, v)| b + SHRINK * (v - b))
                        .collect();
                    values[i] = eval.eval(&shrunk)?;
                    simplex[i] = shrunk;
                }
            }
        }
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    simplex[1..]
        .iter()
        .map(|v| {
            v.iter()
                .zip(&simplex[0])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}
