//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any check fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use combobench_core::metrics::{ecdf_auc, ert, CellKey};
use combobench_core::optim::TraceEvent;
use combobench_core::runner::Experiment;
use combobench_core::suite::SUPPORTED_FUNCTIONS;
use combobench_core::{
    combine, make_problem, run_algorithm, AlgorithmConfig, AlgorithmName, AucAxis, CombinedProblem, ExperimentConfig,
    InstanceStream, LandscapeGrid, Objective, PlacementPolicy, ProblemId, ProblemInstance, RunTrace, TargetGrid,
    DEFAULT_FLOOR,
};

type Check = std::result::Result<String, String>;

fn problem(f: u32, instance: u32, dim: usize) -> ProblemInstance {
    make_problem(ProblemId::new(f, instance, dim).unwrap(), PlacementPolicy::Uniform).unwrap()
}

fn pair(f1: u32, f2: u32, i1: u32, dim: usize, alpha: f64) -> CombinedProblem {
    combine(problem(f1, i1, dim), problem(f2, 1, dim), alpha).unwrap()
}

fn all_pairs() -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for a in SUPPORTED_FUNCTIONS {
        for b in SUPPORTED_FUNCTIONS {
            out.push((a, b));
        }
    }
    out
}

fn uniform_point(rng: &mut InstanceStream, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.uniform_in(-5.0, 5.0)).collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn endpoints() -> Check {
    let mut rng = InstanceStream::from_seed(11);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (f1, f2) in all_pairs() {
        for dim in [2, 5] {
            for i1 in 1..=3 {
                let first = problem(f1, i1, dim);
                let second = problem(f2, 1, dim);
                let at_one = combine(first.clone(), second.clone(), 1.0).unwrap();
                let at_zero = combine(first.clone(), second.clone(), 0.0).unwrap();
                for _ in 0..1000 {
                    let x = uniform_point(&mut rng, dim);
                    let shifted: Vec<f64> = x
                        .iter()
                        .zip(&first.optimum_location)
                        .zip(&second.optimum_location)
                        .map(|((xi, o1), o2)| xi - o1 + o2)
                        .collect();
                    let d1 = first.value(&x).max(DEFAULT_FLOOR);
                    let d2 = second.value(&shifted).max(DEFAULT_FLOOR);
                    worst = worst.max(rel_err(at_one.value(&x), d1)).max(rel_err(at_zero.value(&x), d2));
                    count += 2;
                }
            }
        }
    }
    if worst <= 1e-9 {
        Ok(format!("{count} comparisons, max rel err {worst:.2e}"))
    } else {
        Err(format!("max rel err {worst:.2e} over {count} comparisons"))
    }
}

fn log_linearity() -> Check {
    let mut rng = InstanceStream::from_seed(12);
    let mut worst: f64 = 0.0;
    for (f1, f2) in all_pairs() {
        let dim = 5;
        let first = problem(f1, 1, dim);
        let second = problem(f2, 1, dim);
        let c0 = combine(first.clone(), second.clone(), 0.0).unwrap();
        let c1 = combine(first.clone(), second.clone(), 1.0).unwrap();
        let mids: Vec<(f64, CombinedProblem)> = [0.25, 0.5, 0.75]
            .iter()
            .map(|&a| (a, combine(first.clone(), second.clone(), a).unwrap()))
            .collect();
        for _ in 0..100 {
            let x = uniform_point(&mut rng, dim);
            let (l0, l1) = (c0.value(&x).ln(), c1.value(&x).ln());
            for (a, c) in &mids {
                let expected = a * l1 + (1.0 - a) * l0;
                worst = worst.max(rel_err(c.value(&x), expected.exp()));
            }
        }
    }
    if worst < 1e-9 {
        Ok(format!("max rel err {worst:.2e}"))
    } else {
        Err(format!("max rel err {worst:.2e}"))
    }
}

fn optimum_floor() -> Check {
    let mut rng = InstanceStream::from_seed(13);
    let dim = 5;
    let alphas: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let mut lowest = f64::INFINITY;
    for (f1, f2) in all_pairs() {
        let first = problem(f1, 1, dim);
        let second = problem(f2, 1, dim);
        let problems: Vec<CombinedProblem> =
            alphas.iter().map(|&a| combine(first.clone(), second.clone(), a).unwrap()).collect();
        for (a, c) in alphas.iter().zip(&problems) {
            let v = c.value(c.optimum_location());
            if v != DEFAULT_FLOOR {
                return Err(format!("pair ({f1},{f2}) alpha {a}: optimum value {v:e}"));
            }
        }
        for _ in 0..100_000 / 8 {
            let x = uniform_point(&mut rng, dim);
            let c = &problems[rng.below(problems.len())];
            lowest = lowest.min(c.value(&x));
        }
    }
    if lowest >= DEFAULT_FLOOR {
        Ok(format!("optimum = {DEFAULT_FLOOR:e} everywhere, sampled min {lowest:.3e}"))
    } else {
        Err(format!("sampled value {lowest:e} below floor"))
    }
}

fn target_grid_shape() -> Check {
    let grid = TargetGrid::standard();
    let t = grid.targets();
    if t.len() != 51 || t[0] != 1e2 || t[50] != 1e-8 {
        return Err(format!("len {} first {:e} last {:e}", t.len(), t[0], t[t.len() - 1]));
    }
    let ratio = t[1] / t[0];
    let worst = t.windows(2).map(|w| rel_err(w[1] / w[0], ratio)).fold(0.0, f64::max);
    if worst <= 1e-12 {
        Ok(format!("51 targets, ratio {ratio:.15}"))
    } else {
        Err(format!("ratio drift {worst:e}"))
    }
}

fn random_trace(rng: &mut InstanceStream, budget: u64) -> RunTrace {
    let n = 1 + rng.below(12);
    let mut evals: Vec<u64> = (0..n).map(|_| 1 + rng.below(budget as usize) as u64).collect();
    evals.push(1);
    evals.sort_unstable();
    evals.dedup();
    let mut best = rng.uniform_in(-1.0, 3.0);
    let events = evals
        .into_iter()
        .map(|e| {
            let ev = TraceEvent { evals: e, best: 10f64.powf(best) };
            best -= rng.uniform_in(0.01, 3.0);
            ev
        })
        .collect();
    RunTrace::from_events(events, budget).unwrap()
}

fn replay(tr: &RunTrace) -> Vec<f64> {
    let mut cur = f64::INFINITY;
    (1..=tr.budget)
        .map(|t| {
            if let Some(e) = tr.events.iter().find(|e| e.evals == t) {
                cur = e.best;
            }
            cur
        })
        .collect()
}

fn oracle_auc(traces: &[RunTrace], grid: &TargetGrid, budget: u64, axis: AucAxis) -> f64 {
    let replays: Vec<Vec<f64>> = traces.iter().map(replay).collect();
    let pairs = (traces.len() * grid.len()) as f64;
    let frac = |t: u64| {
        replays
            .iter()
            .map(|r| grid.targets().iter().filter(|&&tau| r[t as usize - 1] <= tau).count())
            .sum::<usize>() as f64
            / pairs
    };
    match axis {
        AucAxis::Log if budget == 1 => frac(1),
        AucAxis::Log => {
            (1..budget).map(|t| frac(t) * ((t + 1) as f64 / t as f64).ln()).sum::<f64>() / (budget as f64).ln()
        }
        AucAxis::Linear => (1..=budget).map(frac).sum::<f64>() / budget as f64,
    }
}

fn oracle_ert(traces: &[RunTrace], target: f64, budget: u64) -> f64 {
    let (mut spent, mut hits) = (0.0, 0.0);
    for tr in traces {
        match replay(tr).iter().position(|&v| v <= target) {
            Some(i) => {
                spent += (i + 1) as f64;
                hits += 1.0;
            }
            None => spent += budget as f64,
        }
    }
    if hits == 0.0 {
        f64::INFINITY
    } else {
        spent / hits
    }
}

fn metric_oracles() -> Check {
    let mut rng = InstanceStream::from_seed(14);
    let grid = TargetGrid::standard();
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let budget = 1 + rng.below(1000) as u64;
        let traces: Vec<RunTrace> = (0..1 + rng.below(5)).map(|_| random_trace(&mut rng, budget)).collect();
        for axis in [AucAxis::Log, AucAxis::Linear] {
            let got = ecdf_auc(&traces, &grid, budget, axis).unwrap();
            worst = worst.max((got - oracle_auc(&traces, &grid, budget, axis)).abs());
        }
        let target = 10f64.powf(rng.uniform_in(-9.0, 2.0));
        let (got, want) = (ert(&traces, target, budget).unwrap(), oracle_ert(&traces, target, budget));
        if got.is_infinite() != want.is_infinite() {
            return Err(format!("case {case}: ert {got} vs oracle {want}"));
        }
        if got.is_finite() {
            worst = worst.max(rel_err(got, want));
        }
    }
    if worst <= 1e-12 {
        Ok(format!("1000 cases, max deviation {worst:.2e}"))
    } else {
        Err(format!("max deviation {worst:e}"))
    }
}

fn data_lines(files: &BTreeMap<String, String>) -> BTreeMap<String, Vec<String>> {
    files
        .iter()
        .map(|(name, text)| {
            let lines = text.lines().filter(|l| !l.starts_with('#')).map(String::from).collect();
            (name.clone(), lines)
        })
        .collect()
}

fn determinism() -> Check {
    let mut config = ExperimentConfig::new(
        vec![(21, 1), (3, 9)],
        vec![AlgorithmConfig::new(AlgorithmName::Dcma), AlgorithmConfig::new(AlgorithmName::De)],
    );
    config.alphas = vec![0.0, 0.25, 0.5, 0.75, 1.0];
    config.instances_first = vec![1, 2];
    config.runs_per_instance = 2;
    config.dimension = 2;
    config.budget_multiplier = 250;
    let exp = Experiment::prepare(config).map_err(|e| e.to_string())?;
    let a = exp.execute(1).map_err(|e| e.to_string())?;
    let b = exp.execute(4).map_err(|e| e.to_string())?;
    let (la, lb) = (data_lines(&a.render_files()), data_lines(&b.render_files()));
    if la == lb && a.len() == 80 {
        Ok(format!("{} runs, {} files identical across 1 and 4 workers", a.len(), la.len()))
    } else {
        Err("data lines differ between worker counts".into())
    }
}

fn sphere_sanity() -> Check {
    let c = pair(1, 1, 1, 5, 0.5);
    let config = AlgorithmConfig::new(AlgorithmName::Dcma).with_sigma0(0.3);
    let mut solved = 0;
    for seed in 0..50u64 {
        let trace = run_algorithm(&config, &c, 10_000, seed).map_err(|e| e.to_string())?;
        if trace.final_best < 1e-8 {
            solved += 1;
        }
    }
    if solved >= 45 {
        Ok(format!("{solved}/50 runs below 1e-8"))
    } else {
        Err(format!("only {solved}/50 runs below 1e-8"))
    }
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &k in &idx[i..=j] {
                r[k] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn pooled_auc(config: ExperimentConfig) -> Result<BTreeMap<CellKey, f64>, String> {
    let exp = Experiment::prepare(config).map_err(|e| e.to_string())?;
    let set = exp.execute(0).map_err(|e| e.to_string())?;
    let mut cells: BTreeMap<CellKey, Vec<RunTrace>> = BTreeMap::new();
    for (key, trace) in set.traces {
        cells
            .entry(CellKey { f_first: key.f_first, f_second: key.f_second, alpha_micros: key.alpha_micros })
            .or_default()
            .push(trace);
    }
    let grid = TargetGrid::standard();
    cells
        .into_iter()
        .map(|(k, t)| Ok((k, ecdf_auc(&t, &grid, set.budget, AucAxis::Log).map_err(|e| e.to_string())?)))
        .collect()
}

fn alpha_trend() -> Check {
    let mut config = ExperimentConfig::new(vec![(3, 1)], vec![AlgorithmConfig::new(AlgorithmName::Dcma)]);
    config.budget_multiplier = 2000;
    let aucs = pooled_auc(config)?;
    let (alphas, values): (Vec<f64>, Vec<f64>) = aucs.iter().map(|(k, v)| (k.alpha(), *v)).unzip();
    let rho = spearman(&alphas, &values);
    let detail = format!(
        "spearman {rho:.3} (auc {:.3} at alpha 0, {:.3} at alpha 1)",
        values[0],
        values[values.len() - 1]
    );
    if alphas.len() == 21 && rho <= -0.8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn placement_asymmetry() -> Check {
    let base = || {
        let mut c = ExperimentConfig::new(vec![(21, 9)], vec![AlgorithmConfig::new(AlgorithmName::Dcma)]);
        c.alphas = vec![1.0];
        c
    };
    let uniform = pooled_auc(base())?;
    let mut near = base();
    near.placement_policy.insert("21".into(), PlacementPolicy::FixedNorm { norm: 1.0 });
    let fixed = pooled_auc(near)?;
    let (u, f) = (*uniform.values().next().unwrap(), *fixed.values().next().unwrap());
    let detail = format!("auc fixed_norm(1) {f:.3} vs uniform {u:.3}");
    if f - u > 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn landscape_minimum() -> Check {
    let c = pair(21, 1, 1, 2, 0.0);
    let grid = LandscapeGrid::compute(&c, 201).map_err(|e| e.to_string())?;
    let (mx, my) = grid.argmin();
    let (ox, oy) = grid.nearest_cell(grid.optimum);
    let detail = format!("argmin cell ({mx},{my}), optimum cell ({ox},{oy})");
    if mx.abs_diff(ox) <= 1 && my.abs_diff(oy) <= 1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Check); 10] = [
        ("endpoint_equivalence", endpoints),
        ("log_linearity", log_linearity),
        ("optimum_at_floor", optimum_floor),
        ("target_grid", target_grid_shape),
        ("metric_oracles", metric_oracles),
        ("determinism_across_workers", determinism),
        ("sphere_sanity", sphere_sanity),
        ("alpha_trend_rastrigin_sphere", alpha_trend),
        ("placement_asymmetry", placement_asymmetry),
        ("landscape_minimum", landscape_minimum),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
