//! Experiment grids: expand a config into (algorithm, pair, alpha, instance,
//! run) cells, derive a seed per cell from its coordinates, run the cells in
//! parallel and persist the traces.

pub(crate) mod traces;

pub use traces::{
    read_best_points, read_trace_dir, BestPoint, TraceKey, TraceSet, BEST_HEADER, TRACE_HEADER,
};

use crate::combine::combine;
use crate::error::{Error, Result};
use crate::metrics::alpha_to_micros;
use crate::optim::{run_algorithm, AlgorithmConfig, RunTrace};
use crate::rng::mix64;
use crate::suite::{make_problem, PlacementPolicy, ProblemId, ProblemInstance, SUPPORTED_FUNCTIONS};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// Multipliers for each grid coordinate in [`derive_seed`], in the order
/// (algorithm, pair, alpha, instance, run). The top 16 bits are the short
/// constants `0x9E37, 0x85EB, 0xC2B2, 0x27D4, 0x1657`; the low 48 bits are
/// taken from the 64-bit xxHash primes sharing (nearly) the same prefix.
pub const SEED_MULTIPLIERS: [u64; 5] = [
    0x9E37_79B1_85EB_CA87,
    0x85EB_CA77_C2B2_AE63,
    0xC2B2_AE3D_27D4_EB4F,
    0x27D4_EB2F_1656_67C5,
    0x1657_67B1_9E37_79F9,
];

pub fn derive_seed(master: u64, alg: usize, pair: usize, alpha: usize, instance: u32, run: u32) -> u64 {
    let coords = [alg as u64, pair as u64, alpha as u64, u64::from(instance), u64::from(run)];
    let offset = coords
        .iter()
        .zip(SEED_MULTIPLIERS)
        .fold(0u64, |acc, (&c, m)| acc.wrapping_add(c.wrapping_mul(m)));
    mix64(master ^ offset)
}

/// The 21-point grid `0, 0.05, ..., 1`.
pub fn default_alphas() -> Vec<f64> {
    (0..=20).map(|k| f64::from(k) / 20.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Ordered `(first, second)` function ids; `first` gets weight alpha.
    pub pairs: Vec<(u32, u32)>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "defaults::instances_first")]
    pub instances_first: Vec<u32>,
    #[serde(default = "defaults::instance_second")]
    pub instance_second: u32,
    #[serde(default = "defaults::runs_per_instance")]
    pub runs_per_instance: u32,
    #[serde(default = "defaults::dimension")]
    pub dimension: usize,
    #[serde(default = "defaults::budget_multiplier")]
    pub budget_multiplier: u64,
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default)]
    pub master_seed: u64,
    /// Placement per function id (as a string key); unlisted functions are uniform.
    #[serde(default)]
    pub placement_policy: BTreeMap<String, PlacementPolicy>,
}

mod defaults {
    pub fn instances_first() -> Vec<u32> {
        (1..=5).collect()
    }
    pub fn instance_second() -> u32 {
        1
    }
    pub fn runs_per_instance() -> u32 {
        5
    }
    pub fn dimension() -> usize {
        5
    }
    pub fn budget_multiplier() -> u64 {
        2000
    }
}

impl ExperimentConfig {
    /// Config with all defaults for the given pairs and algorithms.
    pub fn new(pairs: Vec<(u32, u32)>, algorithms: Vec<AlgorithmConfig>) -> Self {
        Self {
            pairs,
            alphas: default_alphas(),
            instances_first: defaults::instances_first(),
            instance_second: defaults::instance_second(),
            runs_per_instance: defaults::runs_per_instance(),
            dimension: defaults::dimension(),
            budget_multiplier: defaults::budget_multiplier(),
            algorithms,
            master_seed: 0,
            placement_policy: BTreeMap::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    pub fn budget(&self) -> u64 {
        self.budget_multiplier * self.dimension as u64
    }

    pub fn placement_for(&self, function_id: u32) -> PlacementPolicy {
        self.placement_policy
            .get(&function_id.to_string())
            .copied()
            .unwrap_or_default()
    }

    pub fn cell_count(&self) -> usize {
        self.algorithms.len()
            * self.pairs.len()
            * self.alphas.len()
            * self.instances_first.len()
            * self.runs_per_instance as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.pairs.is_empty() {
            return bad("at least one function pair is required".into());
        }
        let mut seen_pairs = BTreeSet::new();
        for &(a, b) in &self.pairs {
            for f in [a, b] {
                if !SUPPORTED_FUNCTIONS.contains(&f) {
                    return Err(Error::UnsupportedFunction(f));
                }
            }
            if !seen_pairs.insert((a, b)) {
                return bad(format!("duplicate pair ({a}, {b})"));
            }
        }
        if self.alphas.is_empty() {
            return bad("at least one alpha is required".into());
        }
        let mut seen_alphas = BTreeSet::new();
        for &alpha in &self.alphas {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::AlphaOutOfRange(alpha));
            }
            if !seen_alphas.insert(alpha_to_micros(alpha)) {
                return bad(format!("alpha {alpha} duplicates another value at 6 decimals"));
            }
        }
        if self.instances_first.is_empty() {
            return bad("at least one instance is required".into());
        }
        let mut seen_instances = BTreeSet::new();
        for &i in self.instances_first.iter().chain([&self.instance_second]) {
            if i == 0 {
                return bad("instance ids must be positive".into());
            }
        }
        for &i in &self.instances_first {
            if !seen_instances.insert(i) {
                return bad(format!("duplicate instance {i}"));
            }
        }
        if self.runs_per_instance == 0 {
            return bad("runs_per_instance must be positive".into());
        }
        if self.dimension < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.dimension));
        }
        if self.budget_multiplier == 0 {
            return bad("budget_multiplier must be positive".into());
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        let mut labels = BTreeSet::new();
        for alg in &self.algorithms {
            alg.validate()?;
            if !labels.insert(alg.label()) {
                return bad(format!(
                    "algorithm label {:?} appears twice; set `label` to tell them apart",
                    alg.label()
                ));
            }
            if self.budget() < alg.minimum_budget(self.dimension) {
                return bad(format!(
                    "budget {} is below the minimum {} for {}",
                    self.budget(),
                    alg.minimum_budget(self.dimension),
                    alg.label()
                ));
            }
        }
        for (key, policy) in &self.placement_policy {
            let id: u32 = key
                .parse()
                .map_err(|_| Error::Config(format!("placement_policy key {key:?} is not a function id")))?;
            if !SUPPORTED_FUNCTIONS.contains(&id) {
                return Err(Error::UnsupportedFunction(id));
            }
            policy.validate()?;
        }
        Ok(())
    }
}

/// Grid coordinates of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub alg: usize,
    pub pair: usize,
    pub alpha: usize,
    pub instance: u32,
    pub run: u32,
}

/// A validated config with its base problem instances built.
pub struct Experiment {
    config: ExperimentConfig,
    problems: BTreeMap<(u32, u32), ProblemInstance>,
}

impl Experiment {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let mut problems = BTreeMap::new();
        for &(first, second) in &config.pairs {
            for &instance in &config.instances_first {
                problems.entry((first, instance)).or_insert(());
            }
            problems.entry((second, config.instance_second)).or_insert(());
        }
        let problems = problems
            .into_keys()
            .map(|(f, i)| {
                let id = ProblemId::new(f, i, config.dimension)?;
                Ok(((f, i), make_problem(id, config.placement_for(f))?))
            })
            .collect::<Result<_>>()?;
        Ok(Self { config, problems })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// All cells of one (algorithm, pair) file in canonical order.
    pub fn cells_for(&self, alg: usize, pair: usize) -> Vec<CellIndex> {
        let mut cells = Vec::new();
        for alpha in 0..self.config.alphas.len() {
            for &instance in &self.config.instances_first {
                for run in 0..self.config.runs_per_instance {
                    cells.push(CellIndex {
                        alg,
                        pair,
                        alpha,
                        instance,
                        run,
                    });
                }
            }
        }
        cells
    }

    pub fn cells(&self) -> Vec<CellIndex> {
        (0..self.config.algorithms.len())
            .flat_map(|a| (0..self.config.pairs.len()).flat_map(move |p| self.cells_for(a, p)))
            .collect()
    }

    pub fn key(&self, cell: &CellIndex) -> TraceKey {
        let (f_first, f_second) = self.config.pairs[cell.pair];
        TraceKey {
            alg: self.config.algorithms[cell.alg].label().to_string(),
            f_first,
            f_second,
            alpha_micros: alpha_to_micros(self.config.alphas[cell.alpha]),
            instance: cell.instance,
            run: cell.run,
        }
    }

    pub fn seed(&self, cell: &CellIndex) -> u64 {
        derive_seed(
            self.config.master_seed,
            cell.alg,
            cell.pair,
            cell.alpha,
            cell.instance,
            cell.run,
        )
    }

    pub fn run_cell(&self, cell: &CellIndex) -> Result<RunTrace> {
        let (f_first, f_second) = self.config.pairs[cell.pair];
        let first = self.problems[&(f_first, cell.instance)].clone();
        let second = self.problems[&(f_second, self.config.instance_second)].clone();
        let problem = combine(first, second, self.config.alphas[cell.alpha])?;
        run_algorithm(
            &self.config.algorithms[cell.alg],
            &problem,
            self.config.budget(),
            self.seed(cell),
        )
    }

    fn run_cells(&self, cells: &[CellIndex], pool: &rayon::ThreadPool) -> Result<Vec<(TraceKey, RunTrace)>> {
        pool.install(|| {
            cells
                .par_iter()
                .map(|c| Ok((self.key(c), self.run_cell(c)?)))
                .collect()
        })
    }

    fn empty_set(&self) -> TraceSet {
        TraceSet::new(self.config.budget(), self.config.dimension, Some(self.config.clone()))
    }

    /// Runs every cell in memory.
    pub fn execute(&self, workers: usize) -> Result<TraceSet> {
        let pool = thread_pool(workers)?;
        let mut set = self.empty_set();
        for alg in 0..self.config.algorithms.len() {
            for pair in 0..self.config.pairs.len() {
                set.traces.extend(self.run_cells(&self.cells_for(alg, pair), &pool)?);
            }
        }
        Ok(set)
    }

    /// Runs every cell, writing one trace file (plus best-point file) per
    /// (algorithm, pair) as soon as its cells finish. On an I/O failure a
    /// `PARTIAL` marker is left in `out_dir`.
    pub fn execute_to_dir(&self, out_dir: &Path, workers: usize) -> Result<TraceSet> {
        let pool = thread_pool(workers)?;
        std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let marker = out_dir.join(PARTIAL_MARKER);
        if marker.exists() {
            std::fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))?;
        }
        let mut set = self.empty_set();
        for alg in 0..self.config.algorithms.len() {
            for pair in 0..self.config.pairs.len() {
                let mut group = self.empty_set();
                group.traces.extend(self.run_cells(&self.cells_for(alg, pair), &pool)?);
                if let Err(e) = group.write_dir(out_dir) {
                    // Best effort: the original error is what matters.
                    let _ = std::fs::write(&marker, format!("{e}\n"));
                    return Err(e);
                }
                set.traces.append(&mut group.traces);
            }
        }
        Ok(set)
    }
}

pub const PARTIAL_MARKER: &str = "PARTIAL";

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Validates, runs and persists a whole experiment.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path, workers: usize) -> Result<TraceSet> {
    Experiment::prepare(config.clone())?.execute_to_dir(out_dir, workers)
}

#[cfg(test)]
mod tests;
