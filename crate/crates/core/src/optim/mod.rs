//! Derivative-free optimizer portfolio.
//!
//! Every optimizer consumes objective evaluations through a [`Budgeted`]
//! wrapper, which enforces the budget and records each strict improvement of
//! the best-so-far value into a [`RunTrace`].

mod dcma;
mod de;
mod emna;
mod nelder_mead;
mod pso;

use crate::error::{Error, Result};
use crate::rng::InstanceStream;
use crate::Objective;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Standard deviation of origin-centred Gaussian populations (DE, PSO, EMNA).
pub const ORIGIN_SPREAD: f64 = 2.5;
pub const DOMAIN_LOWER: f64 = -5.0;
pub const DOMAIN_UPPER: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    De,
    Pso,
    Emna,
    Dcma,
    NelderMead,
}

impl AlgorithmName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::De => "de",
            AlgorithmName::Pso => "pso",
            AlgorithmName::Emna => "emna",
            AlgorithmName::Dcma => "dcma",
            AlgorithmName::NelderMead => "nelder_mead",
        }
    }

    fn default_init(&self) -> InitMode {
        match self {
            AlgorithmName::De | AlgorithmName::Pso => InitMode::Uniform,
            _ => InitMode::OriginGaussian,
        }
    }
}

impl fmt::Display for AlgorithmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How starting points are drawn.
///
/// `origin_gaussian` puts the dcma mean exactly at the origin, starts
/// Nelder-Mead from `N(0, I)`, and draws DE/PSO/EMNA populations from
/// `N(0, 2.5² I)`. `uniform` draws from `[-5, 5]^D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    OriginGaussian,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: AlgorithmName,
    /// Name used in output files; defaults to `name`. Lets one experiment
    /// carry several configurations of the same algorithm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// `None` selects the per-algorithm default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
    #[serde(default = "defaults::sigma0")]
    pub sigma0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitMode>,
    #[serde(default = "defaults::differential_weight")]
    pub differential_weight: f64,
    #[serde(default = "defaults::crossover_rate")]
    pub crossover_rate: f64,
    #[serde(default = "defaults::inertia")]
    pub inertia: f64,
    #[serde(default = "defaults::acceleration")]
    pub cognitive: f64,
    #[serde(default = "defaults::acceleration")]
    pub social: f64,
    #[serde(default = "defaults::selection_ratio")]
    pub selection_ratio: f64,
}

mod defaults {
    pub fn sigma0() -> f64 {
        0.3
    }
    pub fn differential_weight() -> f64 {
        0.5
    }
    pub fn crossover_rate() -> f64 {
        0.9
    }
    pub fn inertia() -> f64 {
        0.729
    }
    pub fn acceleration() -> f64 {
        1.49
    }
    pub fn selection_ratio() -> f64 {
        0.25
    }
}

impl AlgorithmConfig {
    pub fn new(name: AlgorithmName) -> Self {
        Self {
            name,
            label: None,
            population_size: None,
            sigma0: defaults::sigma0(),
            init: None,
            differential_weight: defaults::differential_weight(),
            crossover_rate: defaults::crossover_rate(),
            inertia: defaults::inertia(),
            cognitive: defaults::acceleration(),
            social: defaults::acceleration(),
            selection_ratio: defaults::selection_ratio(),
        }
    }

    pub fn with_sigma0(mut self, sigma0: f64) -> Self {
        self.sigma0 = sigma0;
        self
    }

    pub fn with_population(mut self, size: usize) -> Self {
        self.population_size = Some(size);
        self
    }

    pub fn with_init(mut self, init: InitMode) -> Self {
        self.init = Some(init);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.name.as_str())
    }

    pub fn init_mode(&self) -> InitMode {
        self.init.unwrap_or_else(|| self.name.default_init())
    }

    /// Population (or offspring) size actually used in dimension `dim`.
    pub fn effective_population(&self, dim: usize) -> usize {
        if let Some(n) = self.population_size {
            return n;
        }
        match self.name {
            AlgorithmName::De => 30,
            AlgorithmName::Pso | AlgorithmName::Emna => 40,
            AlgorithmName::Dcma => 4 + (3.0 * (dim as f64).ln()).floor() as usize,
            AlgorithmName::NelderMead => dim + 1,
        }
    }

    /// Smallest budget the method can run with.
    pub fn minimum_budget(&self, dim: usize) -> u64 {
        match self.name {
            AlgorithmName::NelderMead => dim as u64 + 1,
            _ => self.effective_population(dim) as u64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("{}: {msg}", self.label())));
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return bad(format!("sigma0 must be positive, got {}", self.sigma0));
        }
        if let Some(label) = &self.label {
            if label.is_empty() || label.contains([',', '/', '\\', '\n']) {
                return bad(format!("label {label:?} is not usable in file names and CSV"));
            }
        }
        let min_pop = match self.name {
            AlgorithmName::De | AlgorithmName::Emna => 4,
            AlgorithmName::Dcma => 2,
            AlgorithmName::Pso => 1,
            AlgorithmName::NelderMead => 0,
        };
        if let Some(n) = self.population_size {
            if n < min_pop {
                return bad(format!("population_size must be at least {min_pop}, got {n}"));
            }
        }
        if !(0.0..=2.0).contains(&self.differential_weight) || !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("DE constants out of range".into());
        }
        if !(self.selection_ratio > 0.0 && self.selection_ratio <= 1.0) {
            return bad(format!("selection_ratio must lie in (0, 1], got {}", self.selection_ratio));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub evals: u64,
    pub best: f64,
}

/// Improvement history of one optimizer run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub events: Vec<TraceEvent>,
    pub budget: u64,
    /// Objective calls actually made.
    pub evaluations: u64,
    pub final_best: f64,
    pub final_best_point: Vec<f64>,
}

impl RunTrace {
    /// Builds a trace from recorded events, checking the monotonicity contract.
    pub fn from_events(events: Vec<TraceEvent>, budget: u64) -> Result<Self> {
        let Some(last) = events.last().copied() else {
            return Err(Error::EmptyTraces);
        };
        if events[0].evals != 1 {
            return Err(Error::Config(format!(
                "first trace event must be at evaluation 1, got {}",
                events[0].evals
            )));
        }
        for w in events.windows(2) {
            if w[1].evals <= w[0].evals || !(w[1].best < w[0].best) {
                return Err(Error::Config(format!(
                    "trace events not strictly monotone at evaluation {}",
                    w[1].evals
                )));
            }
        }
        if last.evals > budget {
            return Err(Error::Config(format!(
                "trace event at evaluation {} exceeds budget {budget}",
                last.evals
            )));
        }
        Ok(Self {
            events,
            budget,
            evaluations: last.evals,
            final_best: last.best,
            final_best_point: Vec::new(),
        })
    }

    /// Best-so-far value after `t` evaluations (`None` before the first).
    pub fn best_at(&self, t: u64) -> Option<f64> {
        let idx = self.events.partition_point(|e| e.evals <= t);
        idx.checked_sub(1).map(|i| self.events[i].best)
    }
}

/// Budget-enforcing evaluation wrapper shared by all optimizers.
pub(crate) struct Budgeted<'a> {
    objective: &'a dyn Objective,
    budget: u64,
    used: u64,
    best: f64,
    best_point: Vec<f64>,
    events: Vec<TraceEvent>,
}

impl<'a> Budgeted<'a> {
    fn new(objective: &'a dyn Objective, budget: u64) -> Self {
        Self {
            objective,
            budget,
            used: 0,
            best: f64::INFINITY,
            best_point: Vec::new(),
            events: Vec::new(),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.objective.dimension()
    }

    /// Evaluates `x`, or returns `None` once the budget is spent.
    /// Non-finite values are reported as `+inf`.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        let mut v = self.objective.value(x);
        if !v.is_finite() {
            v = f64::INFINITY;
        }
        if self.events.is_empty() || v < self.best {
            self.best = v;
            self.best_point.clear();
            self.best_point.extend_from_slice(x);
            self.events.push(TraceEvent {
                evals: self.used,
                best: v,
            });
        }
        Some(v)
    }

    fn into_trace(self) -> RunTrace {
        RunTrace {
            events: self.events,
            budget: self.budget,
            evaluations: self.used,
            final_best: self.best,
            final_best_point: self.best_point,
        }
    }
}

/// Samples a starting point according to `mode`.
pub(crate) fn initial_point(mode: InitMode, spread: f64, dim: usize, rng: &mut InstanceStream) -> Vec<f64> {
    (0..dim)
        .map(|_| match mode {
            InitMode::Uniform => rng.uniform_in(DOMAIN_LOWER, DOMAIN_UPPER),
            InitMode::OriginGaussian => spread * rng.normal(),
        })
        .collect()
}

/// Runs one optimizer on `problem` with at most `budget` evaluations.
pub fn run_algorithm(
    config: &AlgorithmConfig,
    problem: &dyn Objective,
    budget: u64,
    seed: u64,
) -> Result<RunTrace> {
    config.validate()?;
    let dim = problem.dimension();
    if budget == 0 || budget < config.minimum_budget(dim) {
        return Err(Error::Config(format!(
            "{} needs a budget of at least {} in dimension {dim}, got {budget}",
            config.label(),
            config.minimum_budget(dim).max(1)
        )));
    }
    let mut rng = InstanceStream::from_seed(seed);
    let mut eval = Budgeted::new(problem, budget);
    match config.name {
        AlgorithmName::De => de::run(config, &mut eval, &mut rng),
        AlgorithmName::Pso => pso::run(config, &mut eval, &mut rng),
        AlgorithmName::Emna => emna::run(config, &mut eval, &mut rng),
        AlgorithmName::Dcma => dcma::run(config, &mut eval, &mut rng),
        AlgorithmName::NelderMead => nelder_mead::run(config, &mut eval, &mut rng),
    }
    Ok(eval.into_trace())
}
