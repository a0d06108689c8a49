//! Affine log-space combinations of BBOB-style test functions, a small
//! portfolio of derivative-free optimizers, and fixed-target performance
//! statistics (ECDF area, ERT, rankings, convergence trajectories).
//!
//! The typical pipeline is:
//!
//! 1. build two [`ProblemInstance`]s with [`make_problem`],
//! 2. blend them with [`combine`] into a [`CombinedProblem`],
//! 3. run an optimizer from [`optim`] (or a whole grid via [`runner`]),
//! 4. summarize the resulting [`RunTrace`]s with [`metrics`].

pub mod combine;
pub mod error;
pub mod landscape;
pub mod metrics;
pub mod optim;
pub mod rng;
pub mod runner;
pub mod suite;

pub use combine::{combine, CombinedProblem, DEFAULT_FLOOR};
pub use error::{Error, Result};
pub use landscape::LandscapeGrid;
pub use metrics::{AucAxis, TargetGrid};
pub use optim::{run_algorithm, AlgorithmConfig, AlgorithmName, InitMode, RunTrace};
pub use rng::{mix64, InstanceStream};
pub use runner::{derive_seed, run_experiment, ExperimentConfig, TraceSet};
pub use suite::{make_problem, PlacementPolicy, ProblemId, ProblemInstance};

/// Anything that can be minimized by the optimizers in [`optim`].
pub trait Objective: Sync {
    fn dimension(&self) -> usize;

    /// Raw objective value. Callers guarantee `x.len() == self.dimension()`.
    fn value(&self, x: &[f64]) -> f64;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

/// Adapts a closure into an [`Objective`].
pub struct FnObjective<F> {
    dimension: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}
