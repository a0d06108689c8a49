//! Fixed-target performance statistics over [`RunTrace`]s.
//!
//! A run "hits" a target τ at the first evaluation whose best-so-far value is
//! at most τ. The ECDF at evaluation `t` is the fraction of (run, target) pairs
//! hit by `t`; its normalized area is the main summary statistic.

mod report;

pub use report::{analyze, Analysis, AucRow, ErtRow, RankRow, TrajRow};

use crate::error::{Error, Result};
use crate::optim::RunTrace;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_ERT_TARGET: f64 = 1e-8;
pub const DEFAULT_TRAJECTORY_FLOOR: f64 = 1e-12;

/// 51 precision targets, `10^(2 - 0.2 i)` for `i = 0..=50`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetGrid {
    targets: Vec<f64>,
}

impl TargetGrid {
    pub fn standard() -> Self {
        let targets = (0..=50i32)
            .map(|i| {
                let fifths = 10 - i;
                if fifths % 5 == 0 {
                    // Whole decades are parsed so they are exactly the nearest double.
                    format!("1e{}", fifths / 5).parse().expect("decade literal")
                } else {
                    10f64.powf(f64::from(fifths) / 5.0)
                }
            })
            .collect();
        Self { targets }
    }

    /// Custom grid; must be nonempty and strictly decreasing.
    pub fn from_targets(targets: Vec<f64>) -> Result<Self> {
        if targets.is_empty() || targets.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("targets must be nonempty and strictly decreasing".into()));
        }
        Ok(Self { targets })
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

impl Default for TargetGrid {
    fn default() -> Self {
        Self::standard()
    }
}

pub fn target_grid() -> TargetGrid {
    TargetGrid::standard()
}

/// First evaluation at which each target is reached.
pub fn hitting_times(trace: &RunTrace, grid: &TargetGrid) -> Vec<Option<u64>> {
    grid.targets
        .iter()
        .map(|&tau| trace.events.iter().find(|e| e.best <= tau).map(|e| e.evals))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AucAxis {
    #[default]
    Log,
    Linear,
}

impl std::str::FromStr for AucAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(AucAxis::Log),
            "linear" => Ok(AucAxis::Linear),
            other => Err(Error::Config(format!("unknown axis {other:?} (expected log or linear)"))),
        }
    }
}

/// Area contributed by a hit at evaluation `t`, as a fraction of the full axis.
fn hit_weight(t: u64, budget: u64, axis: AucAxis) -> f64 {
    if t > budget {
        return 0.0;
    }
    match axis {
        AucAxis::Log if budget <= 1 => 1.0,
        AucAxis::Log => 1.0 - (t as f64).ln() / (budget as f64).ln(),
        AucAxis::Linear => 1.0 - (t - 1) as f64 / budget as f64,
    }
}

/// Normalized area under the ECDF curve, pooled over all traces.
pub fn ecdf_auc(traces: &[RunTrace], grid: &TargetGrid, budget: u64, axis: AucAxis) -> Result<f64> {
    if traces.is_empty() {
        return Err(Error::EmptyTraces);
    }
    if budget == 0 {
        return Err(Error::Config("budget must be positive".into()));
    }
    let total: f64 = traces
        .iter()
        .flat_map(|trace| hitting_times(trace, grid))
        .flatten()
        .map(|t| hit_weight(t, budget, axis))
        .sum();
    Ok(total / (traces.len() * grid.len()) as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EcdfCurve {
    pub budget: u64,
    /// `(evaluations, fraction of (run, target) pairs hit)`.
    pub points: Vec<(u64, f64)>,
}

/// Roughly `per_decade` log-spaced evaluation counts from 1 to `budget`, inclusive.
pub fn log_eval_grid(budget: u64, per_decade: u32) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let t = 10f64.powf(f64::from(k) / f64::from(per_decade)).round() as u64;
        if t > budget {
            break;
        }
        if grid.last() != Some(&t) {
            grid.push(t);
        }
        k += 1;
    }
    if grid.last() != Some(&budget) {
        grid.push(budget);
    }
    grid
}

pub fn ecdf_curve(traces: &[RunTrace], grid: &TargetGrid, budget: u64) -> Result<EcdfCurve> {
    if traces.is_empty() {
        return Err(Error::EmptyTraces);
    }
    let hits: Vec<u64> = traces
        .iter()
        .flat_map(|t| hitting_times(t, grid))
        .flatten()
        .filter(|&t| t <= budget)
        .collect();
    let mut at: Vec<u64> = log_eval_grid(budget, 10);
    at.extend(&hits);
    at.sort_unstable();
    at.dedup();
    let mut sorted_hits = hits;
    sorted_hits.sort_unstable();
    let pairs = (traces.len() * grid.len()) as f64;
    let points = at
        .into_iter()
        .map(|t| (t, sorted_hits.partition_point(|&h| h <= t) as f64 / pairs))
        .collect();
    Ok(EcdfCurve { budget, points })
}

/// Expected running time to reach `target`; infinite when no run reaches it.
pub fn ert(traces: &[RunTrace], target: f64, budget: u64) -> Result<f64> {
    if traces.is_empty() {
        return Err(Error::EmptyTraces);
    }
    let mut spent = 0u64;
    let mut successes = 0u64;
    for trace in traces {
        match trace.events.iter().find(|e| e.best <= target && e.evals <= budget) {
            Some(e) => {
                spent += e.evals;
                successes += 1;
            }
            None => spent += budget,
        }
    }
    Ok(if successes == 0 {
        f64::INFINITY
    } else {
        spent as f64 / successes as f64
    })
}

/// Geometric mean over runs of the floored best-so-far value at each grid point.
pub fn geomean_trajectory(traces: &[RunTrace], eval_grid: &[u64], floor: f64) -> Result<Vec<(u64, f64)>> {
    if traces.is_empty() {
        return Err(Error::EmptyTraces);
    }
    Ok(eval_grid
        .iter()
        .map(|&t| {
            let mean_log = traces
                .iter()
                .map(|trace| trace.best_at(t.max(1)).unwrap_or(f64::INFINITY).max(floor).ln())
                .sum::<f64>()
                / traces.len() as f64;
            (t, mean_log.exp())
        })
        .collect())
}

/// AUC lookup keyed by algorithm label and cell.
pub type AucTable = BTreeMap<(String, CellKey), f64>;

/// A (pair, alpha) cell. Alpha is stored in millionths, the resolution of the CSV files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub f_first: u32,
    pub f_second: u32,
    pub alpha_micros: i64,
}

impl CellKey {
    pub fn new(f_first: u32, f_second: u32, alpha: f64) -> Self {
        Self {
            f_first,
            f_second,
            alpha_micros: alpha_to_micros(alpha),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_micros as f64 / 1e6
    }
}

pub fn alpha_to_micros(alpha: f64) -> i64 {
    (alpha * 1e6).round() as i64
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankEntry {
    pub algorithm: String,
    pub auc: f64,
    pub rank: usize,
    pub tied: bool,
}

/// Ranks algorithms by descending AUC within one cell. Exact ties share the
/// smallest rank.
pub fn rank_algorithms(auc: &AucTable, cell: CellKey) -> Result<Vec<RankEntry>> {
    let mut entries: Vec<(String, f64)> = auc
        .iter()
        .filter(|((_, c), _)| *c == cell)
        .map(|((alg, _), &v)| (alg.clone(), v))
        .collect();
    if entries.is_empty() {
        return Err(Error::MissingCell(format!(
            "f{} x f{} alpha {:.6}",
            cell.f_first,
            cell.f_second,
            cell.alpha()
        )));
    }
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut ranked = Vec::with_capacity(entries.len());
    for (i, (alg, v)) in entries.iter().enumerate() {
        let rank = match ranked.last() {
            Some(RankEntry { auc, rank, .. }) if auc == v => *rank,
            _ => i + 1,
        };
        let tied = entries.iter().filter(|(_, other)| other == v).count() > 1;
        ranked.push(RankEntry {
            algorithm: alg.clone(),
            auc: *v,
            rank,
            tied,
        });
    }
    Ok(ranked)
}
