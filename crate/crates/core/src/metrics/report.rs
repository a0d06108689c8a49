//! Turns a [`TraceSet`] into the analysis tables (`auc.csv`, `ert.csv`,
//! `rank.csv`, `traj.csv`).

use super::{
    ecdf_auc, ert, geomean_trajectory, log_eval_grid, rank_algorithms, AucAxis, AucTable, CellKey, TargetGrid,
    DEFAULT_TRAJECTORY_FLOOR,
};
use crate::error::{Error, Result};
use crate::optim::RunTrace;
use crate::runner::traces::{format_alpha, format_float};
use crate::runner::TraceSet;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const AUC_HEADER: &str = "alg,f_first,f_second,alpha,instance,auc";
pub const ERT_HEADER: &str = "alg,f_first,f_second,alpha,instance,target,ert";
pub const RANK_HEADER: &str = "f_first,f_second,alpha,alg,rank,tied";
pub const TRAJ_HEADER: &str = "alg,f_first,f_second,alpha,evals,geomean";

/// `None` is the pooled row, written as `all`.
fn instance_label(instance: Option<u32>) -> String {
    instance.map_or_else(|| "all".to_string(), |i| i.to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AucRow {
    pub alg: String,
    pub cell: CellKey,
    pub instance: Option<u32>,
    pub auc: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErtRow {
    pub alg: String,
    pub cell: CellKey,
    pub instance: Option<u32>,
    pub target: f64,
    pub ert: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankRow {
    pub cell: CellKey,
    pub alg: String,
    pub rank: usize,
    pub tied: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajRow {
    pub alg: String,
    pub cell: CellKey,
    pub evals: u64,
    pub geomean: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Analysis {
    pub auc: Vec<AucRow>,
    pub ert: Vec<ErtRow>,
    pub rank: Vec<RankRow>,
    pub traj: Vec<TrajRow>,
}

/// Computes per-instance and pooled AUC and ERT, rankings on pooled AUC, and
/// pooled geometric-mean trajectories for every (algorithm, pair, alpha) cell.
pub fn analyze(set: &TraceSet, target: f64, axis: AucAxis) -> Result<Analysis> {
    if set.is_empty() {
        return Err(Error::EmptyTraces);
    }
    let grid = TargetGrid::standard();
    let budget = set.budget;
    let eval_grid = log_eval_grid(budget, 10);

    let mut cells: BTreeMap<(String, CellKey), BTreeMap<u32, Vec<&RunTrace>>> = BTreeMap::new();
    for (key, trace) in &set.traces {
        let cell = CellKey {
            f_first: key.f_first,
            f_second: key.f_second,
            alpha_micros: key.alpha_micros,
        };
        cells
            .entry((key.alg.clone(), cell))
            .or_default()
            .entry(key.instance)
            .or_default()
            .push(trace);
    }

    let mut out = Analysis::default();
    let mut pooled_auc = AucTable::new();
    for ((alg, cell), by_instance) in &cells {
        let mut all: Vec<RunTrace> = Vec::new();
        for (&instance, traces) in by_instance {
            let owned: Vec<RunTrace> = traces.iter().map(|t| (*t).clone()).collect();
            out.auc.push(AucRow {
                alg: alg.clone(),
                cell: *cell,
                instance: Some(instance),
                auc: ecdf_auc(&owned, &grid, budget, axis)?,
            });
            out.ert.push(ErtRow {
                alg: alg.clone(),
                cell: *cell,
                instance: Some(instance),
                target,
                ert: ert(&owned, target, budget)?,
            });
            all.extend(owned);
        }
        let auc = ecdf_auc(&all, &grid, budget, axis)?;
        pooled_auc.insert((alg.clone(), *cell), auc);
        out.auc.push(AucRow {
            alg: alg.clone(),
            cell: *cell,
            instance: None,
            auc,
        });
        out.ert.push(ErtRow {
            alg: alg.clone(),
            cell: *cell,
            instance: None,
            target,
            ert: ert(&all, target, budget)?,
        });
        for (evals, geomean) in geomean_trajectory(&all, &eval_grid, DEFAULT_TRAJECTORY_FLOOR)? {
            out.traj.push(TrajRow {
                alg: alg.clone(),
                cell: *cell,
                evals,
                geomean,
            });
        }
    }

    let mut distinct: Vec<CellKey> = pooled_auc.keys().map(|(_, c)| *c).collect();
    distinct.sort();
    distinct.dedup();
    for cell in distinct {
        for entry in rank_algorithms(&pooled_auc, cell)? {
            out.rank.push(RankRow {
                cell,
                alg: entry.algorithm,
                rank: entry.rank,
                tied: entry.tied,
            });
        }
    }
    Ok(out)
}

fn cell_prefix(cell: &CellKey) -> String {
    format!("{},{},{}", cell.f_first, cell.f_second, format_alpha(cell.alpha_micros))
}

impl Analysis {
    pub fn render(&self) -> BTreeMap<&'static str, String> {
        let mut auc = format!("{AUC_HEADER}\n");
        for r in &self.auc {
            let _ = writeln!(
                auc,
                "{},{},{},{}",
                r.alg,
                cell_prefix(&r.cell),
                instance_label(r.instance),
                format_float(r.auc)
            );
        }
        let mut ert = format!("{ERT_HEADER}\n");
        for r in &self.ert {
            let value = if r.ert.is_infinite() {
                "inf".to_string()
            } else {
                format_float(r.ert)
            };
            let _ = writeln!(
                ert,
                "{},{},{},{},{value}",
                r.alg,
                cell_prefix(&r.cell),
                instance_label(r.instance),
                format_float(r.target)
            );
        }
        let mut rank = format!("{RANK_HEADER}\n");
        for r in &self.rank {
            let _ = writeln!(rank, "{},{},{},{}", cell_prefix(&r.cell), r.alg, r.rank, r.tied);
        }
        let mut traj = format!("{TRAJ_HEADER}\n");
        for r in &self.traj {
            let _ = writeln!(
                traj,
                "{},{},{},{}",
                r.alg,
                cell_prefix(&r.cell),
                r.evals,
                format_float(r.geomean)
            );
        }
        BTreeMap::from([("auc.csv", auc), ("ert.csv", ert), ("rank.csv", rank), ("traj.csv", traj)])
    }

    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (name, body) in self.render() {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}
