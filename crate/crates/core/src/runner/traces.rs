//! Trace persistence.
//!
//! One CSV per (algorithm, pair), named `{alg}_f{first}_f{second}.csv`:
//! `#` metadata lines, then [`TRACE_HEADER`], then one row per improvement
//! event. Final best points go to a sibling `.best.csv` file.

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::optim::{RunTrace, TraceEvent};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const TRACE_HEADER: &str = "alg,f_first,f_second,alpha,instance,run,evals,best";
pub const BEST_HEADER: &str = "alg,f_first,f_second,alpha,instance,run,final_best,point";

const TRACE_SUFFIX: &str = ".csv";
const BEST_SUFFIX: &str = ".best.csv";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceKey {
    pub alg: String,
    pub f_first: u32,
    pub f_second: u32,
    /// Alpha in millionths.
    pub alpha_micros: i64,
    pub instance: u32,
    pub run: u32,
}

impl TraceKey {
    pub fn alpha(&self) -> f64 {
        self.alpha_micros as f64 / 1e6
    }

    fn file_stem(&self) -> String {
        format!("{}_f{}_f{}", self.alg, self.f_first, self.f_second)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSet {
    pub version: String,
    pub budget: u64,
    pub dimension: usize,
    pub config: Option<ExperimentConfig>,
    pub traces: BTreeMap<TraceKey, RunTrace>,
}

pub(crate) fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn format_alpha(micros: i64) -> String {
    format!("{:.6}", micros as f64 / 1e6)
}

impl TraceSet {
    pub fn new(budget: u64, dimension: usize, config: Option<ExperimentConfig>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            budget,
            dimension,
            config,
            traces: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    fn metadata_lines(&self) -> String {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut out = format!(
            "# combobench {}\n# created: {created}\n# budget: {}\n# dimension: {}\n",
            self.version, self.budget, self.dimension
        );
        if let Some(config) = &self.config {
            let json = serde_json::to_string(config).expect("config serializes");
            let _ = writeln!(out, "# config: {json}");
        }
        out
    }

    /// Trace and best-point file contents, keyed by file name.
    pub fn render_files(&self) -> BTreeMap<String, String> {
        let mut files: BTreeMap<String, String> = BTreeMap::new();
        let meta = self.metadata_lines();
        for (key, trace) in &self.traces {
            let stem = key.file_stem();
            let prefix = format!(
                "{},{},{},{},{},{}",
                key.alg,
                key.f_first,
                key.f_second,
                format_alpha(key.alpha_micros),
                key.instance,
                key.run
            );
            let body = files
                .entry(format!("{stem}{TRACE_SUFFIX}"))
                .or_insert_with(|| format!("{meta}{TRACE_HEADER}\n"));
            for e in &trace.events {
                let _ = writeln!(body, "{prefix},{},{}", e.evals, format_float(e.best));
            }
            let best = files
                .entry(format!("{stem}{BEST_SUFFIX}"))
                .or_insert_with(|| format!("{meta}{BEST_HEADER}\n"));
            let point: Vec<String> = trace.final_best_point.iter().map(|&v| format_float(v)).collect();
            let _ = writeln!(best, "{prefix},{},{}", format_float(trace.final_best), point.join(" "));
        }
        files
    }

    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (name, body) in self.render_files() {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// True for `{alg}_f{a}_f{b}.csv` (not the best-point sidecar).
fn is_trace_file(name: &str) -> bool {
    if name.ends_with(BEST_SUFFIX) {
        return false;
    }
    let Some(stem) = name.strip_suffix(TRACE_SUFFIX) else {
        return false;
    };
    let mut parts = stem.rsplitn(3, "_f");
    let (Some(b), Some(a), Some(alg)) = (parts.next(), parts.next(), parts.next()) else {
        return false;
    };
    !alg.is_empty() && b.parse::<u32>().is_ok() && a.parse::<u32>().is_ok()
}

fn sorted_entries(dir: &Path, keep: impl Fn(&str) -> bool) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(&keep))
        .collect();
    paths.sort();
    Ok(paths)
}

struct Row {
    key: TraceKey,
    rest: Vec<String>,
}

struct ParsedFile {
    budget: u64,
    dimension: Option<usize>,
    rows: Vec<(usize, Row)>,
}

fn parse_file(path: &Path, header: &str, extra_columns: usize) -> Result<ParsedFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut budget = None;
    let mut dimension = None;
    let mut seen_header = false;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("budget:") {
                budget = Some(v.trim().parse().map_err(|_| err(lineno, format!("bad budget {v:?}")))?);
            } else if let Some(v) = comment.strip_prefix("dimension:") {
                dimension = Some(v.trim().parse().map_err(|_| err(lineno, format!("bad dimension {v:?}")))?);
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line != header {
                return Err(err(lineno, format!("expected header {header:?}")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 + extra_columns {
            return Err(err(lineno, format!("expected {} fields, found {}", 6 + extra_columns, fields.len())));
        }
        let num = |i: usize, what: &str| -> Result<u32> {
            fields[i].parse().map_err(|_| err(lineno, format!("bad {what} {:?}", fields[i])))
        };
        let alpha: f64 = fields[3]
            .parse()
            .map_err(|_| err(lineno, format!("bad alpha {:?}", fields[3])))?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(err(lineno, format!("alpha {alpha} outside [0, 1]")));
        }
        if fields[0].is_empty() {
            return Err(err(lineno, "empty algorithm name".into()));
        }
        let key = TraceKey {
            alg: fields[0].to_string(),
            f_first: num(1, "f_first")?,
            f_second: num(2, "f_second")?,
            alpha_micros: crate::metrics::alpha_to_micros(alpha),
            instance: num(4, "instance")?,
            run: num(5, "run")?,
        };
        rows.push((
            lineno,
            Row {
                key,
                rest: fields[6..].iter().map(|s| s.to_string()).collect(),
            },
        ));
    }
    if !seen_header {
        return Err(err(1, "missing header line".into()));
    }
    let budget = budget.ok_or_else(|| err(1, "missing `# budget:` metadata line".into()))?;
    Ok(ParsedFile {
        budget,
        dimension,
        rows,
    })
}

/// Reads every trace file in `dir` into one set.
pub fn read_trace_dir(dir: &Path) -> Result<TraceSet> {
    let paths = sorted_entries(dir, is_trace_file)?;
    if paths.is_empty() {
        return Err(Error::EmptyTraces);
    }
    let mut set: Option<TraceSet> = None;
    for path in paths {
        let parsed = parse_file(&path, TRACE_HEADER, 2)?;
        let set = set.get_or_insert_with(|| TraceSet::new(parsed.budget, parsed.dimension.unwrap_or(0), None));
        if parsed.budget != set.budget {
            return Err(Error::Parse {
                path: path.clone(),
                line: 1,
                message: format!("budget {} differs from {} in other files", parsed.budget, set.budget),
            });
        }
        let mut grouped: BTreeMap<TraceKey, (usize, Vec<TraceEvent>)> = BTreeMap::new();
        for (lineno, row) in parsed.rows {
            let err = |message: String| Error::Parse {
                path: path.clone(),
                line: lineno,
                message,
            };
            let evals: u64 = row.rest[0]
                .parse()
                .map_err(|_| err(format!("bad evals {:?}", row.rest[0])))?;
            let best: f64 = row.rest[1]
                .parse()
                .map_err(|_| err(format!("bad best {:?}", row.rest[1])))?;
            if best.is_nan() {
                return Err(err("best is NaN".into()));
            }
            grouped
                .entry(row.key)
                .or_insert_with(|| (lineno, Vec::new()))
                .1
                .push(TraceEvent { evals, best });
        }
        for (key, (lineno, events)) in grouped {
            let trace = RunTrace::from_events(events, set.budget).map_err(|e| Error::Parse {
                path: path.clone(),
                line: lineno,
                message: e.to_string(),
            })?;
            if set.traces.insert(key.clone(), trace).is_some() {
                return Err(Error::Parse {
                    path: path.clone(),
                    line: lineno,
                    message: format!("duplicate trace {key:?}"),
                });
            }
        }
    }
    set.ok_or(Error::EmptyTraces)
}

/// Final best point of one run, as stored in a `.best.csv` file.
#[derive(Clone, Debug, PartialEq)]
pub struct BestPoint {
    pub key: TraceKey,
    pub final_best: f64,
    pub point: Vec<f64>,
}

/// Reads best points from a `.best.csv` file or from every such file in a directory.
pub fn read_best_points(path: &Path) -> Result<Vec<BestPoint>> {
    let files = if path.is_dir() {
        sorted_entries(path, |n| n.ends_with(BEST_SUFFIX))?
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for file in files {
        let parsed = parse_file(&file, BEST_HEADER, 2)?;
        for (lineno, row) in parsed.rows {
            let err = |message: String| Error::Parse {
                path: file.clone(),
                line: lineno,
                message,
            };
            let final_best = row.rest[0]
                .parse()
                .map_err(|_| err(format!("bad final_best {:?}", row.rest[0])))?;
            let point = row.rest[1]
                .split_whitespace()
                .map(|v| v.parse().map_err(|_| err(format!("bad coordinate {v:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            out.push(BestPoint {
                key: row.key,
                final_best,
                point,
            });
        }
    }
    Ok(out)
}
