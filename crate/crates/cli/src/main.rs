use clap::{Parser, Subcommand};
use combobench_core::metrics::{self, AucAxis, DEFAULT_ERT_TARGET};
use combobench_core::runner::{read_best_points, read_trace_dir, Experiment};
use combobench_core::suite::{make_problem, PlacementPolicy, ProblemId};
use combobench_core::{combine, Error, ExperimentConfig, LandscapeGrid};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "combobench", version, about = "Benchmark optimizers on affine combinations of BBOB functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of an experiment config and write trace files.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute auc.csv, ert.csv, rank.csv and traj.csv from a trace directory.
    Analyze {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ERT_TARGET)]
        target: f64,
        #[arg(long, default_value = "log")]
        axis: AucAxis,
    },
    /// Write log10-scaled 2-D landscape grids, one CSV per alpha.
    Landscape {
        #[arg(long)]
        f1: u32,
        #[arg(long)]
        f2: u32,
        #[arg(long, default_value_t = 1)]
        i1: u32,
        #[arg(long, default_value_t = 1)]
        i2: u32,
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = combobench_core::landscape::DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Best-point file (`*.best.csv`) or a trace directory holding them.
        #[arg(long)]
        overlay: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(config: PathBuf, workers: usize, out: PathBuf) -> Result<(), Error> {
    let config = ExperimentConfig::load(&config)?;
    let experiment = Experiment::prepare(config)?;
    let set = experiment.execute_to_dir(&out, workers)?;
    eprintln!("wrote {} traces to {}", set.len(), out.display());
    Ok(())
}

fn analyze(traces: PathBuf, out: PathBuf, target: f64, axis: AucAxis) -> Result<(), Error> {
    if !(target > 0.0) {
        return Err(Error::Config(format!("target must be positive, got {target}")));
    }
    let set = read_trace_dir(&traces)?;
    let analysis = metrics::analyze(&set, target, axis)?;
    for path in analysis.write_dir(&out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn landscape(
    f1: u32,
    f2: u32,
    i1: u32,
    i2: u32,
    alphas: Vec<f64>,
    dim: usize,
    resolution: usize,
    overlay: Option<PathBuf>,
    out: PathBuf,
) -> Result<(), Error> {
    if dim != 2 {
        return Err(Error::Config(format!("landscapes need --dim 2, got {dim}")));
    }
    if let Some(&bad) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::AlphaOutOfRange(bad));
    }
    let first = make_problem(ProblemId::new(f1, i1, dim)?, PlacementPolicy::Uniform)?;
    let second = make_problem(ProblemId::new(f2, i2, dim)?, PlacementPolicy::Uniform)?;
    let points = match &overlay {
        Some(path) => read_best_points(path)?,
        None => Vec::new(),
    };
    std::fs::create_dir_all(&out).map_err(|e| io_error(&out, e))?;
    for alpha in alphas {
        let problem = combine(first.clone(), second.clone(), alpha)?;
        let mut grid = LandscapeGrid::compute(&problem, resolution)?;
        let micros = metrics::alpha_to_micros(alpha);
        grid.overlay = points
            .iter()
            .filter(|p| {
                p.key.f_first == f1
                    && p.key.f_second == f2
                    && p.key.instance == i1
                    && p.key.alpha_micros == micros
                    && p.point.len() == 2
            })
            .map(|p| [p.point[0], p.point[1]])
            .collect();
        let path = out.join(format!("landscape_f{f1}_f{f2}_i{i1}_a{alpha:.6}.csv"));
        std::fs::write(&path, grid.to_csv()).map_err(|e| io_error(&path, e))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn io_error(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, workers, out } => run(config, workers, out),
        Command::Analyze {
            traces,
            out,
            target,
            axis,
        } => analyze(traces, out, target, axis),
        Command::Landscape {
            f1,
            f2,
            i1,
            i2,
            alpha,
            dim,
            resolution,
            overlay,
            out,
        } => landscape(f1, f2, i1, i2, alpha, dim, resolution, overlay, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
