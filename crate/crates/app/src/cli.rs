//! The `morphsynth` command line.
//!
//! Exit codes: 0 success, 1 invalid problem, 2 usage error, 3 infeasible
//! instance, 4 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morphsynth::{fixtures, parse_problem, report, ProblemDocument, RankingConfig, RankingMethod};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, FailureClass};
use crate::solve::{
    run_compose, run_knapsack, run_rank, run_trajectory, ComposeRequest, KnapsackRequest, KnapsackSolver, RankRequest,
    TrajectoryRequest,
};
use crate::store::ProblemStore;

/// Directory searched for `--problem NAME` when NAME is not a path.
pub const PROBLEM_DIR_ENV: &str = "MORPHSYNTH_PROBLEM_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "morphsynth", version, about = "Hierarchical morphological design: rank, compose, pack and plan")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Problem file path, a name in $MORPHSYNTH_PROBLEM_DIR, or a bundled
    /// example (example1, example2, example3).
    #[arg(long)]
    problem: String,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    DominanceLayers,
    WeightedOutranking,
    External,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Greedy,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a problem document; prints OK when it is valid.
    Validate(ProblemArgs),
    /// Priority layers of each leaf's alternatives.
    Rank {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        scenario: Option<String>,
        /// Rank only this leaf.
        #[arg(long)]
        node: Option<String>,
        #[arg(long, value_enum, default_value = "dominance-layers")]
        method: MethodArg,
    },
    /// Pareto-efficient composite decisions of a node.
    Compose {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        scenario: Option<String>,
        /// Node to compose (default: the root).
        #[arg(long)]
        node: Option<String>,
    },
    /// One alternative per part under a cost budget.
    Knapsack {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        budget: u64,
        #[arg(long, value_enum, default_value = "exact")]
        solver: SolverArg,
    },
    /// Multistage trajectories across the document's stages.
    Trajectory {
        #[command(flatten)]
        problem: ProblemArgs,
        /// List every feasible trajectory, not only the Pareto set.
        #[arg(long)]
        all: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory holding one JSON file per stored problem.
        #[arg(long, env = "MORPHSYNTH_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
        /// Built workbench assets served at `/`.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        /// Store the bundled examples when the data directory is empty.
        #[arg(long)]
        seed_examples: bool,
    },
}

/// `--format json` output of `validate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub errors: Vec<String>,
}

/// Run with the problem directory taken from the environment.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let dir = std::env::var_os(PROBLEM_DIR_ENV).map(PathBuf::from);
    run_cli_in(argv, dir.as_deref(), out, err)
}

pub fn run_cli_in<I, T>(argv: I, problem_dir: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(cli.command, problem_dir, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = err.write_all(e.report().as_bytes());
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &AppError) -> i32 {
    match e.class() {
        FailureClass::InvalidProblem => EXIT_INVALID,
        FailureClass::BadRequest | FailureClass::NotFound | FailureClass::Conflict => EXIT_USAGE,
        FailureClass::Infeasible => EXIT_INFEASIBLE,
        FailureClass::Io => EXIT_IO,
    }
}

/// Bytes of `--problem NAME`: an existing path first, then
/// `<problem_dir>/NAME[.json]`, then a bundled example.
pub fn read_problem(name: &str, problem_dir: Option<&Path>) -> Result<Vec<u8>, AppError> {
    let direct = Path::new(name);
    let mut candidates = vec![direct.to_path_buf()];
    if let Some(dir) = problem_dir.filter(|_| direct.is_relative()) {
        candidates.push(dir.join(name));
        candidates.push(dir.join(format!("{name}.json")));
    }
    for path in &candidates {
        if path.is_file() {
            return std::fs::read(path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())));
        }
    }
    match fixtures::source(name) {
        Some(text) => Ok(text.as_bytes().to_vec()),
        None => Err(AppError::Io(format!("problem `{name}` not found"))),
    }
}

fn load(args: &ProblemArgs, problem_dir: Option<&Path>) -> Result<ProblemDocument, AppError> {
    Ok(parse_problem(&read_problem(&args.problem, problem_dir)?)?)
}

fn emit<T: Serialize>(out: &mut dyn Write, format: Format, value: &T, table: impl FnOnce(&T) -> String) -> Result<i32, AppError> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("results always serialize") + "\n",
        Format::Table => table(value),
    };
    out.write_all(text.as_bytes()).map_err(|e| AppError::Io(e.to_string()))?;
    Ok(EXIT_OK)
}

fn execute(command: Command, problem_dir: Option<&Path>, out: &mut dyn Write) -> Result<i32, AppError> {
    match command {
        Command::Validate(args) => {
            let parsed = read_problem(&args.problem, problem_dir).map(|b| parse_problem(&b));
            let report = match parsed? {
                Ok(_) => ValidationReport { ok: true, errors: Vec::new() },
                Err(morphsynth::DocumentError::Invalid(v)) => {
                    ValidationReport { ok: false, errors: v.iter().map(ToString::to_string).collect() }
                }
                Err(e) => ValidationReport { ok: false, errors: vec![e.to_string()] },
            };
            emit(out, args.format, &report, |r| {
                if r.ok {
                    "OK\n".to_string()
                } else {
                    r.errors.iter().map(|e| format!("{e}\n")).collect()
                }
            })?;
            Ok(if report.ok { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Rank { problem, scenario, node, method } => {
            let doc = load(&problem, problem_dir)?;
            let method = match method {
                MethodArg::DominanceLayers => RankingMethod::DominanceLayers,
                MethodArg::WeightedOutranking => RankingMethod::WeightedOutranking,
                MethodArg::External => RankingMethod::External,
            };
            let config = RankingConfig { method, max_layers: doc.scales.layers, ..RankingConfig::default() };
            let result = run_rank(&doc, &RankRequest { scenario, node, config })?;
            emit(out, problem.format, &result, |r| r.leaves.iter().map(|(leaf, a)| report::priority_table(leaf, a)).collect())
        }
        Command::Compose { problem, scenario, node } => {
            let doc = load(&problem, problem_dir)?;
            let result = run_compose(&doc, &ComposeRequest { scenario, node })?;
            emit(out, problem.format, &result, |r| format!("scenario {}\n{}", r.scenario, report::pareto_table(&r.pareto)))
        }
        Command::Knapsack { problem, budget, solver } => {
            let doc = load(&problem, problem_dir)?;
            let solver = match solver {
                SolverArg::Exact => KnapsackSolver::Exact,
                SolverArg::Greedy => KnapsackSolver::Greedy,
            };
            let result = run_knapsack(&doc, &KnapsackRequest { budget, solver })?;
            emit(out, problem.format, &result, |r| {
                format!("{}{}", report::ordering_table(&r.ordering), report::selection_lines(&r.selection))
            })
        }
        Command::Trajectory { problem, all } => {
            let doc = load(&problem, problem_dir)?;
            let result = run_trajectory(&doc, &TrajectoryRequest { config: None, all })?;
            emit(out, problem.format, &result, |r| {
                format!("stages: {}\n{}", r.stages.join(", "), report::trajectory_table(&r.trajectories))
            })
        }
        Command::Serve { port, host, data_dir, ui_dir, seed_examples } => {
            let store = ProblemStore::open(&data_dir)?;
            if seed_examples && store.list().is_empty() {
                for (name, _) in fixtures::ALL {
                    store.create(Some(name), fixtures::load(name).expect("bundled examples parse"))?;
                }
            }
            let addr = SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| AppError::Io(e.to_string()))?;
            writeln!(out, "serving {} problem(s) from {} on http://{addr}", store.list().len(), data_dir.display())
                .map_err(|e| AppError::Io(e.to_string()))?;
            runtime
                .block_on(crate::api::serve(Arc::new(store), ui_dir, addr))
                .map_err(|e| AppError::Io(format!("{addr}: {e}")))?;
            Ok(EXIT_OK)
        }
    }
}
