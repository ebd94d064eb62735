mod commands;
mod ingest;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::ingest::{Format, Transform};

#[derive(Parser, Debug)]
#[command(
    name = "depgap",
    version,
    about = "Local-density-gap dependence measures and experiments"
)]
struct Cli {
    /// Worker threads for pairwise and grid fan-out (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measure dependence between two rows of a matrix or the columns of a paired sample.
    Measure(MeasureArgs),
    /// Compute the symmetric gene-by-gene dependence matrix.
    Matrix(MatrixArgs),
    /// Draw a paired sample from a synthetic-family spec (JSON).
    Simulate(SimulateArgs),
    /// Permutation test of independence.
    Test(TestArgs),
    /// Run a named experiment, or `list` to print the names.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MeasureName {
    Pearson,
    Spearman,
    Kendall,
    Hoeffd,
    Dcor,
    Hsic,
    Hhg,
    Mr,
    Aldg,
    Avgcsn,
    MeanT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum RuleName {
    Auto,
    Fixed,
    UniformError,
    AsymptoticNorm,
    InflectionPoint,
}

#[derive(Args, Debug, Clone)]
struct MeasureSpec {
    #[arg(long, value_enum)]
    measure: MeasureName,
    /// Threshold rule for aldg.
    #[arg(long, value_enum)]
    threshold_rule: Option<RuleName>,
    /// Threshold for `--threshold-rule fixed` (implies it when no rule is given).
    #[arg(long)]
    t: Option<f64>,
    /// Extra measure parameter, e.g. `k=4` for mr, `width=0.5` for hsic, `alpha=0.05` for avgcsn.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, env = "DEPGAP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct MatrixInput {
    /// Expression matrix: header row of cell ids, first column gene ids.
    #[arg(long)]
    input: PathBuf,
    /// Defaults to the file extension (.tsv is tab separated, otherwise CSV).
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "none")]
    transform: Transform,
}

#[derive(Args, Debug, Clone)]
struct SampleSource {
    /// Expression matrix; pick two rows with --x-row / --y-row.
    #[arg(long, conflicts_with = "pairs", requires_all = ["x_row", "y_row"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "none")]
    transform: Transform,
    /// Gene id or 0-based row index.
    #[arg(long)]
    x_row: Option<String>,
    #[arg(long)]
    y_row: Option<String>,
    /// Paired-sample CSV with header `x,y` (as written by `simulate`).
    #[arg(long, required_unless_present = "input")]
    pairs: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    source: SampleSource,
    #[command(flatten)]
    spec: MeasureSpec,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    #[command(flatten)]
    input: MatrixInput,
    #[command(flatten)]
    spec: MeasureSpec,
    /// Output CSV; failed pairs are listed in `<out>.diagnostics.json`.
    #[arg(long)]
    out: PathBuf,
    /// Also write the ingested matrix (after --transform) in the input format.
    #[arg(long)]
    save_input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// SynthSpec JSON file, `-` for stdin.
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the seed in the spec.
    #[arg(long, env = "DEPGAP_SEED")]
    seed: Option<u64>,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TestArgs {
    #[command(flatten)]
    source: SampleSource,
    #[command(flatten)]
    spec: MeasureSpec,
    #[arg(long, default_value_t = 200)]
    n_perms: usize,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_parser = experiment_names())]
    name: String,
    /// Use the full-size grids instead of the reduced defaults.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_perms: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, env = "DEPGAP_SEED", default_value_t = 0)]
    seed: u64,
}

fn experiment_names() -> clap::builder::PossibleValuesParser {
    let mut names = vec!["list"];
    names.extend(depgap::experiments::EXPERIMENT_NAMES);
    clap::builder::PossibleValuesParser::new(names)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // clap omits the usage line for bad values; always show it
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    let run = || commands::run(cli.command);
    let result = match cli.threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(anyhow::anyhow!("cannot start {k} worker threads: {e}")),
        },
        None => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<commands::UsageError>().is_some() => {
            eprintln!("error: {e}\n\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
