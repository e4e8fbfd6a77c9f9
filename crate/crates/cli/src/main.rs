//! Command-line experiments for the hypergraph majority-rule simulator.
//!
//! Every subcommand is reproducible: the output's leading comment line
//! plus the seed fully determine the bytes. Exit codes: 0 on success,
//! 1 on usage or I/O errors, 2 when a mathematical identity or coupling
//! violation is detected (so CI can fail on regressions).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};
use majority_core::contour2d::ShapeClass;

#[derive(Parser, Debug)]
#[command(
    name = "majority",
    about = "Kinetic Monte Carlo experiments for block-hyperedge spin dynamics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a 2D model from Bernoulli(1/2) and write the final grid as
    /// text and binary grayscale PGM.
    Snapshot(SnapshotArgs),
    /// Corner-counting identity reports over a cluster file or a
    /// generated regular-cluster corpus.
    Theorem4(Theorem4Args),
    /// Rightmost-1 front drift for even block sides (one dimension).
    Drift1d(Drift1dArgs),
    /// Center-path coupling checks for odd block sides (one dimension).
    Coupling1d(Coupling1dArgs),
    /// Slice-process tools: exact drift table, trajectories, good-time
    /// estimates.
    Slice(SliceArgs),
    /// Extinction times of square clusters under the 3x3 majority rule.
    Extinction(ExtinctionArgs),
    /// Two-point disagreement probabilities over time.
    ClusterStats(ClusterStatsArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Base RNG seed; replica r draws from stream (seed, r).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for replica fan-out (0 = available parallelism).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of key=value lines supplying defaults for this subcommand's
    /// long flags; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum ModelArg {
    Majority,
    Voter,
}

#[derive(Args, Debug)]
struct SnapshotArgs {
    /// Dynamics to run.
    #[arg(long, value_enum, default_value_t = ModelArg::Majority)]
    model: ModelArg,
    /// Lattice dimension (snapshots are 2D).
    #[arg(long, default_value_t = 2)]
    d: u8,
    /// Block side for the majority model [default: 2].
    #[arg(long)]
    n: Option<u32>,
    /// Torus side length.
    #[arg(long, default_value_t = 400)]
    side: i64,
    /// Simulation horizon.
    #[arg(long, default_value_t = 20.0)]
    time: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum ShapeArg {
    Rectangle,
    Staircase,
    Orthoconvex,
    Mixed,
}

#[derive(Args, Debug)]
struct Theorem4Args {
    /// Cluster file in grid text format (default: generate a corpus).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of clusters to generate when no input is given.
    #[arg(long, default_value_t = 200)]
    generate: usize,
    /// Shape family for generated clusters.
    #[arg(long, value_enum, default_value_t = ShapeArg::Mixed)]
    shape_class: ShapeArg,
    /// Vertex-count hint for generated clusters.
    #[arg(long, default_value_t = 300)]
    target_size: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Drift1dArgs {
    /// Even block side.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Horizon per replica.
    #[arg(long, default_value_t = 1000.0)]
    time: f64,
    /// Independent replicas.
    #[arg(long, default_value_t = 32)]
    replicas: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Coupling1dArgs {
    /// Odd block side.
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Horizon per replica.
    #[arg(long, default_value_t = 50.0)]
    time: f64,
    /// Independent replicas.
    #[arg(long, default_value_t = 500)]
    replicas: usize,
    /// Distance between the two tracked vertices.
    #[arg(long, default_value_t = 4)]
    pair_dist: i64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SliceArgs {
    #[command(subcommand)]
    mode: SliceMode,
}

#[derive(Subcommand, Debug)]
enum SliceMode {
    /// Exact drift table over canonical interfaces.
    Table(SliceTableArgs),
    /// One slice-process trajectory from the flat front.
    Run(SliceRunArgs),
    /// Monte Carlo good-time estimates per starting interface.
    Goodtime(SliceGoodtimeArgs),
}

#[derive(Args, Debug)]
struct SliceTableArgs {
    /// Interface coordinate bound |a|, |b| <= range.
    #[arg(long, default_value_t = 6)]
    range: i64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SliceRunArgs {
    /// Horizon.
    #[arg(long, default_value_t = 100.0)]
    time: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SliceGoodtimeArgs {
    /// Starting interface "a,b"; repeatable [default: 0,0 0,1 0,2 -1,0 -2,0].
    #[arg(long = "interface", value_name = "A,B")]
    interfaces: Vec<String>,
    /// Replicas per interface.
    #[arg(long, default_value_t = 10000)]
    replicas: usize,
    /// Per-replica time cap (cap hits are reported).
    #[arg(long, default_value_t = 1000.0)]
    cap: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ExtinctionArgs {
    /// Initial square sides.
    #[arg(long = "m-list", value_delimiter = ',', default_values_t = [12i64, 20, 30])]
    m_list: Vec<i64>,
    /// Replicas per square side.
    #[arg(long, default_value_t = 100)]
    replicas: usize,
    /// Window margin in cells [default: 2m].
    #[arg(long)]
    margin: Option<i64>,
    /// Per-replica time cap.
    #[arg(long, default_value_t = 10000.0)]
    cap: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ClusterStatsArgs {
    /// Dynamics to run.
    #[arg(long, value_enum, default_value_t = ModelArg::Majority)]
    model: ModelArg,
    /// Lattice dimension.
    #[arg(long, default_value_t = 1)]
    d: u8,
    /// Block side for the majority model [default: 3].
    #[arg(long)]
    n: Option<u32>,
    /// Torus side [default: 20 * pair-dist].
    #[arg(long)]
    side: Option<i64>,
    /// Distance between the measured pair.
    #[arg(long, default_value_t = 1)]
    pair_dist: i64,
    /// Measurement times.
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 50.0, 100.0])]
    times: Vec<f64>,
    /// Replicas per time point.
    #[arg(long, default_value_t = 1000)]
    replicas: usize,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let argv = match merge_config_file(raw) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(Outcome { violations: 0 }) => ExitCode::SUCCESS,
        Ok(Outcome { violations }) => {
            eprintln!("{violations} mathematical violation(s) detected");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    let threads = match &cli.command {
        Command::Snapshot(a) => a.common.threads,
        Command::Theorem4(a) => a.common.threads,
        Command::Drift1d(a) => a.common.threads,
        Command::Coupling1d(a) => a.common.threads,
        Command::Slice(a) => match &a.mode {
            SliceMode::Table(x) => x.common.threads,
            SliceMode::Run(x) => x.common.threads,
            SliceMode::Goodtime(x) => x.common.threads,
        },
        Command::Extinction(a) => a.common.threads,
        Command::ClusterStats(a) => a.common.threads,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    pool.install(|| run_command(cli))
}

fn run_command(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Snapshot(a) => {
            if a.d != 2 {
                return Err(CliError::Usage("--d must be 2 for snapshot".into()));
            }
            let out = a.common.out.clone().ok_or_else(|| {
                CliError::Usage("--out is required for snapshot (two files are written)".into())
            })?;
            commands::snapshot(&commands::SnapshotParams {
                voter: a.model == ModelArg::Voter,
                n: a.n,
                side: a.side,
                time: a.time,
                seed: a.common.seed,
                out,
            })
        }
        Command::Theorem4(a) => commands::theorem4(&commands::Theorem4Params {
            input: a.input,
            generate: a.generate,
            shape_class: match a.shape_class {
                ShapeArg::Rectangle => Some(ShapeClass::Rectangle),
                ShapeArg::Staircase => Some(ShapeClass::Staircase),
                ShapeArg::Orthoconvex => Some(ShapeClass::RandomOrthoconvex),
                ShapeArg::Mixed => None,
            },
            target_size: a.target_size,
            seed: a.common.seed,
            out: a.common.out,
        }),
        Command::Drift1d(a) => commands::drift1d(&commands::Drift1dParams {
            n: a.n,
            time: a.time,
            replicas: a.replicas,
            seed: a.common.seed,
            out: a.common.out,
        }),
        Command::Coupling1d(a) => commands::coupling1d(&commands::Coupling1dParams {
            n: a.n,
            time: a.time,
            replicas: a.replicas,
            pair_dist: a.pair_dist,
            seed: a.common.seed,
            out: a.common.out,
        }),
        Command::Slice(a) => match a.mode {
            SliceMode::Table(x) => commands::slice_table(&commands::SliceTableParams {
                range: x.range,
                out: x.common.out,
            }),
            SliceMode::Run(x) => commands::slice_run(&commands::SliceRunParams {
                time: x.time,
                seed: x.common.seed,
                out: x.common.out,
            }),
            SliceMode::Goodtime(x) => {
                let interfaces = parse_interfaces(&x.interfaces)?;
                commands::slice_goodtime(&commands::SliceGoodtimeParams {
                    interfaces,
                    replicas: x.replicas,
                    cap: x.cap,
                    seed: x.common.seed,
                    out: x.common.out,
                })
            }
        },
        Command::Extinction(a) => commands::extinction(&commands::ExtinctionParams {
            m_list: a.m_list,
            replicas: a.replicas,
            margin: a.margin,
            cap: a.cap,
            seed: a.common.seed,
            out: a.common.out,
        }),
        Command::ClusterStats(a) => commands::cluster_stats(&commands::ClusterStatsParams {
            voter: a.model == ModelArg::Voter,
            n: a.n,
            dimension: a.d,
            side: a.side,
            pair_dist: a.pair_dist,
            times: a.times,
            replicas: a.replicas,
            seed: a.common.seed,
            out: a.common.out,
        }),
    }
}

fn parse_interfaces(raw: &[String]) -> Result<Vec<(i64, i64)>, CliError> {
    if raw.is_empty() {
        return Ok(vec![(0, 0), (0, 1), (0, 2), (-1, 0), (-2, 0)]);
    }
    raw.iter()
        .map(|s| {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 2 {
                return Err(CliError::Usage(format!(
                    "--interface {s}: expected two comma-separated integers"
                )));
            }
            let a = parts[0].trim().parse().map_err(|_| {
                CliError::Usage(format!("--interface {s}: bad integer {}", parts[0]))
            })?;
            let b = parts[1].trim().parse().map_err(|_| {
                CliError::Usage(format!("--interface {s}: bad integer {}", parts[1]))
            })?;
            Ok((a, b))
        })
        .collect()
}

/// Expand `--config FILE` into injected `--key value` pairs placed right
/// after the subcommand tokens, skipping keys the user passed
/// explicitly. Lines are `key=value`; blank lines and `#` comments are
/// ignored; underscores in keys are treated as dashes.
fn merge_config_file(argv: Vec<String>) -> Result<Vec<String>, String> {
    let config_path = find_config_value(&argv);
    let Some(path) = config_path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("--config {path}: {e}"))?;

    let explicit: Vec<String> = argv
        .iter()
        .filter(|a| a.starts_with("--"))
        .map(|a| {
            a.trim_start_matches("--")
                .split('=')
                .next()
                .unwrap()
                .to_string()
        })
        .collect();

    let mut injected = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "--config {path}: line {}: expected key=value",
                lineno + 1
            ));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!(
                "--config {path}: line {}: config files cannot nest",
                lineno + 1
            ));
        }
        if explicit.contains(&key) {
            continue; // explicit flags win
        }
        injected.push(format!("--{key}"));
        injected.push(value.to_string());
    }

    // Insert after the leading subcommand tokens (program name plus any
    // non-flag tokens before the first flag).
    let mut head = 1;
    while head < argv.len() && !argv[head].starts_with('-') {
        head += 1;
    }
    let mut merged = argv[..head].to_vec();
    merged.extend(injected);
    merged.extend(argv[head..].iter().cloned());
    Ok(merged)
}

fn find_config_value(argv: &[String]) -> Option<String> {
    let mut iter = argv.iter().peekable();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            return iter.peek().map(|s| s.to_string());
        }
        if let Some(rest) = arg.strip_prefix("--config=") {
            return Some(rest.to_string());
        }
    }
    None
}
