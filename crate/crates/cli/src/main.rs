use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use seqlocate_core::er_model::{bound_prediction, er_parameters_with_index, sample_gnp};
use seqlocate_core::experiments::{run_experiment, summary_path, write_output, ExperimentConfig};
use seqlocate_core::game::{
    maxgain_worst_path, minimax_value, play_game, smd_maxgain_estimate, AdversaryPolicy, Player1Policy,
};
use seqlocate_core::graph::{distance_matrix, read_edge_list, write_edge_list, DistanceMatrix};
use seqlocate_core::localization::{greedy_resolving_set, min_resolving_set};
use seqlocate_core::matrix::{
    collision_stats, qc_exact, qc_greedy, qc_threshold, sample_bernoulli, sqc_exact, BinaryMatrix,
};
use seqlocate_core::{Error, QueryOracle};

#[derive(Parser)]
#[command(name = "seqlocate", version, about = "Locate a hidden node with distance queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an Erdős–Rényi graph G(n, p) as an edge list.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// Random when omitted; the seed used is printed to stderr.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resolving sets: greedy always, exact when a cap is given.
    Md {
        #[arg(long = "in")]
        input: PathBuf,
        /// Largest resolving set size the exact search may try.
        #[arg(long)]
        exact_cap: Option<usize>,
    },
    /// Number of adaptive queries needed to find the target.
    Smd {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SmdMode::Exact)]
        mode: SmdMode,
        /// Step cap; defaults to the node count.
        #[arg(long)]
        cap: Option<usize>,
        /// Also print the game transcript as JSON lines.
        #[arg(long)]
        transcript: bool,
    },
    /// Play MAX-GAIN (or optimal play) against a fixed hidden target.
    Game {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        target: usize,
        #[arg(long, value_enum, default_value_t = Chooser::MaxGain)]
        player: Chooser,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Random-graph parameters and predicted query counts.
    Params {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// Override the regime index.
        #[arg(long)]
        force_i: Option<u32>,
    },
    /// Query games on 0/1 matrices (rows are queries, columns are targets).
    Matrix {
        #[command(subcommand)]
        command: MatrixCommand,
    },
    /// Run a sweep described by a JSON config and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "SEQLOCATE_THREADS")]
        threads: Option<usize>,
    },
}

#[derive(Subcommand)]
enum MatrixCommand {
    /// Sample an m × n Bernoulli(q) matrix.
    Sample {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fewest rows that keep all columns distinct.
    Qc {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        exact_cap: Option<usize>,
    },
    /// Adaptive query count.
    Sqc {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SmdMode::Exact)]
        mode: SmdMode,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        transcript: bool,
    },
    /// Equal-column pairs and constant columns.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Row count at which n random columns become distinct.
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SmdMode {
    /// Optimal play by both sides.
    Exact,
    /// MAX-GAIN against every possible answer sequence.
    MaxgainWorst,
    /// MAX-GAIN against the largest-cell adversary (single game).
    MaxgainGreedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chooser {
    MaxGain,
    Exact,
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => Failure::Io(io.to_string()),
            other => Failure::Domain(other),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: Value) {
    println!("{v}");
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn load_graph(path: &Path) -> Result<DistanceMatrix, Failure> {
    let dm = distance_matrix(&read_edge_list(&read(path)?)?);
    dm.require_connected()?;
    Ok(dm)
}

fn load_matrix(path: &Path) -> Result<BinaryMatrix, Failure> {
    Ok(BinaryMatrix::parse(&read(path)?)?)
}

fn adaptive<O: QueryOracle>(o: &O, mode: SmdMode, cap: Option<usize>, transcript: bool) -> Result<(), Failure> {
    o.check_playable()?;
    let cap = cap.unwrap_or(o.query_count().max(1));
    let (value, path) = match mode {
        SmdMode::Exact => {
            let value = minimax_value(o, cap)?;
            let path = transcript
                .then(|| play_game(o, &Player1Policy::ExactMinimax, &AdversaryPolicy::ExactMinimax, cap.max(1)))
                .transpose()?;
            (value, path)
        }
        SmdMode::MaxgainWorst => {
            let path = maxgain_worst_path(o, cap)?;
            (path.step_count(), transcript.then_some(path))
        }
        SmdMode::MaxgainGreedy => {
            let path = smd_maxgain_estimate(o)?.require_resolved(o.query_count())?;
            if path.step_count() > cap {
                return Err(Error::CapExceeded(cap).into());
            }
            (path.step_count(), transcript.then_some(path))
        }
    };
    let mode_name = match mode {
        SmdMode::Exact => "exact",
        SmdMode::MaxgainWorst => "maxgain-worst",
        SmdMode::MaxgainGreedy => "maxgain-greedy",
    };
    print_json(json!({ "mode": mode_name, "steps": value }));
    if let Some(path) = path {
        print!("{}", path.to_json_lines());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { n, p, seed, out } => {
            let g = sample_gnp(n, p, resolve_seed(seed))?;
            emit(out.as_deref(), &write_edge_list(&g))
        }
        Command::Md { input, exact_cap } => {
            let dm = load_graph(&input)?;
            let greedy = greedy_resolving_set(&dm)?;
            let mut report = json!({ "md_greedy": greedy.len(), "greedy_set": greedy.nodes() });
            if let Some(cap) = exact_cap {
                let exact = min_resolving_set(&dm, cap)?;
                report["md_exact"] = json!(exact.len());
                report["exact_set"] = json!(exact.nodes());
            }
            print_json(report);
            Ok(())
        }
        Command::Smd { input, mode, cap, transcript } => adaptive(&load_graph(&input)?, mode, cap, transcript),
        Command::Game { input, target, player, cap } => {
            let dm = load_graph(&input)?;
            let p1 = match player {
                Chooser::MaxGain => Player1Policy::MaxGain,
                Chooser::Exact => Player1Policy::ExactMinimax,
            };
            let cap = cap.unwrap_or(dm.node_count());
            let t = play_game(&dm, &p1, &AdversaryPolicy::FixedTarget(target), cap)?;
            print!("{}", t.to_json_lines());
            t.require_resolved(cap)?;
            Ok(())
        }
        Command::Params { n, p, force_i } => {
            let params = er_parameters_with_index(n, p, force_i)?;
            let bounds = bound_prediction(&params).ok();
            print_json(json!({ "parameters": params, "bounds": bounds }));
            Ok(())
        }
        Command::Matrix { command } => run_matrix(command),
        Command::Sweep { config, out, threads } => {
            let cfg = ExperimentConfig::from_json(&read(&config)?)?;
            eprintln!("seed: {}", cfg.base_seed);
            let output = run_experiment(&cfg, threads)?;
            match out.or_else(|| cfg.output_path.clone()) {
                Some(path) => {
                    write_output(&output, &path)?;
                    if output.summary_csv().is_some() {
                        eprintln!("summary: {}", summary_path(&path).display());
                    }
                }
                None => print!("{}", output.csv()),
            }
            Ok(())
        }
    }
}

fn run_matrix(command: MatrixCommand) -> Result<(), Failure> {
    match command {
        MatrixCommand::Sample { m, n, q, seed, out } => {
            let a = sample_bernoulli(m, n, q, resolve_seed(seed))?;
            emit(out.as_deref(), &a.to_text())
        }
        MatrixCommand::Qc { input, exact_cap } => {
            let a = load_matrix(&input)?;
            a.check_playable()?;
            let greedy = qc_greedy(&a)?;
            let mut report = json!({ "qc_greedy": greedy.len(), "greedy_rows": greedy.nodes() });
            if let Some(cap) = exact_cap {
                let (size, rows) = qc_exact(&a, cap)?;
                report["qc_exact"] = json!(size);
                report["exact_rows"] = json!(rows.nodes());
            }
            print_json(report);
            Ok(())
        }
        MatrixCommand::Sqc { input, mode, cap, transcript } => {
            let a = load_matrix(&input)?;
            if matches!(mode, SmdMode::Exact) && !transcript {
                a.check_playable()?;
                let cap = cap.unwrap_or(a.rows());
                print_json(json!({ "mode": "exact", "steps": sqc_exact(&a, cap)? }));
                return Ok(());
            }
            adaptive(&a, mode, cap, transcript)
        }
        MatrixCommand::Stats { input } => {
            let stats = collision_stats(&load_matrix(&input)?);
            print_json(json!(stats));
            Ok(())
        }
        MatrixCommand::Threshold { n, q } => {
            print_json(json!({ "n": n, "q": q, "m_hat": qc_threshold(n, q)? }));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli);
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(message)) => {
            eprintln!("{}", json!({ "error": "io", "message": message }));
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(3)
        }
    }
}
