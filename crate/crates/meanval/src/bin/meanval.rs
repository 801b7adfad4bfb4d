//! Batch runner for mean-value experiments described by JSON configs.
//!
//! `meanval run cfg.json --out results/` executes the experiment, writes
//! `report.json` (and `history.csv` when the experiment traces a single
//! mean-value loop) and exits with the verdict: 0 converged, 2 oscillating
//! or failed check, 3 iteration budget exhausted, 1 hard error.
//!
//! Set `MEANVAL_THREADS` to pin the sampling thread pool; results are
//! byte-identical for any thread count.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meanval::config::{self, RunConfig};

#[derive(Parser)]
#[command(name = "meanval", version, about = "Renormalized mean values of functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config and write its report.
    Run(RunArgs),
    /// Check a config without running it.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Directory for report.json and history.csv (default: alongside stdout only).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the convergence threshold.
    #[arg(long)]
    eps: Option<f64>,
    /// Override the iteration cap.
    #[arg(long)]
    n_max: Option<u64>,
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("MEANVAL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| format!("MEANVAL_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("MEANVAL_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("failed to size the thread pool: {e}"))
}

fn run(args: &RunArgs) -> Result<i32, String> {
    let mut cfg = RunConfig::from_path(&args.config).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(eps) = args.eps {
        cfg.criteria.eps = Some(eps);
    }
    if let Some(n_max) = args.n_max {
        cfg.criteria.n_max = Some(n_max);
    }
    let outcome = config::run(&cfg).map_err(|e| format!("{} ({})", e, e.code()))?;
    let pretty = serde_json::to_string_pretty(&outcome.report)
        .map_err(|e| format!("report serialization failed: {e}"))?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {dir:?}: {e}"))?;
        let report_path = dir.join("report.json");
        std::fs::write(&report_path, format!("{pretty}\n"))
            .map_err(|e| format!("cannot write {report_path:?}: {e}"))?;
        if let Some(history) = &outcome.history {
            let path = dir.join("history.csv");
            let file = std::fs::File::create(&path)
                .map_err(|e| format!("cannot write {path:?}: {e}"))?;
            history
                .write_csv(std::io::BufWriter::new(file))
                .map_err(|e| format!("cannot write {path:?}: {e}"))?;
        }
    } else {
        println!("{pretty}");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Validate { config } => RunConfig::from_path(config)
            .and_then(|cfg| config::validate(&cfg))
            .map(|()| {
                println!("ok");
                0
            })
            .map_err(|e| format!("{} ({})", e, e.code())),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
