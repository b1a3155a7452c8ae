use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isac_fbl::{load_config_for, run, write_output, Experiment, RunError};

#[derive(Parser)]
#[command(name = "isac-fbl", version, about = "ISAC tradeoff, NMSE and CRB sweeps to CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate bounds over an (SNR, e_th) grid
    Tradeoff(RunArgs),
    /// Rate bounds over (n, SNR, e_th)
    Surface(RunArgs),
    /// Analytic vs. Monte Carlo LS NMSE
    Montecarlo(RunArgs),
    /// AoA / range / velocity CRB sweeps
    Crb(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_path`; stdout when neither is set
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<(), RunError> {
    let mut cfg = load_config_for(&args.config, Some(experiment))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let output = args.output.or_else(|| cfg.output_path.as_ref().map(PathBuf::from));
    let csv = match args.threads {
        Some(0) => return Err(RunError::validation("--threads", "must be >= 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| RunError::validation("--threads", e.to_string()))?
            .install(|| run(&cfg))?,
        None => run(&cfg)?,
    };
    write_output(output.as_deref(), &csv)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Tradeoff(a) => (Experiment::TradeoffSnr, a),
        Command::Surface(a) => (Experiment::TradeoffSurface, a),
        Command::Montecarlo(a) => (Experiment::MontecarloVerify, a),
        Command::Crb(a) => (Experiment::CrbSweep, a),
    };
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
