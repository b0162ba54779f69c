use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coexsim::harness::{
    csat_traces_csv, emit, null_depth_report, run_sweep, ExperimentConfig, OutputFormat,
};
use coexsim::optimizer::Method;
use coexsim::rate::Policy;
use coexsim::scenario::RadioParams;

#[derive(Parser)]
#[command(name = "coexsim", about = "LTE-U/WiFi coexistence simulator with spatial nulling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo sweep over distance, antennas, stations, policy.
    Sweep {
        /// JSON experiment config; CLI flags override file values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        /// Restrict to one or more policies (MaxSum, MaxLTE, MaxWiFi).
        #[arg(long)]
        policy: Vec<Policy>,
        /// Restrict to one or more methods (NONULL, GREEDY, EXHAUSTIVE).
        #[arg(long)]
        method: Vec<Method>,
    },
    /// Export CSAT T_on adaptation traces under backlogged WiFi.
    Csat {
        #[arg(long, default_value_t = 10)]
        max_ncs: usize,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Array diagnostics: null depth over random configurations.
    NullDepth {
        #[arg(long, default_value_t = 200)]
        configs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run() -> Result<(), Box<dyn std::error::Error>> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep {
            config,
            runs,
            seed,
            out,
            format,
            policy,
            method,
        } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::from_file(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(runs) = runs {
                cfg.runs = runs;
            }
            if let Some(seed) = seed {
                cfg.base_seed = seed;
            }
            if !policy.is_empty() {
                cfg.policies = policy;
            }
            if !method.is_empty() {
                cfg.methods = method;
            }
            let trials = run_sweep(&cfg)?;
            let written = emit(&trials, &out, format)?;
            for p in written {
                println!("wrote {}", p.display());
            }
        }
        Command::Csat { max_ncs, steps, out } => {
            std::fs::create_dir_all(&out)?;
            let path = out.join("csat_traces.csv");
            std::fs::write(&path, csat_traces_csv(&RadioParams::default(), max_ncs, steps))?;
            println!("wrote {}", path.display());
        }
        Command::NullDepth { configs, seed, out } => {
            let rows = null_depth_report(configs, seed);
            let worst = rows
                .iter()
                .map(|r| r.worst_null_gain)
                .fold(0.0f64, f64::max);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let path = dir.join("null_depth.csv");
                let mut csv = String::from("K,n_nulls,worst_null_gain,served_gain\n");
                for r in &rows {
                    csv.push_str(&format!(
                        "{},{},{:.3e},{:.6}\n",
                        r.k, r.n_nulls, r.worst_null_gain, r.served_gain
                    ));
                }
                std::fs::write(&path, csv)?;
                println!("wrote {}", path.display());
            }
            println!(
                "{} configurations, worst null gain {:.3e} (limit 1e-12)",
                rows.len(),
                worst
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
