//! Benchmark CLI: run planners on a scenario file and write CSV (and
//! optionally SVG) output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use fmtstar::experiment::{run_experiment, ExperimentConfig, MuMode};
use fmtstar::instrument::Planner;
use fmtstar::PlanError;

#[derive(Parser, Debug)]
#[command(
    name = "fmtstar",
    about = "Fast-marching planners (fmt, afmt, mplb, ano_mplb, lbt_fmt) on box-world scenarios",
    after_help = "Examples:\n  fmtstar --scenario scenarios/corridors.toml --planner afmt --planner mplb \\\n          --n0 50 --iterations 4 --seed 0 --out out/corridors --snapshots"
)]
struct Cli {
    /// Scenario file (TOML)
    #[arg(long)]
    scenario: PathBuf,

    /// Planner to run: fmt | afmt | mplb | ano_mplb | lbt_fmt (repeatable)
    #[arg(long = "planner", required = true)]
    planners: Vec<Planner>,

    /// Sample count of the first iteration (and of the single fmt shot)
    #[arg(long, default_value_t = 50)]
    n0: usize,

    /// Number of sample-doubling iterations
    #[arg(long, default_value_t = 4)]
    iterations: usize,

    /// Random seed (repeatable; default 0)
    #[arg(long = "seed")]
    seeds: Vec<u64>,

    /// Approximation factor for ano_mplb and lbt_fmt
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,

    /// Connection-radius slack factor
    #[arg(long, default_value_t = 0.01)]
    eta: f64,

    /// Free-space measure estimate: 'bounds' or 'mc:COUNT'
    #[arg(long, default_value = "bounds", value_parser = MuMode::parse)]
    mu: MuMode,

    /// Output directory for runs.csv, comparison.csv and snapshots
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Write one SVG per iteration (2-D scenarios only)
    #[arg(long)]
    snapshots: bool,

    /// Require the afmt-vs-mplb comparison CSV (it is also written
    /// automatically whenever both planners are selected)
    #[arg(long)]
    compare: bool,
}

fn exit_code_for(err: &PlanError) -> u8 {
    match err {
        PlanError::Io(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    let config = ExperimentConfig {
        scenario_path: cli.scenario,
        planners: cli.planners,
        n0: cli.n0,
        iterations: cli.iterations,
        seeds: if cli.seeds.is_empty() { vec![0] } else { cli.seeds },
        epsilon: cli.epsilon,
        eta: cli.eta,
        mu: cli.mu,
        out_dir: cli.out,
        snapshots: cli.snapshots,
        compare: cli.compare,
    };

    match run_experiment(&config) {
        Ok(output) => {
            for run in &output.runs {
                let last = run.records.last().expect("at least one iteration");
                println!(
                    "{} seed={} iterations={} n={} final_cost={} nn={} lp={}",
                    run.planner,
                    run.seed,
                    run.records.len(),
                    last.n,
                    if last.cost.is_infinite() {
                        "inf".to_string()
                    } else {
                        format!("{:.6}", last.cost)
                    },
                    last.counters.nn_calls,
                    last.counters.lp_calls,
                );
            }
            println!("wrote {}", output.runs_csv.display());
            if let Some(path) = &output.comparison_csv {
                let all_pass = output.comparisons.iter().all(|(_, r)| r.all_pass());
                println!(
                    "wrote {} ({})",
                    path.display(),
                    if all_pass { "all verdicts pass" } else { "VERDICT FAILURES" }
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
