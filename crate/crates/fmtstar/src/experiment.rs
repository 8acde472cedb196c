//! Experiment orchestration: run the selected planners over the selected
//! seeds, emit one CSV row per iteration, plus an optional paired-comparison
//! CSV and per-iteration SVG snapshots for 2-D scenarios.
//!
//! Every column except `wall_time_ms` is deterministic for a fixed
//! configuration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anytime::afmt_observed;
use crate::cspace::Scenario;
use crate::error::PlanError;
use crate::instrument::{compare_runs, ComparisonReport, Planner, RunRecord};
use crate::lbt::anytime_lbt_observed;
use crate::mplb::{mplb_observed, MplbParams};
use crate::neighbors::RadiusParams;
use crate::scenario_io::parse_scenario;
use crate::search::{fmt_star, PathResult, SearchTree};
use crate::snapshot::write_snapshot;

/// Seed of the internal rng used for Monte-Carlo measure estimation, fixed
/// so experiment outputs stay deterministic.
const MEASURE_SEED: u64 = 1;

/// How the free-space measure fed into the connection radius is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuMode {
    /// Volume of the bounding box (default, a safe over-estimate).
    Bounds,
    /// Monte-Carlo estimate with this many samples.
    MonteCarlo(usize),
}

impl MuMode {
    pub fn parse(text: &str) -> Result<Self, PlanError> {
        if text == "bounds" {
            return Ok(MuMode::Bounds);
        }
        if let Some(count) = text.strip_prefix("mc:") {
            let count: usize = count
                .parse()
                .map_err(|_| PlanError::invalid_input(format!("bad sample count in --mu {text}")))?;
            if count < 1 {
                return Err(PlanError::invalid_input("--mu mc:COUNT needs COUNT >= 1"));
            }
            return Ok(MuMode::MonteCarlo(count));
        }
        Err(PlanError::invalid_input(format!(
            "--mu must be 'bounds' or 'mc:COUNT', got '{text}'"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario_path: PathBuf,
    pub planners: Vec<Planner>,
    pub n0: usize,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub epsilon: f64,
    pub eta: f64,
    pub mu: MuMode,
    pub out_dir: PathBuf,
    pub snapshots: bool,
    pub compare: bool,
}

/// One planner/seed run.
#[derive(Debug, Clone)]
pub struct SeededRun {
    pub planner: Planner,
    pub seed: u64,
    pub records: Vec<RunRecord>,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub runs_csv: PathBuf,
    pub comparison_csv: Option<PathBuf>,
    pub runs: Vec<SeededRun>,
    pub comparisons: Vec<(u64, ComparisonReport)>,
}

/// 12 significant digits; infinity spelled `inf`.
fn fmt_cost(cost: f64) -> String {
    if cost.is_infinite() {
        "inf".to_string()
    } else {
        format!("{cost:.11e}")
    }
}

pub const RUNS_HEADER: &str =
    "planner,seed,iteration,n,preproc_size,tree_size,discarded,cost,wall_time_ms,nn_calls,lp_calls,epsilon";

pub const COMPARISON_HEADER: &str =
    "seed,iteration,lp_subset,tree_size_leq,cost_relation,lp_ratio,nn_ratio";

fn runs_row(planner: Planner, seed: u64, r: &RunRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{:.3},{},{},{}",
        planner,
        seed,
        r.iteration,
        r.n,
        r.preproc_size,
        r.tree_size,
        r.discarded,
        fmt_cost(r.cost),
        r.wall_time.as_secs_f64() * 1e3,
        r.counters.nn_calls,
        r.counters.lp_calls,
        r.epsilon,
    )
}

/// Collects snapshot output for one run; errors surface after the run.
struct SnapshotSink<'a> {
    enabled: bool,
    dir: &'a Path,
    scenario: &'a Scenario,
    planner: Planner,
    seed: u64,
    error: Option<std::io::Error>,
}

impl SnapshotSink<'_> {
    fn save(
        &mut self,
        iteration: usize,
        points: &[crate::cspace::Configuration],
        tree: &SearchTree,
        path: &PathResult,
    ) {
        if !self.enabled || self.error.is_some() {
            return;
        }
        let file = self
            .dir
            .join(format!("{}_seed{}_iter{}.svg", self.planner, self.seed, iteration));
        if let Err(e) = write_snapshot(&file, self.scenario, points, tree, path) {
            self.error = Some(e);
        }
    }

    fn finish(self) -> Result<(), PlanError> {
        match self.error {
            Some(e) => Err(PlanError::Io(e)),
            None => Ok(()),
        }
    }
}

fn run_one(
    planner: Planner,
    scenario: &Scenario,
    config: &ExperimentConfig,
    radius: &RadiusParams,
    seed: u64,
    snapshots_enabled: bool,
) -> Result<Vec<RunRecord>, PlanError> {
    let mut sink = SnapshotSink {
        enabled: snapshots_enabled,
        dir: &config.out_dir,
        scenario,
        planner,
        seed,
        error: None,
    };
    let records = match planner {
        Planner::Fmt => {
            let (path, tree, record) = fmt_star(scenario, config.n0, radius, seed)?;
            let mut seq = crate::anytime::SampleSequence::new(scenario, seed)?;
            seq.extend_to(scenario, config.n0)?;
            sink.save(1, seq.prefix(config.n0), &tree, &path);
            vec![record]
        }
        Planner::Afmt => afmt_observed(scenario, config.n0, config.iterations, radius, seed, |it| {
            sink.save(it.iteration, it.points, it.tree, it.path)
        })?,
        Planner::Mplb | Planner::AnoMplb => {
            let epsilon = if planner == Planner::AnoMplb {
                config.epsilon
            } else {
                0.0
            };
            let params = MplbParams::new(config.n0, config.iterations, epsilon, radius.clone(), seed);
            mplb_observed(scenario, &params, |it| {
                sink.save(it.iteration, it.points, it.tree, it.path)
            })?
        }
        Planner::LbtFmt => anytime_lbt_observed(
            scenario,
            config.n0,
            config.iterations,
            radius,
            config.epsilon,
            seed,
            |it| sink.save(it.iteration, it.points, &it.dual.apx, it.path),
        )?,
    };
    sink.finish()?;
    Ok(records)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, PlanError> {
    if config.planners.is_empty() {
        return Err(PlanError::invalid_input("select at least one planner"));
    }
    if config.seeds.is_empty() {
        return Err(PlanError::invalid_input("select at least one seed"));
    }
    if config.n0 < 1 || config.iterations < 1 {
        return Err(PlanError::invalid_input("n0 and iterations must be >= 1"));
    }
    if !(config.epsilon >= 0.0) || !config.epsilon.is_finite() {
        return Err(PlanError::invalid_input("epsilon must be finite and >= 0"));
    }
    if config.planners.contains(&Planner::AnoMplb) && config.epsilon == 0.0 {
        return Err(PlanError::invalid_input("planner ano_mplb requires --epsilon > 0"));
    }
    let has_afmt = config.planners.contains(&Planner::Afmt);
    let partner = if config.planners.contains(&Planner::Mplb) {
        Some(Planner::Mplb)
    } else if config.planners.contains(&Planner::AnoMplb) {
        Some(Planner::AnoMplb)
    } else {
        None
    };
    let can_compare = has_afmt && partner.is_some();
    if config.compare && !can_compare {
        return Err(PlanError::invalid_input(
            "--compare needs afmt together with mplb or ano_mplb",
        ));
    }

    // fail on an unwritable output directory before any run starts
    fs::create_dir_all(&config.out_dir)?;
    let runs_csv = config.out_dir.join("runs.csv");
    let mut runs_file = fs::File::create(&runs_csv)?;

    let scenario = parse_scenario(&config.scenario_path)?;
    let mu = match config.mu {
        MuMode::Bounds => scenario.bounds_measure(),
        MuMode::MonteCarlo(samples) => {
            let mut rng = ChaCha8Rng::seed_from_u64(MEASURE_SEED);
            scenario.monte_carlo_measure(samples, &mut rng)
        }
    };
    let radius = RadiusParams::new(config.eta, mu, scenario.dimension);

    let snapshots_enabled = if config.snapshots && scenario.dimension != 2 {
        eprintln!(
            "note: snapshots are only rendered for 2-D scenarios; skipping for '{}' (d = {})",
            scenario.name, scenario.dimension
        );
        false
    } else {
        config.snapshots
    };

    let mut runs = Vec::new();
    writeln!(runs_file, "{RUNS_HEADER}")?;
    for &planner in &config.planners {
        for &seed in &config.seeds {
            let records = run_one(planner, &scenario, config, &radius, seed, snapshots_enabled)?;
            for r in &records {
                writeln!(runs_file, "{}", runs_row(planner, seed, r))?;
            }
            runs.push(SeededRun { planner, seed, records });
        }
    }
    runs_file.flush()?;

    let mut comparisons = Vec::new();
    let comparison_csv = if can_compare {
        let partner = partner.unwrap();
        let path = config.out_dir.join("comparison.csv");
        let mut file = fs::File::create(&path)?;
        writeln!(file, "{COMPARISON_HEADER}")?;
        for &seed in &config.seeds {
            let a = runs
                .iter()
                .find(|r| r.planner == Planner::Afmt && r.seed == seed)
                .expect("afmt run exists");
            let b = runs
                .iter()
                .find(|r| r.planner == partner && r.seed == seed)
                .expect("partner run exists");
            let epsilon = if partner == Planner::AnoMplb {
                config.epsilon
            } else {
                0.0
            };
            let report = compare_runs(&a.records, &b.records, epsilon)?;
            for it in &report.iterations {
                writeln!(
                    file,
                    "{},{},{},{},{},{:.6},{:.6}",
                    seed,
                    it.iteration,
                    it.lp_subset,
                    it.tree_size_leq,
                    if it.cost_ok { "pass" } else { "fail" },
                    it.lp_ratio,
                    it.nn_ratio,
                )?;
            }
            comparisons.push((seed, report));
        }
        file.flush()?;
        Some(path)
    } else {
        None
    };

    Ok(ExperimentOutput {
        runs_csv,
        comparison_csv,
        runs,
        comparisons,
    })
}
