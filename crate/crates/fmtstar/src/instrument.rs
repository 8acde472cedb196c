//! Primitive-call accounting and paired-run comparison.
//!
//! Planners count nearest-neighbor (NN) and local-planning (LP) calls per
//! iteration. An NN call is charged once per node whose neighbor list is
//! materialized; an LP call is charged only for a genuine segment test —
//! cache hits add neither calls nor edge-set entries. `compare_runs` turns
//! the comparative guarantees between the anytime planners (LP-edge-set
//! inclusion, tree-size ordering, cost relation) into per-iteration verdicts.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use indexmap::IndexSet;

use crate::error::PlanError;

/// Absolute tolerance for cost comparisons between paired runs. Paired runs
/// share the arithmetic path, so anything beyond rounding is a bug.
pub const COST_TOLERANCE: f64 = 1e-9;

/// Normalized (unordered) node-index pair.
pub fn edge_key(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// NN/LP call counters for one planner iteration.
///
/// `lp_edges` keeps the distinct pairs in first-invocation order;
/// `lp_calls >= lp_edges.len()` because an uncached search may test the same
/// pair more than once.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CallCounters {
    pub nn_calls: u64,
    pub lp_calls: u64,
    pub lp_edges: IndexSet<(usize, usize)>,
}

impl CallCounters {
    pub fn new() -> Self {
        Self::default()
    }

    /// One neighbor-list materialization.
    pub fn record_nn(&mut self) {
        self.nn_calls += 1;
    }

    /// A batched table build materializes every list at once.
    pub fn record_nn_batch(&mut self, nodes: u64) {
        self.nn_calls += nodes;
    }

    /// A genuine local-planner invocation on the segment between nodes
    /// `i` and `j`.
    pub fn record_lp(&mut self, i: usize, j: usize) {
        self.lp_calls += 1;
        self.lp_edges.insert(edge_key(i, j));
    }
}

/// Which planner produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Planner {
    Fmt,
    Afmt,
    Mplb,
    AnoMplb,
    LbtFmt,
}

impl Planner {
    pub fn as_str(&self) -> &'static str {
        match self {
            Planner::Fmt => "fmt",
            Planner::Afmt => "afmt",
            Planner::Mplb => "mplb",
            Planner::AnoMplb => "ano_mplb",
            Planner::LbtFmt => "lbt_fmt",
        }
    }
}

impl fmt::Display for Planner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Planner {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fmt" => Ok(Planner::Fmt),
            "afmt" => Ok(Planner::Afmt),
            "mplb" => Ok(Planner::Mplb),
            "ano_mplb" => Ok(Planner::AnoMplb),
            "lbt_fmt" => Ok(Planner::LbtFmt),
            other => Err(PlanError::invalid_input(format!(
                "unknown planner '{other}' (expected fmt|afmt|mplb|ano_mplb|lbt_fmt)"
            ))),
        }
    }
}

/// One iteration of one planner run.
///
/// `cost` is the best solution cost found by this iteration or any earlier
/// one (infinite until the first path is found). `preproc_size` and
/// `discarded` stay zero for planners without a preprocessing phase.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub planner: Planner,
    pub iteration: usize,
    pub n: usize,
    pub cost: f64,
    pub wall_time: Duration,
    pub counters: CallCounters,
    pub tree_size: usize,
    pub preproc_size: usize,
    pub discarded: u64,
    pub epsilon: f64,
}

/// Per-iteration verdicts for a paired comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationComparison {
    pub iteration: usize,
    /// Is every pair the second run checked this iteration one the first
    /// run has checked by this iteration? The first run's set is cumulative
    /// because a planner never re-checks a pair its cache already holds, so
    /// an edge it needed in an earlier iteration shows up only there.
    pub lp_subset: bool,
    /// Is the second run's search tree no larger?
    pub tree_size_leq: bool,
    pub cost_ok: bool,
    pub cost_a: f64,
    pub cost_b: f64,
    pub nn_a: u64,
    pub nn_b: u64,
    pub lp_ratio: f64,
    pub nn_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub iterations: Vec<IterationComparison>,
}

impl ComparisonReport {
    pub fn all_pass(&self) -> bool {
        self.iterations
            .iter()
            .all(|it| it.lp_subset && it.tree_size_leq && it.cost_ok)
    }
}

fn ratio(numerator: u64, denominator: u64) -> f64 {
    if denominator == 0 {
        if numerator == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Does the (cost_a, cost_b) pair satisfy the expected relation?
///
/// With `epsilon == 0` the costs must agree to [`COST_TOLERANCE`]; with
/// `epsilon > 0` they must satisfy `cost_a <= cost_b <= (1+eps)*cost_a`,
/// again with tolerance on the upper bound.
pub fn cost_relation_holds(cost_a: f64, cost_b: f64, epsilon: f64) -> bool {
    if cost_a.is_infinite() && cost_b.is_infinite() {
        return true;
    }
    if epsilon == 0.0 {
        (cost_b - cost_a).abs() <= COST_TOLERANCE
    } else {
        cost_a <= cost_b + COST_TOLERANCE && cost_b <= (1.0 + epsilon) * cost_a + COST_TOLERANCE
    }
}

/// Compare an aFMT* run (`a`) with a paired lower-bound-guided run (`b`).
///
/// Both runs must come from the same scenario, seed and iteration schedule;
/// this is checked indirectly through planner kinds and per-iteration node
/// counts. `epsilon` is the approximation factor of run `b` (0 for the plain
/// variant).
pub fn compare_runs(
    a: &[RunRecord],
    b: &[RunRecord],
    epsilon: f64,
) -> Result<ComparisonReport, PlanError> {
    if a.is_empty() || a.len() != b.len() {
        return Err(PlanError::invalid_input(format!(
            "paired runs must have the same nonzero iteration count (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().any(|r| r.planner != Planner::Afmt) {
        return Err(PlanError::invalid_input("first run must be produced by afmt"));
    }
    if b.iter()
        .any(|r| r.planner != Planner::Mplb && r.planner != Planner::AnoMplb)
    {
        return Err(PlanError::invalid_input(
            "second run must be produced by mplb or ano_mplb",
        ));
    }
    let mut iterations = Vec::with_capacity(a.len());
    let mut a_checked: IndexSet<(usize, usize)> = IndexSet::new();
    for (ra, rb) in a.iter().zip(b) {
        if ra.iteration != rb.iteration || ra.n != rb.n {
            return Err(PlanError::invalid_input(format!(
                "iteration mismatch: ({}, n={}) vs ({}, n={}) — runs do not share a sample sequence",
                ra.iteration, ra.n, rb.iteration, rb.n
            )));
        }
        a_checked.extend(ra.counters.lp_edges.iter().copied());
        iterations.push(IterationComparison {
            iteration: ra.iteration,
            lp_subset: rb.counters.lp_edges.is_subset(&a_checked),
            tree_size_leq: rb.tree_size <= ra.tree_size,
            cost_ok: cost_relation_holds(ra.cost, rb.cost, epsilon),
            cost_a: ra.cost,
            cost_b: rb.cost,
            nn_a: ra.counters.nn_calls,
            nn_b: rb.counters.nn_calls,
            lp_ratio: ratio(rb.counters.lp_calls, ra.counters.lp_calls),
            nn_ratio: ratio(rb.counters.nn_calls, ra.counters.nn_calls),
        });
    }
    Ok(ComparisonReport { iterations })
}
