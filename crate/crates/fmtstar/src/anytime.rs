//! Anytime planning by sample doubling, with sample and local-planner reuse
//! across iterations.
//!
//! A [`SampleSequence`] materializes a growing prefix of one fixed random
//! sequence of collision-free samples, so iteration i always works on a
//! superset of iteration i-1's nodes and node indices stay stable. An
//! [`EdgeCache`] keeps local-planner verdicts keyed by unordered index
//! pairs; verdicts are geometric facts about segments, so they never go
//! stale when the connection radius shrinks.

use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cspace::{Configuration, Scenario};
use crate::error::PlanError;
use crate::instrument::{edge_key, CallCounters, Planner, RunRecord};
use crate::neighbors::{connection_radius, NeighborTable, RadiusParams};
use crate::search::{search, Heuristic, PathResult, SearchTree};

/// Cached local-planner verdicts: free or blocked per unordered node pair.
/// Absent pairs are unknown.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeCache {
    entries: HashMap<(usize, usize), bool>,
}

impl EdgeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, i: usize, j: usize) -> Option<bool> {
        self.entries.get(&edge_key(i, j)).copied()
    }

    pub fn store(&mut self, i: usize, j: usize, free: bool) {
        self.entries.insert(edge_key(i, j), free);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &bool)> {
        self.entries.iter()
    }
}

/// A growing prefix of one fixed random sequence of collision-free samples.
///
/// Index 0 is the start configuration and index 1 the goal center, so the
/// goal region always contains at least one node; sampled entries follow.
/// Extending the prefix never mutates existing entries.
#[derive(Debug, Clone)]
pub struct SampleSequence {
    seed: u64,
    rng: ChaCha8Rng,
    points: Vec<Configuration>,
}

impl SampleSequence {
    pub fn new(scenario: &Scenario, seed: u64) -> Result<Self, PlanError> {
        scenario.validate()?;
        Ok(SampleSequence {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            points: vec![scenario.x_init.clone(), scenario.goal.center.clone()],
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of sampled entries (the two fixed entries are not counted).
    pub fn sample_count(&self) -> usize {
        self.points.len() - 2
    }

    /// Grow the materialized prefix until it holds `target` samples.
    pub fn extend_to(&mut self, scenario: &Scenario, target: usize) -> Result<(), PlanError> {
        let current = self.sample_count();
        if target < current {
            return Err(PlanError::invalid_input(format!(
                "cannot shrink a sample sequence ({current} -> {target})"
            )));
        }
        if target > current {
            let fresh = scenario.sample_free(target - current, &mut self.rng)?;
            self.points.extend(fresh);
        }
        Ok(())
    }

    /// The node set for a run with `samples` sampled entries: start, goal
    /// center, then the first `samples` sequence entries.
    pub fn prefix(&self, samples: usize) -> &[Configuration] {
        &self.points[..samples + 2]
    }

    pub fn points(&self) -> &[Configuration] {
        &self.points
    }
}

/// Per-iteration view handed to run observers (used for snapshots and for
/// tests that need more than the [`RunRecord`]).
pub struct AnytimeIteration<'a> {
    pub iteration: usize,
    pub points: &'a [Configuration],
    pub tree: &'a SearchTree,
    pub path: &'a PathResult,
    pub record: &'a RunRecord,
}

/// Anytime fast-marching planner: iteration i searches the first
/// `n0 * 2^(i-1)` samples with the zero heuristic and no cost ceiling,
/// reusing samples and cached local-planner verdicts across iterations.
pub fn afmt(
    scenario: &Scenario,
    n0: usize,
    iterations: usize,
    params: &RadiusParams,
    seed: u64,
) -> Result<Vec<RunRecord>, PlanError> {
    afmt_observed(scenario, n0, iterations, params, seed, |_| {})
}

/// [`afmt`] with an observer invoked after every iteration.
pub fn afmt_observed(
    scenario: &Scenario,
    n0: usize,
    iterations: usize,
    params: &RadiusParams,
    seed: u64,
    mut observe: impl FnMut(AnytimeIteration<'_>),
) -> Result<Vec<RunRecord>, PlanError> {
    if n0 < 1 || iterations < 1 {
        return Err(PlanError::invalid_input("afmt requires n0 >= 1 and iterations >= 1"));
    }
    let mut seq = SampleSequence::new(scenario, seed)?;
    let mut cache = EdgeCache::new();
    let mut best_cost = f64::INFINITY;
    let mut records = Vec::with_capacity(iterations);

    for iteration in 1..=iterations {
        let samples = n0 << (iteration - 1);
        seq.extend_to(scenario, samples)?;
        let points = seq.prefix(samples);
        let total = points.len();
        let radius = connection_radius(total, params)?;

        let start = Instant::now();
        let mut counters = CallCounters::new();
        let mut table = NeighborTable::build_counted(points, radius, &mut counters)?;
        let outcome = search(
            scenario,
            points,
            &mut table,
            &Heuristic::Zero,
            f64::INFINITY,
            Some(&mut cache),
            &mut counters,
        )?;
        let wall_time = start.elapsed();

        if let PathResult::Path { cost, .. } = outcome.path {
            best_cost = best_cost.min(cost);
        }
        let record = RunRecord {
            planner: Planner::Afmt,
            iteration,
            n: total,
            cost: best_cost,
            wall_time,
            counters,
            tree_size: outcome.tree.size(),
            preproc_size: 0,
            discarded: outcome.discarded,
            epsilon: 0.0,
        };
        observe(AnytimeIteration {
            iteration,
            points,
            tree: &outcome.tree,
            path: &outcome.path,
            record: &record,
        });
        records.push(record);
    }
    Ok(records)
}
