//! Anytime planning guided by cost-to-go lower bounds.
//!
//! Each iteration first runs a preprocessing phase that is pure graph work
//! (NN calls only, never a local-planner call): two half-budget traversals
//! collect every node that could possibly lie on a solution cheaper than the
//! incumbent, and a final traversal over that node set computes goal
//! distances on the unchecked disk graph. Those distances are lower bounds
//! on the true cost-to-go, so the searching phase can use them both to order
//! expansions (f = cost-to-come + estimate) and to stop the iteration as
//! soon as the incumbent provably cannot be improved.
//!
//! With an approximation factor epsilon > 0 the incumbent cost is replaced
//! by incumbent/(1+epsilon) in both phases, trading bounded suboptimality
//! for earlier cutoffs.

use std::time::Instant;

use crate::cspace::{Configuration, Scenario};
use crate::error::PlanError;
use crate::instrument::{CallCounters, Planner, RunRecord};
use crate::neighbors::{
    connection_radius, LazyNeighborTable, RadiusParams, RestrictedNeighbors,
};
use crate::anytime::{EdgeCache, SampleSequence};
use crate::roadmap::{bounded_dijkstra, goal_sources};
use crate::search::{search, Heuristic, PathResult, SearchTree};

/// Per-node cost-to-go lower bounds from the preprocessing phase.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundField {
    /// Goal distance over the disk graph restricted to the preprocessing
    /// set; infinite for every node outside it or beyond the budget.
    pub cost_to_go: Vec<f64>,
    /// Membership mask of the preprocessing set.
    pub preproc: Vec<bool>,
    pub preproc_size: usize,
}

/// Can a node with these cost labels still improve on `c_prev`?
/// The inequality is strict: matching the incumbent is not an improvement.
pub fn is_promising(cost_to_come: f64, cost_to_go: f64, c_prev: f64) -> bool {
    cost_to_come + cost_to_go < c_prev
}

/// Radius used for the restricted final traversal of the preprocessing
/// phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestrictedRadius {
    /// Keep the iteration radius r(|V|) on the restricted node set. This is
    /// the default: the estimates stay lower bounds and no node pair that
    /// the searching phase may connect is missing from the restricted graph.
    #[default]
    IterationCount,
    /// Recompute the radius from the restricted set size, r(|V_preproc|).
    /// Since the radius shrinks with n, the smaller set gets a larger
    /// radius, which weakens the estimates but keeps them lower bounds.
    PreprocCount,
}

/// Preprocessing phase: collect the candidate node set and compute
/// cost-to-go lower bounds, using NN calls only.
///
/// Traversal 1 walks the disk graph from the start node and traversal 2
/// from the goal nodes, both cut off at `budget / 2`; only nodes reached by
/// one of them can be part of a solution cheaper than `budget`. The final
/// traversal computes goal distances on the graph restricted to that set,
/// cut off at `budget`.
pub fn estimate_cost_to_go(
    scenario: &Scenario,
    points: &[Configuration],
    graph: &mut LazyNeighborTable<'_>,
    budget: f64,
    counters: &mut CallCounters,
) -> Result<LowerBoundField, PlanError> {
    estimate_cost_to_go_with(
        scenario,
        points,
        graph,
        budget,
        RestrictedRadius::IterationCount,
        None,
        counters,
    )
}

/// [`estimate_cost_to_go`] with an explicit restricted-radius mode.
/// `radius_params` is only needed for [`RestrictedRadius::PreprocCount`].
pub fn estimate_cost_to_go_with(
    scenario: &Scenario,
    points: &[Configuration],
    graph: &mut LazyNeighborTable<'_>,
    budget: f64,
    restricted_radius: RestrictedRadius,
    radius_params: Option<&RadiusParams>,
    counters: &mut CallCounters,
) -> Result<LowerBoundField, PlanError> {
    let n = points.len();
    let half = budget / 2.0;
    let from_init = bounded_dijkstra(graph, &[(0, 0.0)], half, counters)?;
    let sources = goal_sources(scenario, points);
    let from_goal = bounded_dijkstra(graph, &sources, half, counters)?;

    let mut preproc = vec![false; n];
    for &u in from_init.traversed.iter().chain(&from_goal.traversed) {
        preproc[u] = true;
    }
    let preproc_size = preproc.iter().filter(|&&m| m).count();

    let cost_to_go = match restricted_radius {
        RestrictedRadius::IterationCount => {
            let mut restricted = RestrictedNeighbors::new(graph, &preproc);
            bounded_dijkstra(&mut restricted, &sources, budget, counters)?
                .distances
        }
        RestrictedRadius::PreprocCount => {
            let params = radius_params.ok_or_else(|| {
                PlanError::invalid_input("PreprocCount radius mode needs radius params")
            })?;
            let radius = connection_radius(preproc_size.max(2), params)?;
            let mut rebuilt = LazyNeighborTable::new(points, radius)?;
            let mut restricted = RestrictedNeighbors::new(&mut rebuilt, &preproc);
            bounded_dijkstra(&mut restricted, &sources, budget, counters)?
                .distances
        }
    };

    Ok(LowerBoundField {
        cost_to_go,
        preproc,
        preproc_size,
    })
}

/// Parameters of a lower-bound-guided anytime run.
#[derive(Debug, Clone, PartialEq)]
pub struct MplbParams {
    pub n0: usize,
    pub iterations: usize,
    /// Approximation factor; 0 keeps the solution quality of the unguided
    /// planner, epsilon > 0 allows a (1+epsilon) factor per iteration.
    pub epsilon: f64,
    pub radius: RadiusParams,
    pub seed: u64,
    pub restricted_radius: RestrictedRadius,
}

impl MplbParams {
    pub fn new(n0: usize, iterations: usize, epsilon: f64, radius: RadiusParams, seed: u64) -> Self {
        MplbParams {
            n0,
            iterations,
            epsilon,
            radius,
            seed,
            restricted_radius: RestrictedRadius::IterationCount,
        }
    }

    fn validate(&self) -> Result<(), PlanError> {
        if self.n0 < 1 || self.iterations < 1 {
            return Err(PlanError::invalid_input("mplb requires n0 >= 1 and iterations >= 1"));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(PlanError::invalid_input("mplb epsilon must be finite and >= 0"));
        }
        self.radius.validate()
    }

    fn planner(&self) -> Planner {
        if self.epsilon > 0.0 {
            Planner::AnoMplb
        } else {
            Planner::Mplb
        }
    }
}

/// Per-iteration view handed to observers.
pub struct MplbIteration<'a> {
    pub iteration: usize,
    pub points: &'a [Configuration],
    pub tree: &'a SearchTree,
    pub path: &'a PathResult,
    pub lower_bounds: &'a LowerBoundField,
    /// Cost budget of this iteration: incumbent / (1 + epsilon).
    pub budget: f64,
    pub record: &'a RunRecord,
}

/// Lower-bound-guided anytime planner over the same sample-doubling
/// schedule and edge cache reuse as [`crate::anytime::afmt`].
pub fn mplb(scenario: &Scenario, params: &MplbParams) -> Result<Vec<RunRecord>, PlanError> {
    mplb_observed(scenario, params, |_| {})
}

/// [`mplb`] with an observer invoked after every iteration.
pub fn mplb_observed(
    scenario: &Scenario,
    params: &MplbParams,
    mut observe: impl FnMut(MplbIteration<'_>),
) -> Result<Vec<RunRecord>, PlanError> {
    params.validate()?;
    let mut seq = SampleSequence::new(scenario, params.seed)?;
    let mut cache = EdgeCache::new();
    let mut incumbent = f64::INFINITY;
    let mut records = Vec::with_capacity(params.iterations);

    for iteration in 1..=params.iterations {
        let samples = params.n0 << (iteration - 1);
        seq.extend_to(scenario, samples)?;
        let points = seq.prefix(samples);
        let total = points.len();
        let radius = connection_radius(total, &params.radius)?;
        let budget = incumbent / (1.0 + params.epsilon);

        let start = Instant::now();
        let mut counters = CallCounters::new();
        let mut graph = LazyNeighborTable::new(points, radius)?;
        let lower_bounds = estimate_cost_to_go_with(
            scenario,
            points,
            &mut graph,
            budget,
            params.restricted_radius,
            Some(&params.radius),
            &mut counters,
        )?;
        debug_assert_eq!(counters.lp_calls, 0, "preprocessing must not call the local planner");

        let outcome = search(
            scenario,
            points,
            &mut graph,
            &Heuristic::Table(&lower_bounds.cost_to_go),
            budget,
            Some(&mut cache),
            &mut counters,
        )?;
        let wall_time = start.elapsed();

        // a successful search beat the ceiling, so it strictly improves;
        // on failure the previous solution and incumbent are retained
        if let PathResult::Path { cost, .. } = outcome.path {
            incumbent = incumbent.min(cost);
        }
        let record = RunRecord {
            planner: params.planner(),
            iteration,
            n: total,
            cost: incumbent,
            wall_time,
            counters,
            tree_size: outcome.tree.size(),
            preproc_size: lower_bounds.preproc_size,
            discarded: outcome.discarded,
            epsilon: params.epsilon,
        };
        observe(MplbIteration {
            iteration,
            points,
            tree: &outcome.tree,
            path: &outcome.path,
            lower_bounds: &lower_bounds,
            budget,
            record: &record,
        });
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anytime::afmt;
    use crate::cspace::{Bounds, GoalRegion, Obstacle};
    use crate::instrument::{compare_runs, CallCounters};
    use crate::neighbors::NeighborTable;

    fn chain_scenario() -> Scenario {
        Scenario {
            name: "chain".into(),
            dimension: 2,
            bounds: Bounds {
                lo: vec![-1.0, -1.0].into(),
                hi: vec![6.0, 6.0].into(),
            },
            obstacles: vec![],
            x_init: vec![0.0, 0.0].into(),
            goal: GoalRegion {
                center: vec![1.0, 0.0].into(),
                radius: 0.01,
            },
        }
    }

    fn chain_points() -> Vec<Configuration> {
        vec![
            vec![0.0, 0.0].into(),
            vec![0.5, 0.0].into(),
            vec![1.0, 0.0].into(),
        ]
    }

    #[test]
    fn estimate_on_a_chain() {
        let s = chain_scenario();
        let pts = chain_points();
        let mut graph = LazyNeighborTable::new(&pts, 0.6).unwrap();
        let mut counters = CallCounters::new();
        let field = estimate_cost_to_go(&s, &pts, &mut graph, 1.2, &mut counters).unwrap();
        assert_eq!(field.preproc, vec![true, true, true]);
        assert_eq!(field.preproc_size, 3);
        assert!((field.cost_to_go[2] - 0.0).abs() < 1e-15);
        assert!((field.cost_to_go[1] - 0.5).abs() < 1e-15);
        assert!((field.cost_to_go[0] - 1.0).abs() < 1e-15);
        assert_eq!(counters.lp_calls, 0);
    }

    #[test]
    fn isolated_nodes_get_infinite_estimates() {
        let s = chain_scenario();
        let mut pts = chain_points();
        pts.push(vec![5.0, 5.0].into());
        let mut graph = LazyNeighborTable::new(&pts, 0.6).unwrap();
        let mut counters = CallCounters::new();
        let field = estimate_cost_to_go(&s, &pts, &mut graph, 1.2, &mut counters).unwrap();
        assert!(!field.preproc[3]);
        assert!(field.cost_to_go[3].is_infinite());
    }

    #[test]
    fn unbounded_estimate_equals_plain_goal_distances() {
        let s = chain_scenario();
        let pts = chain_points();
        let mut graph = LazyNeighborTable::new(&pts, 0.6).unwrap();
        let mut counters = CallCounters::new();
        let field =
            estimate_cost_to_go(&s, &pts, &mut graph, f64::INFINITY, &mut counters).unwrap();

        let mut table = NeighborTable::build(&pts, 0.6).unwrap();
        let sources = goal_sources(&s, &pts);
        let plain =
            bounded_dijkstra(&mut table, &sources, f64::INFINITY, &mut counters).unwrap();
        assert_eq!(field.cost_to_go, plain.distances);
    }

    #[test]
    fn promising_test_is_strict() {
        assert!(is_promising(0.3, 0.3, f64::INFINITY));
        assert!(!is_promising(0.6, 0.7, 1.2));
        assert!(!is_promising(0.5, 0.7, 1.2), "equality is not promising");
        assert!(is_promising(0.5, 0.6999, 1.2));
    }

    fn room() -> Scenario {
        Scenario {
            name: "room".into(),
            dimension: 2,
            bounds: Bounds {
                lo: vec![0.0, 0.0].into(),
                hi: vec![1.0, 1.0].into(),
            },
            obstacles: vec![Obstacle::Box {
                lo: vec![0.08, 0.35].into(),
                hi: vec![0.6, 0.65].into(),
            }],
            x_init: vec![0.04, 0.9].into(),
            goal: GoalRegion {
                center: vec![0.04, 0.1].into(),
                radius: 0.05,
            },
        }
    }

    #[test]
    fn matches_unguided_costs_at_epsilon_zero() {
        let s = room();
        let radius = RadiusParams::new(0.01, 1.0, 2);
        let a = afmt(&s, 50, 3, &radius, 0).unwrap();
        let b = mplb(&s, &MplbParams::new(50, 3, 0.0, radius.clone(), 0)).unwrap();
        let report = compare_runs(&a, &b, 0.0).unwrap();
        assert!(report.all_pass(), "report: {:#?}", report.iterations);
    }

    #[test]
    fn approximate_runs_stay_inside_the_sandwich() {
        let s = room();
        let radius = RadiusParams::new(0.01, 1.0, 2);
        let exact = mplb(&s, &MplbParams::new(50, 3, 0.0, radius.clone(), 1)).unwrap();
        let approx = mplb(&s, &MplbParams::new(50, 3, 0.2, radius.clone(), 1)).unwrap();
        assert_eq!(approx[0].planner, Planner::AnoMplb);
        for (e, a) in exact.iter().zip(&approx) {
            if e.cost.is_infinite() {
                assert!(a.cost.is_infinite());
            } else {
                assert!(e.cost <= a.cost + 1e-9);
                assert!(a.cost <= 1.2 * e.cost + 1e-9);
            }
        }
    }

    #[test]
    fn nn_calls_equal_the_preprocessing_set_size() {
        let s = room();
        let radius = RadiusParams::new(0.01, 1.0, 2);
        let records = mplb(&s, &MplbParams::new(50, 4, 0.0, radius, 2)).unwrap();
        for r in &records {
            assert_eq!(r.counters.nn_calls, r.preproc_size as u64, "iteration {}", r.iteration);
        }
    }

    #[test]
    fn promising_nodes_are_inside_the_preprocessing_set() {
        // ground truth on a small instance: collision-check every disk-graph
        // edge, then compare against the candidate set of the next iteration
        let s = room();
        let radius_params = RadiusParams::new(0.01, 1.0, 2);
        let params = MplbParams::new(60, 2, 0.0, radius_params, 4);
        let mut incumbents = Vec::new();
        let mut views: Vec<(usize, Vec<bool>, Vec<Configuration>)> = Vec::new();
        let records = mplb_observed(&s, &params, |it| {
            views.push((it.iteration, it.lower_bounds.preproc.clone(), it.points.to_vec()));
            incumbents.push(it.record.cost);
        })
        .unwrap();
        assert_eq!(records.len(), 2);
        let c_prev = incumbents[0];
        assert!(c_prev.is_finite(), "iteration 1 should already find a path");

        // iteration 2 state
        let (_, preproc, points) = &views[1];
        let radius = connection_radius(points.len(), &params.radius).unwrap();
        let mut table = NeighborTable::build(points, radius).unwrap();
        // collision-checked adjacency
        let mut checked = vec![Vec::new(); points.len()];
        for (i, list) in table.adjacency.clone().iter().enumerate() {
            for &(j, d) in list {
                if s.collision_free(&points[i], &points[j]).unwrap() {
                    checked[i].push((j, d));
                }
            }
        }
        let mut scratch = CallCounters::new();
        let g_sources = goal_sources(&s, points);
        struct Explicit(Vec<Vec<(usize, f64)>>);
        impl crate::neighbors::NeighborAccess for Explicit {
            fn node_count(&self) -> usize {
                self.0.len()
            }
            fn for_each_neighbor(
                &mut self,
                node: usize,
                _c: &mut CallCounters,
                mut visit: impl FnMut(usize, f64),
            ) {
                for &(j, d) in &self.0[node] {
                    visit(j, d);
                }
            }
        }
        let mut checked_graph = Explicit(checked);
        let come =
            bounded_dijkstra(&mut checked_graph, &[(0, 0.0)], f64::INFINITY, &mut scratch).unwrap();
        let go =
            bounded_dijkstra(&mut checked_graph, &g_sources, f64::INFINITY, &mut scratch).unwrap();
        let _ = &mut table;
        let mut promising_count = 0;
        for v in 0..points.len() {
            if is_promising(come.distances[v], go.distances[v], c_prev) {
                promising_count += 1;
                assert!(preproc[v], "promising node {v} missing from the candidate set");
            }
        }
        assert!(promising_count > 0, "test instance should have promising nodes");
    }

    #[test]
    fn restricted_radius_variant_still_lower_bounds() {
        let s = room();
        let radius_params = RadiusParams::new(0.01, 1.0, 2);
        let mut seq = SampleSequence::new(&s, 9).unwrap();
        seq.extend_to(&s, 80).unwrap();
        let points = seq.prefix(80).to_vec();
        let radius = connection_radius(points.len(), &radius_params).unwrap();

        let mut counters = CallCounters::new();
        let mut graph = LazyNeighborTable::new(&points, radius).unwrap();
        let printed = estimate_cost_to_go_with(
            &s,
            &points,
            &mut graph,
            1.5,
            RestrictedRadius::PreprocCount,
            Some(&radius_params),
            &mut counters,
        )
        .unwrap();

        // oracle: true goal distances over the collision-checked graph
        let mut table = NeighborTable::build(&points, radius).unwrap();
        let mut checked = vec![Vec::new(); points.len()];
        for (i, list) in table.adjacency.clone().iter().enumerate() {
            for &(j, d) in list {
                if s.collision_free(&points[i], &points[j]).unwrap() {
                    checked[i].push((j, d));
                }
            }
        }
        let _ = &mut table;
        struct Explicit(Vec<Vec<(usize, f64)>>);
        impl crate::neighbors::NeighborAccess for Explicit {
            fn node_count(&self) -> usize {
                self.0.len()
            }
            fn for_each_neighbor(
                &mut self,
                node: usize,
                _c: &mut CallCounters,
                mut visit: impl FnMut(usize, f64),
            ) {
                for &(j, d) in &self.0[node] {
                    visit(j, d);
                }
            }
        }
        let mut checked_graph = Explicit(checked);
        let sources = goal_sources(&s, &points);
        let truth =
            bounded_dijkstra(&mut checked_graph, &sources, f64::INFINITY, &mut counters).unwrap();
        for v in 0..points.len() {
            if printed.cost_to_go[v].is_finite() && truth.distances[v].is_finite() {
                assert!(printed.cost_to_go[v] <= truth.distances[v] + 1e-12);
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let s = room();
        let radius = RadiusParams::new(0.01, 1.0, 2);
        let params = MplbParams::new(50, 3, 0.0, radius, 17);
        let a = mplb(&s, &params).unwrap();
        let b = mplb(&s, &params).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.cost.to_bits(), rb.cost.to_bits());
            assert_eq!(ra.counters, rb.counters);
            assert_eq!(ra.preproc_size, rb.preproc_size);
        }
    }
}
