//! Dual-tree near-optimal planning: grow a lower-bound tree and an
//! approximation tree over the same nodes in one pass.
//!
//! The lower-bound tree attaches each candidate to its best expanded
//! neighbor; the connecting segment is only checked when no shortcut
//! applies, so lower-bound costs never exceed what the plain fast-marching
//! search would compute on the same node set. The approximation tree only
//! uses segments known to be free. When a candidate has a cache-known-free
//! edge whose approximation cost is within (1+eps) of the lower-bound
//! candidate, both parents are adopted with no new local-planner call;
//! otherwise one genuine check on the lower-bound edge decides the
//! insertion, and its verdict lands in the cache.
//!
//! Attempts are deferred to lower-bound-value order, matching the schedule
//! of [`crate::search::search`], so a run with an empty cache performs the
//! plain search's local-planning calls exactly.
//!
//! Maintained per node: apx cost <= (1+eps) * lb cost, and lb cost <= the
//! cost the plain search assigns the node. Returned paths are read from the
//! approximation tree, so every reported edge is verified.

use std::collections::BinaryHeap;
use std::time::Instant;

use crate::anytime::{EdgeCache, SampleSequence};
use crate::cspace::{Configuration, Scenario};
use crate::error::PlanError;
use crate::instrument::{CallCounters, Planner, RunRecord};
use crate::neighbors::{connection_radius, NeighborAccess, NeighborTable, RadiusParams};
use crate::search::{edge_free, FailureReason, NodeState, PathResult, Proposal, SearchTree};

/// The two trees grown by [`lbt_fmt`]. Node membership is identical in both
/// at every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct DualTree {
    /// Optimistic tree: parent edges may be unverified.
    pub lb: SearchTree,
    /// Conservative tree: every parent edge passed a collision check.
    pub apx: SearchTree,
    pub epsilon: f64,
}

impl DualTree {
    pub fn len(&self) -> usize {
        self.lb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lb.is_empty()
    }
}

/// Which invariant a node violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Node present in one tree but not the other.
    Membership,
    /// apx cost exceeds (1+eps) * lb cost.
    BoundedApprox,
    /// lb cost exceeds the plain-search cost on the same node set.
    LowerBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualViolation {
    pub node: usize,
    pub kind: ViolationKind,
    pub lhs: f64,
    pub rhs: f64,
}

const INVARIANT_TOLERANCE: f64 = 1e-9;

/// Check both per-node invariants against a paired plain-search run on the
/// identical node set. `fmt_costs` are that run's cost-from-root labels
/// (infinite for nodes it never attached).
pub fn check_dual_invariants(
    dual: &DualTree,
    fmt_costs: &[f64],
    epsilon: f64,
) -> Result<Vec<DualViolation>, PlanError> {
    if fmt_costs.len() != dual.lb.len() || dual.apx.len() != dual.lb.len() {
        return Err(PlanError::invalid_input(
            "node sets of the dual tree and the oracle run do not match",
        ));
    }
    let mut violations = Vec::new();
    for node in 0..dual.lb.len() {
        let lb = dual.lb.cost_from_root[node];
        let apx = dual.apx.cost_from_root[node];
        if lb.is_finite() != apx.is_finite() {
            violations.push(DualViolation {
                node,
                kind: ViolationKind::Membership,
                lhs: lb,
                rhs: apx,
            });
            continue;
        }
        if !lb.is_finite() {
            continue;
        }
        if apx > (1.0 + epsilon) * lb + INVARIANT_TOLERANCE {
            violations.push(DualViolation {
                node,
                kind: ViolationKind::BoundedApprox,
                lhs: apx,
                rhs: (1.0 + epsilon) * lb,
            });
        }
        if fmt_costs[node].is_finite() && lb > fmt_costs[node] + INVARIANT_TOLERANCE {
            violations.push(DualViolation {
                node,
                kind: ViolationKind::LowerBound,
                lhs: lb,
                rhs: fmt_costs[node],
            });
        }
    }
    Ok(violations)
}

/// Grow both trees over `points` (start node at index 0). The open set is
/// ordered by lower-bound cost; the returned path lives in the
/// approximation tree.
pub fn lbt_fmt<P: NeighborAccess>(
    scenario: &Scenario,
    points: &[Configuration],
    graph: &mut P,
    epsilon: f64,
    cache: &mut EdgeCache,
    counters: &mut CallCounters,
) -> Result<(PathResult, DualTree), PlanError> {
    let n = points.len();
    if n == 0 || points[0] != scenario.x_init {
        return Err(PlanError::invalid_input(
            "lbt_fmt requires the start configuration at index 0",
        ));
    }
    if graph.node_count() != n {
        return Err(PlanError::invalid_input(
            "neighbor structure does not cover the point set",
        ));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(PlanError::invalid_input("lbt_fmt epsilon must be finite and >= 0"));
    }

    let in_goal: Vec<bool> = points.iter().map(|p| scenario.in_goal(p)).collect();
    let mut lb = SearchTree::new(n);
    let mut apx = SearchTree::new(n);
    // proposals received per node: (proposer, edge cost); proposers are
    // expanded nodes, and this list is what the cached-parent argmin scans
    let mut received: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut heap: BinaryHeap<Proposal> = BinaryHeap::new();

    let finish = |lb: SearchTree, apx: SearchTree, path| (path, DualTree { lb, apx, epsilon });

    if in_goal[0] {
        let path = PathResult::Path { nodes: vec![0], cost: 0.0 };
        return Ok(finish(lb, apx, path));
    }

    let mut z = 0usize;
    loop {
        // expand z
        lb.state[z] = NodeState::Closed;
        apx.state[z] = NodeState::Closed;
        let g_z = lb.cost_from_root[z];
        graph.for_each_neighbor(z, counters, |x, dist| {
            if lb.state[x] != NodeState::Unvisited {
                return;
            }
            let cost = g_z + dist;
            received[x].push((z, dist));
            heap.push(Proposal { f: cost, node: x, parent: z, cost });
        });

        // act on proposals in lower-bound order; the popping proposal is
        // its node's best remaining lower-bound candidate
        loop {
            let Some(p) = heap.pop() else {
                let path = PathResult::Failure(FailureReason::Exhausted);
                return Ok(finish(lb, apx, path));
            };
            if lb.state[p.node] != NodeState::Unvisited {
                continue;
            }
            let lb_cost = p.cost;

            // best expanded neighbor with a cache-known-free edge, by
            // approximation cost, lowest index on ties
            let mut best_apx: Option<(f64, usize)> = None;
            for &(y, dist) in &received[p.node] {
                if cache.lookup(y, p.node) == Some(true) {
                    let via = apx.cost_from_root[y] + dist;
                    let better = match best_apx {
                        None => true,
                        Some((b, by)) => via < b || (via == b && y < by),
                    };
                    if better {
                        best_apx = Some((via, y));
                    }
                }
            }

            let adopt =
                best_apx.map_or(false, |(apx_cost, _)| apx_cost <= (1.0 + epsilon) * lb_cost);
            let apx_choice = if adopt {
                best_apx
            } else {
                let mut cache_slot = Some(&mut *cache);
                if edge_free(scenario, points, p.parent, p.node, &mut cache_slot, counters) {
                    let dist = received[p.node]
                        .iter()
                        .find(|&&(y, _)| y == p.parent)
                        .map(|&(_, d)| d)
                        .expect("the popping proposal was received");
                    Some((apx.cost_from_root[p.parent] + dist, p.parent))
                } else {
                    None // blocked: the node's next proposal is still queued
                }
            };
            let Some((apx_cost, apx_parent)) = apx_choice else {
                continue;
            };

            lb.parent[p.node] = Some(p.parent);
            lb.cost_from_root[p.node] = lb_cost;
            apx.parent[p.node] = Some(apx_parent);
            apx.cost_from_root[p.node] = apx_cost;
            lb.state[p.node] = NodeState::Open;
            apx.state[p.node] = NodeState::Open;

            if in_goal[p.node] {
                let nodes = apx.path_to(p.node);
                let cost = apx.cost_from_root[p.node];
                let path = PathResult::Path { nodes, cost };
                return Ok(finish(lb, apx, path));
            }
            z = p.node;
            break;
        }
    }
}

/// Per-iteration view handed to observers.
pub struct LbtIteration<'a> {
    pub iteration: usize,
    pub points: &'a [Configuration],
    pub dual: &'a DualTree,
    pub path: &'a PathResult,
    pub record: &'a RunRecord,
}

/// Anytime wrapper over [`lbt_fmt`]: the sample-doubling schedule of
/// [`crate::anytime::afmt`] with the edge cache shared across iterations,
/// which is what feeds the cache-known-free adoption rule.
pub fn anytime_lbt(
    scenario: &Scenario,
    n0: usize,
    iterations: usize,
    params: &RadiusParams,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<RunRecord>, PlanError> {
    anytime_lbt_observed(scenario, n0, iterations, params, epsilon, seed, |_| {})
}

/// [`anytime_lbt`] with an observer invoked after every iteration.
pub fn anytime_lbt_observed(
    scenario: &Scenario,
    n0: usize,
    iterations: usize,
    params: &RadiusParams,
    epsilon: f64,
    seed: u64,
    mut observe: impl FnMut(LbtIteration<'_>),
) -> Result<Vec<RunRecord>, PlanError> {
    if n0 < 1 || iterations < 1 {
        return Err(PlanError::invalid_input(
            "anytime_lbt requires n0 >= 1 and iterations >= 1",
        ));
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
        let (path, dual) = lbt_fmt(scenario, points, &mut table, epsilon, &mut cache, &mut counters)?;
        let wall_time = start.elapsed();

        if let PathResult::Path { cost, .. } = path {
            best_cost = best_cost.min(cost);
        }
        let record = RunRecord {
            planner: Planner::LbtFmt,
            iteration,
            n: total,
            cost: best_cost,
            wall_time,
            counters,
            tree_size: dual.apx.size(),
            preproc_size: 0,
            discarded: 0,
            epsilon,
        };
        observe(LbtIteration {
            iteration,
            points,
            dual: &dual,
            path: &path,
            record: &record,
        });
        records.push(record);
    }
    Ok(records)
}
