//! Cost-bounded multi-source Dijkstra over the disk graph.
//!
//! No collision checks happen here: distances over the unchecked disk graph
//! are lower bounds on distances over any collision-filtered subgraph, which
//! is what makes them usable as admissible cost-to-go estimates.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::cspace::{Configuration, Scenario};
use crate::error::PlanError;
use crate::instrument::CallCounters;
use crate::neighbors::NeighborAccess;

/// Min-heap entry ordered by cost, ties broken by lower node index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct QueueEntry {
    pub cost: f64,
    pub node: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed so BinaryHeap pops the smallest cost first
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of a bounded traversal.
///
/// `traversed` lists the nodes settled with label <= cutoff, in settle order;
/// exactly those nodes carry a finite entry in `distances`. Nodes that were
/// relaxed but never settled within the cutoff report infinity, since their
/// labels are not final.
#[derive(Debug, Clone, PartialEq)]
pub struct DijkstraResult {
    pub distances: Vec<f64>,
    pub traversed: Vec<usize>,
}

impl DijkstraResult {
    pub fn traversed_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &u in &self.traversed {
            mask[u] = true;
        }
        mask
    }
}

/// Label-setting shortest paths from several seeded sources, stopping once
/// the smallest open label exceeds `cutoff` (ties at the cutoff are settled).
pub fn bounded_dijkstra<P: NeighborAccess>(
    graph: &mut P,
    sources: &[(usize, f64)],
    cutoff: f64,
    counters: &mut CallCounters,
) -> Result<DijkstraResult, PlanError> {
    let n = graph.node_count();
    if !(cutoff >= 0.0) {
        return Err(PlanError::invalid_input("dijkstra cutoff must be >= 0 or infinite"));
    }
    let mut label = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(idx, cost) in sources {
        if idx >= n {
            return Err(PlanError::invalid_input(format!(
                "dijkstra source index {idx} out of range (n = {n})"
            )));
        }
        if !(cost >= 0.0) || cost.is_nan() {
            return Err(PlanError::invalid_input("dijkstra initial costs must be >= 0"));
        }
        if cost < label[idx] {
            label[idx] = cost;
            heap.push(QueueEntry { cost, node: idx });
        }
    }

    let mut traversed = Vec::new();
    while let Some(QueueEntry { cost, node }) = heap.pop() {
        if settled[node] || cost > label[node] {
            continue;
        }
        if cost > cutoff {
            break;
        }
        settled[node] = true;
        traversed.push(node);
        graph.for_each_neighbor(node, counters, |next, weight| {
            let candidate = cost + weight;
            if !settled[next] && candidate < label[next] {
                label[next] = candidate;
                heap.push(QueueEntry {
                    cost: candidate,
                    node: next,
                });
            }
        });
    }

    let mut distances = vec![f64::INFINITY; n];
    for &u in &traversed {
        distances[u] = label[u];
    }
    Ok(DijkstraResult { distances, traversed })
}

/// Every sampled node inside the goal region, seeded at cost zero.
pub fn goal_sources(scenario: &Scenario, points: &[Configuration]) -> Vec<(usize, f64)> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| scenario.in_goal(p))
        .map(|(i, _)| (i, 0.0))
        .collect()
}
