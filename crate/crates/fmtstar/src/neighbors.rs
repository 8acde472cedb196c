//! Connection radius and radius nearest-neighbor queries over a fixed
//! point set (the disk graph).
//!
//! Edges connect pairs at distance strictly below the radius; ties at exactly
//! the radius are excluded. Correctness of any spatial indexing is defined by
//! the brute-force all-pairs scan, which is also what the implementations
//! below use — the node counts in this library stay small enough that an
//! O(n^2) build is far from the bottleneck.

use crate::cspace::Configuration;
use crate::error::PlanError;
use crate::instrument::CallCounters;

/// Default slack factor over the critical connection radius.
pub const DEFAULT_ETA: f64 = 0.01;

/// Volume of the unit ball in d-dimensional Euclidean space.
///
/// Uses the exact recurrence v(1) = 2, v(2) = pi, v(d) = v(d-2) * 2*pi/d.
pub fn unit_ball_volume(d: usize) -> Result<f64, PlanError> {
    if d < 1 {
        return Err(PlanError::invalid_input("unit_ball_volume requires d >= 1"));
    }
    let mut vol = if d % 2 == 1 { 2.0 } else { std::f64::consts::PI };
    let start = if d % 2 == 1 { 1 } else { 2 };
    let mut k = start;
    while k < d {
        k += 2;
        vol *= 2.0 * std::f64::consts::PI / k as f64;
    }
    Ok(vol)
}

/// Inputs of the connection-radius formula.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusParams {
    /// Slack factor, >= 0 (strictly positive preserves the optimality
    /// guarantee; 0 is allowed for numeric checks).
    pub eta: f64,
    /// Estimate of the free-space measure, > 0. Over-estimates are safe.
    pub mu: f64,
    pub dimension: usize,
}

impl RadiusParams {
    pub fn new(eta: f64, mu: f64, dimension: usize) -> Self {
        RadiusParams { eta, mu, dimension }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(PlanError::invalid_input("radius params: eta must be finite and >= 0"));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(PlanError::invalid_input("radius params: mu must be finite and > 0"));
        }
        if self.dimension < 1 {
            return Err(PlanError::invalid_input("radius params: dimension must be >= 1"));
        }
        Ok(())
    }
}

/// Connection radius for `n` samples:
///
/// r(n) = (1 + eta) * 2 * (1/d)^(1/d) * (mu / v_d)^(1/d) * (ln n / n)^(1/d)
///
/// where v_d is the unit-ball volume. Natural logarithm, so `n >= 2`.
pub fn connection_radius(n: usize, params: &RadiusParams) -> Result<f64, PlanError> {
    params.validate()?;
    if n < 2 {
        return Err(PlanError::invalid_input("connection_radius requires n >= 2"));
    }
    let d = params.dimension as f64;
    let zeta = unit_ball_volume(params.dimension)?;
    let inv_d = 1.0 / d;
    let nf = n as f64;
    Ok((1.0 + params.eta)
        * 2.0
        * inv_d.powf(inv_d)
        * (params.mu / zeta).powf(inv_d)
        * (nf.ln() / nf).powf(inv_d))
}

fn check_uniform_dimension(points: &[Configuration]) -> Result<(), PlanError> {
    if let Some(first) = points.first() {
        let d = first.dim();
        if points.iter().any(|p| p.dim() != d) {
            return Err(PlanError::invalid_input("points must share one dimension"));
        }
    }
    Ok(())
}

fn scan_neighbors(points: &[Configuration], i: usize, radius: f64) -> Vec<(usize, f64)> {
    let mut list = Vec::new();
    for (j, q) in points.iter().enumerate() {
        if j == i {
            continue;
        }
        let dist = points[i].distance(q);
        if dist < radius {
            list.push((j, dist));
        }
    }
    list
}

/// Uniform access to per-node neighbor lists, either batched or lazily
/// materialized. Lazy implementations charge one NN call per first
/// materialization of a node's list.
pub trait NeighborAccess {
    fn node_count(&self) -> usize;
    fn for_each_neighbor(
        &mut self,
        node: usize,
        counters: &mut CallCounters,
        visit: impl FnMut(usize, f64),
    );
}

/// Fully materialized disk graph over a fixed point set.
///
/// Adjacency lists are sorted by neighbor index, pairs are symmetric, and
/// every listed pair has distance < radius with the Euclidean distance as
/// the stored edge cost.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTable {
    pub points: Vec<Configuration>,
    pub radius: f64,
    pub adjacency: Vec<Vec<(usize, f64)>>,
}

impl NeighborTable {
    pub fn build(points: &[Configuration], radius: f64) -> Result<Self, PlanError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(PlanError::invalid_input("neighbor table radius must be finite and > 0"));
        }
        check_uniform_dimension(points)?;
        let n = points.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = points[i].distance(&points[j]);
                if dist < radius {
                    adjacency[i].push((j, dist));
                    adjacency[j].push((i, dist));
                }
            }
        }
        Ok(NeighborTable {
            points: points.to_vec(),
            radius,
            adjacency,
        })
    }

    /// Batched build that charges one NN call per materialized list, i.e.
    /// `points.len()` calls in total.
    pub fn build_counted(
        points: &[Configuration],
        radius: f64,
        counters: &mut CallCounters,
    ) -> Result<Self, PlanError> {
        let table = Self::build(points, radius)?;
        counters.record_nn_batch(points.len() as u64);
        Ok(table)
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }
}

impl NeighborAccess for NeighborTable {
    fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    // NN accounting happened at build time for the batched table.
    fn for_each_neighbor(
        &mut self,
        node: usize,
        _counters: &mut CallCounters,
        mut visit: impl FnMut(usize, f64),
    ) {
        for &(j, dist) in &self.adjacency[node] {
            visit(j, dist);
        }
    }
}

/// Disk graph whose per-node lists are computed on first use and memoized.
///
/// This realizes the delayed NN accounting of the lower-bound planner: only
/// nodes actually touched by a traversal pay an NN call.
#[derive(Debug)]
pub struct LazyNeighborTable<'a> {
    points: &'a [Configuration],
    radius: f64,
    memo: Vec<Option<Vec<(usize, f64)>>>,
}

impl<'a> LazyNeighborTable<'a> {
    pub fn new(points: &'a [Configuration], radius: f64) -> Result<Self, PlanError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(PlanError::invalid_input("neighbor table radius must be finite and > 0"));
        }
        check_uniform_dimension(points)?;
        Ok(LazyNeighborTable {
            points,
            radius,
            memo: vec![None; points.len()],
        })
    }

    /// How many per-node lists have been materialized so far.
    pub fn materialized_count(&self) -> usize {
        self.memo.iter().filter(|m| m.is_some()).count()
    }
}

impl NeighborAccess for LazyNeighborTable<'_> {
    fn node_count(&self) -> usize {
        self.points.len()
    }

    fn for_each_neighbor(
        &mut self,
        node: usize,
        counters: &mut CallCounters,
        mut visit: impl FnMut(usize, f64),
    ) {
        if self.memo[node].is_none() {
            self.memo[node] = Some(scan_neighbors(self.points, node, self.radius));
            counters.record_nn();
        }
        for &(j, dist) in self.memo[node].as_ref().unwrap() {
            visit(j, dist);
        }
    }
}

/// View of a graph restricted to an allowed node set; edges leaving the set
/// are hidden. Queries must only target allowed nodes.
pub struct RestrictedNeighbors<'a, P: NeighborAccess> {
    inner: &'a mut P,
    allowed: &'a [bool],
}

impl<'a, P: NeighborAccess> RestrictedNeighbors<'a, P> {
    pub fn new(inner: &'a mut P, allowed: &'a [bool]) -> Self {
        debug_assert_eq!(inner.node_count(), allowed.len());
        RestrictedNeighbors { inner, allowed }
    }
}

impl<P: NeighborAccess> NeighborAccess for RestrictedNeighbors<'_, P> {
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn for_each_neighbor(
        &mut self,
        node: usize,
        counters: &mut CallCounters,
        mut visit: impl FnMut(usize, f64),
    ) {
        debug_assert!(self.allowed[node]);
        let allowed = self.allowed;
        self.inner.for_each_neighbor(node, counters, |j, dist| {
            if allowed[j] {
                visit(j, dist);
            }
        });
    }
}
