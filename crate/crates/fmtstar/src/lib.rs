//! Sampling-based shortest-path planning for point robots in d-dimensional
//! Euclidean boxes.
//!
//! The library builds a disk graph over random collision-free samples and
//! grows search trees over it with lazy collision checking:
//!
//! - [`search::fmt_star`] — single-shot fast-marching planner;
//! - [`anytime::afmt`] — anytime variant that doubles the sample count per
//!   iteration, reusing samples and cached local-planner verdicts;
//! - [`mplb::mplb`] — anytime variant that first computes cost-to-go lower
//!   bounds on the unchecked graph (NN calls only) and uses them to order
//!   the search and discard nodes that cannot improve the incumbent, with
//!   an optional (1+epsilon) relaxation;
//! - [`lbt::lbt_fmt`] — dual-tree variant maintaining a lower-bound tree
//!   and a verified approximation tree within a (1+epsilon) factor.
//!
//! [`instrument`] counts NN/LP primitive calls and turns the comparative
//! guarantees between paired runs into per-iteration verdicts, and
//! [`experiment`] drives benchmark runs that emit CSV and SVG output.

pub mod anytime;
pub mod cspace;
pub mod error;
pub mod experiment;
pub mod instrument;
pub mod lbt;
pub mod mplb;
pub mod neighbors;
pub mod roadmap;
pub mod scenario_io;
pub mod search;
pub mod snapshot;

pub use anytime::{afmt, EdgeCache, SampleSequence};
pub use cspace::{Bounds, Configuration, GoalRegion, Obstacle, Scenario};
pub use error::PlanError;
pub use instrument::{compare_runs, CallCounters, ComparisonReport, Planner, RunRecord};
pub use lbt::{anytime_lbt, check_dual_invariants, lbt_fmt, DualTree};
pub use mplb::{estimate_cost_to_go, is_promising, mplb, LowerBoundField, MplbParams};
pub use neighbors::{
    connection_radius, unit_ball_volume, LazyNeighborTable, NeighborAccess, NeighborTable,
    RadiusParams,
};
pub use roadmap::{bounded_dijkstra, goal_sources, DijkstraResult};
pub use search::{fmt_star, search, FailureReason, Heuristic, PathResult, SearchTree};
