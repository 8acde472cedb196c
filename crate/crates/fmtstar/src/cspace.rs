//! Configuration-space geometry: point membership, uniform rejection
//! sampling, exact straight-line collision tests and goal tests.
//!
//! Obstacles are closed sets, so touching an obstacle boundary counts as a
//! collision. Segment tests are closed-form (slab test for boxes, clamped
//! quadratic for balls); there is no resolution parameter.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::PlanError;

/// Cap on rejection-sampling attempts, per requested sample.
pub const DEFAULT_ATTEMPTS_PER_SAMPLE: usize = 10_000;

/// A point in the d-dimensional Euclidean workspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    pub coords: Vec<f64>,
}

impl Configuration {
    pub fn new(coords: Vec<f64>) -> Self {
        Configuration { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean distance, the edge cost used throughout the library.
    pub fn distance(&self, other: &Configuration) -> f64 {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

impl From<Vec<f64>> for Configuration {
    fn from(coords: Vec<f64>) -> Self {
        Configuration::new(coords)
    }
}

/// Axis-aligned box spanning the configuration space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Configuration,
    pub hi: Configuration,
}

impl Bounds {
    /// Closed membership test: the boundary of the space belongs to it.
    pub fn contains(&self, q: &Configuration) -> bool {
        q.coords
            .iter()
            .enumerate()
            .all(|(k, &c)| c >= self.lo.coords[k] && c <= self.hi.coords[k])
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .coords
            .iter()
            .zip(&self.hi.coords)
            .map(|(l, h)| h - l)
            .product()
    }
}

/// A forbidden region. Obstacles are closed: boundary points collide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Obstacle {
    Box { lo: Configuration, hi: Configuration },
    Ball { center: Configuration, radius: f64 },
}

impl Obstacle {
    fn contains(&self, q: &Configuration) -> bool {
        match self {
            Obstacle::Box { lo, hi } => q
                .coords
                .iter()
                .enumerate()
                .all(|(k, &c)| c >= lo.coords[k] && c <= hi.coords[k]),
            Obstacle::Ball { center, radius } => {
                let d2: f64 = q
                    .coords
                    .iter()
                    .zip(&center.coords)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                d2 <= radius * radius
            }
        }
    }

    /// Exact closed-segment vs closed-obstacle intersection test.
    fn intersects_segment(&self, a: &Configuration, b: &Configuration) -> bool {
        match self {
            Obstacle::Box { lo, hi } => segment_hits_box(a, b, lo, hi),
            Obstacle::Ball { center, radius } => segment_hits_ball(a, b, center, *radius),
        }
    }
}

/// Slab test: does the segment a + t(b-a), t in [0,1], meet the closed box?
fn segment_hits_box(a: &Configuration, b: &Configuration, lo: &Configuration, hi: &Configuration) -> bool {
    let mut t_min = 0.0f64;
    let mut t_max = 1.0f64;
    for k in 0..a.dim() {
        let dir = b.coords[k] - a.coords[k];
        if dir == 0.0 {
            if a.coords[k] < lo.coords[k] || a.coords[k] > hi.coords[k] {
                return false;
            }
        } else {
            let mut t1 = (lo.coords[k] - a.coords[k]) / dir;
            let mut t2 = (hi.coords[k] - a.coords[k]) / dir;
            if t1 > t2 {
                std::mem::swap(&mut t1, &mut t2);
            }
            t_min = t_min.max(t1);
            t_max = t_max.min(t2);
            if t_min > t_max {
                return false;
            }
        }
    }
    true
}

/// Minimum distance from the segment to the ball center, via the clamped
/// projection parameter of the quadratic in t.
fn segment_hits_ball(a: &Configuration, b: &Configuration, center: &Configuration, radius: f64) -> bool {
    let mut uu = 0.0;
    let mut wu = 0.0;
    for k in 0..a.dim() {
        let u = b.coords[k] - a.coords[k];
        let w = center.coords[k] - a.coords[k];
        uu += u * u;
        wu += w * u;
    }
    let t = if uu == 0.0 { 0.0 } else { (wu / uu).clamp(0.0, 1.0) };
    let mut d2 = 0.0;
    for k in 0..a.dim() {
        let closest = a.coords[k] + t * (b.coords[k] - a.coords[k]);
        let diff = closest - center.coords[k];
        d2 += diff * diff;
    }
    d2 <= radius * radius
}

/// Goal region: a closed ball around `center`. Radius zero means a single
/// goal configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalRegion {
    pub center: Configuration,
    pub radius: f64,
}

/// A planning problem: bounded space, obstacles, start and goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub x_init: Configuration,
    pub bounds: Bounds,
    pub goal: GoalRegion,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

impl Scenario {
    /// Check every structural invariant; error messages name the offending
    /// field so scenario files can be fixed by hand.
    pub fn validate(&self) -> Result<(), PlanError> {
        let d = self.dimension;
        if d < 1 {
            return Err(PlanError::invalid_scenario("dimension", "must be >= 1"));
        }
        if self.bounds.lo.dim() != d || self.bounds.hi.dim() != d {
            return Err(PlanError::invalid_scenario("bounds", "lo/hi must have length `dimension`"));
        }
        for k in 0..d {
            if !(self.bounds.lo.coords[k] < self.bounds.hi.coords[k]) {
                return Err(PlanError::invalid_scenario(
                    "bounds",
                    format!("lo[{k}] must be strictly below hi[{k}]"),
                ));
            }
        }
        for (i, obs) in self.obstacles.iter().enumerate() {
            match obs {
                Obstacle::Box { lo, hi } => {
                    if lo.dim() != d || hi.dim() != d {
                        return Err(PlanError::invalid_scenario(
                            format!("obstacles[{i}]"),
                            "box corners must have length `dimension`",
                        ));
                    }
                    for k in 0..d {
                        if !(lo.coords[k] < hi.coords[k]) {
                            return Err(PlanError::invalid_scenario(
                                format!("obstacles[{i}]"),
                                format!("box needs lo[{k}] < hi[{k}]"),
                            ));
                        }
                    }
                }
                Obstacle::Ball { center, radius } => {
                    if center.dim() != d {
                        return Err(PlanError::invalid_scenario(
                            format!("obstacles[{i}]"),
                            "ball center must have length `dimension`",
                        ));
                    }
                    if !(*radius > 0.0) {
                        return Err(PlanError::invalid_scenario(
                            format!("obstacles[{i}]"),
                            "ball radius must be > 0",
                        ));
                    }
                }
            }
        }
        if self.x_init.dim() != d || !self.x_init.is_finite() {
            return Err(PlanError::invalid_scenario("x_init", "must be a finite point of length `dimension`"));
        }
        if !self.point_free(&self.x_init) {
            return Err(PlanError::invalid_scenario("x_init", "must be collision-free and inside bounds"));
        }
        if self.goal.center.dim() != d || !self.goal.center.is_finite() {
            return Err(PlanError::invalid_scenario("goal.center", "must be a finite point of length `dimension`"));
        }
        if !(self.goal.radius >= 0.0) {
            return Err(PlanError::invalid_scenario("goal.radius", "must be >= 0"));
        }
        if !self.point_free(&self.goal.center) {
            return Err(PlanError::invalid_scenario("goal.center", "must be collision-free and inside bounds"));
        }
        Ok(())
    }

    /// Fast membership test; assumes `q` has the scenario dimension.
    pub(crate) fn point_free(&self, q: &Configuration) -> bool {
        self.bounds.contains(q) && !self.obstacles.iter().any(|o| o.contains(q))
    }

    /// Is `q` inside bounds and outside every (closed) obstacle?
    pub fn is_free(&self, q: &Configuration) -> Result<bool, PlanError> {
        if q.dim() != self.dimension {
            return Err(PlanError::invalid_input(format!(
                "configuration has dimension {}, scenario expects {}",
                q.dim(),
                self.dimension
            )));
        }
        Ok(self.point_free(q))
    }

    /// Fast segment test; assumes endpoints have the scenario dimension and
    /// lie inside bounds (the box is convex, so the segment stays inside).
    pub(crate) fn segment_free(&self, a: &Configuration, b: &Configuration) -> bool {
        !self.obstacles.iter().any(|o| o.intersects_segment(a, b))
    }

    /// Local planner: is the closed straight segment between `a` and `b`
    /// collision-free? Exact, no tolerance parameter.
    pub fn collision_free(&self, a: &Configuration, b: &Configuration) -> Result<bool, PlanError> {
        if a.dim() != self.dimension || b.dim() != self.dimension {
            return Err(PlanError::invalid_input(format!(
                "segment endpoints must have dimension {}",
                self.dimension
            )));
        }
        Ok(self.segment_free(a, b))
    }

    /// Goal membership: within `goal.radius` of the goal center.
    pub fn in_goal(&self, q: &Configuration) -> bool {
        q.distance(&self.goal.center) <= self.goal.radius
    }

    fn sample_uniform(&self, rng: &mut impl Rng) -> Configuration {
        let coords = (0..self.dimension)
            .map(|k| rng.gen_range(self.bounds.lo.coords[k]..self.bounds.hi.coords[k]))
            .collect();
        Configuration::new(coords)
    }

    /// Draw `count` collision-free configurations by rejection sampling.
    ///
    /// The rng stream is consumed deterministically (every candidate draw
    /// costs exactly `dimension` values), so equal seeds give equal samples.
    pub fn sample_free(&self, count: usize, rng: &mut impl Rng) -> Result<Vec<Configuration>, PlanError> {
        self.sample_free_capped(count, DEFAULT_ATTEMPTS_PER_SAMPLE.saturating_mul(count), rng)
    }

    /// Like [`Scenario::sample_free`] with an explicit attempt cap, so that
    /// near-fully-blocked scenarios fail instead of looping forever.
    pub fn sample_free_capped(
        &self,
        count: usize,
        max_attempts: usize,
        rng: &mut impl Rng,
    ) -> Result<Vec<Configuration>, PlanError> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            if attempts >= max_attempts {
                return Err(PlanError::UnsatisfiableScenario(format!(
                    "drew {attempts} candidates but only {} of {count} were collision-free",
                    out.len()
                )));
            }
            attempts += 1;
            let q = self.sample_uniform(rng);
            if self.point_free(&q) {
                out.push(q);
            }
        }
        Ok(out)
    }

    /// Volume of the bounding box: an upper bound on the free-space measure.
    /// Over-estimating the measure only enlarges the connection radius, which
    /// is safe for both optimality and the lower-bound property.
    pub fn bounds_measure(&self) -> f64 {
        self.bounds.volume()
    }

    /// Monte-Carlo estimate of the free-space measure.
    pub fn monte_carlo_measure(&self, samples: usize, rng: &mut impl Rng) -> f64 {
        assert!(samples >= 1, "monte_carlo_measure needs at least one sample");
        let free = (0..samples)
            .filter(|_| {
                let q = self.sample_uniform(rng);
                self.point_free(&q)
            })
            .count();
        self.bounds.volume() * free as f64 / samples as f64
    }
}
