//! Executed trajectories and per-run statistics shared by every planner.

use serde::{Deserialize, Serialize};

use crate::geometry::{euclid_dist, Point3};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Failed,
    Timeout,
    Unreachable,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failed => "failed",
            Outcome::Timeout => "timeout",
            Outcome::Unreachable => "unreachable",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What kind of search a replanning step ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMode {
    /// Obstacle-free regime: one coarse cell.
    Fast,
    /// Escalating cell sizes near obstacles.
    Avoidance,
    /// Kinematic sampling (car-like agent), forward.
    Kinematic,
    /// Kinematic sampling forward with the line term negated.
    Explore,
    /// Kinematic sampling in reverse with the line term negated.
    Reverse,
    /// Best-first search (Hybrid A*) or incremental search (D* Lite).
    Search,
}

/// Bookkeeping for one replanning step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub mode: StepMode,
    /// Position the step planned from.
    pub center: [f64; 3],
    /// Cell edge node count (lattice planners) or sampling depth (kinematic).
    pub cellsize: usize,
    /// Node spacing in meters (lattice) or sampling arc length (kinematic).
    pub spacing: f64,
    pub nodes_evaluated: usize,
    /// Waypoints executed after this step.
    pub executed: usize,
}

/// Executed positions, starting at the start position. Empty when the agent
/// never moved. Car-like runs also carry a heading per point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory<T> {
    pub points: Vec<Point3<T>>,
    pub headings: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn new() -> Self {
        Self {
            points: Vec::new(),
            headings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Polyline length in meters.
    pub fn length(&self) -> T {
        self.points
            .windows(2)
            .fold(T::zero(), |acc, w| acc + euclid_dist(&w[0], &w[1]))
    }

    /// Number of unit grid moves along the polyline: the summed Chebyshev
    /// segment lengths in cells, rounded once at the end. Exact for
    /// 8-connected paths; an approximation for anything else.
    pub fn grid_moves(&self, resolution: T) -> usize {
        let cells = self.points.windows(2).fold(T::zero(), |acc, w| {
            let d = w[1] - w[0];
            acc + d.x.abs().max(d.y.abs()).max(d.z.abs()) / resolution
        });
        cells.round().as_f64() as usize
    }

    pub fn last(&self) -> Option<&Point3<T>> {
        self.points.last()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub outcome: Outcome,
    /// Planning wall time in seconds. Excluded from determinism checks.
    #[serde(skip)]
    pub wall_time: f64,
    /// Polyline length in meters.
    pub path_length: f64,
    /// Unit grid moves along the path (discrete comparisons).
    pub path_nodes: usize,
    pub nodes_evaluated_total: usize,
    pub nodes_evaluated_per_step: Vec<usize>,
    pub steps: Vec<StepRecord>,
    /// Human-readable reason for a non-success outcome.
    pub detail: Option<String>,
}

impl RunMetrics {
    pub fn from_steps<T: Real>(
        outcome: Outcome,
        trajectory: &Trajectory<T>,
        steps: Vec<StepRecord>,
        resolution: T,
        wall_time: f64,
    ) -> Self {
        let per_step: Vec<usize> = steps.iter().map(|s| s.nodes_evaluated).collect();
        Self {
            outcome,
            wall_time,
            path_length: trajectory.length().as_f64(),
            path_nodes: trajectory.grid_moves(resolution),
            nodes_evaluated_total: per_step.iter().sum(),
            nodes_evaluated_per_step: per_step,
            steps,
            detail: None,
        }
    }

    pub fn average_nodes_per_step(&self) -> f64 {
        if self.nodes_evaluated_per_step.is_empty() {
            0.0
        } else {
            self.nodes_evaluated_total as f64 / self.nodes_evaluated_per_step.len() as f64
        }
    }

    pub fn max_nodes_per_step(&self) -> usize {
        self.nodes_evaluated_per_step.iter().copied().max().unwrap_or(0)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// A finished (or aborted) run: what was executed and how it went.
#[derive(Debug, Clone)]
pub struct PlanRun<T> {
    pub trajectory: Trajectory<T>,
    pub metrics: RunMetrics,
}
