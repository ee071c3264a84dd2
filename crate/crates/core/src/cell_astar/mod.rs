//! Cell-based receding-horizon search.
//!
//! Each step builds a small lattice (the search cell) around the agent,
//! scores its nodes by distance to goal plus a signed distance to the
//! start-goal line, and picks one node per layer. Far from obstacles a single
//! coarse cell is used; near obstacles the cell grows until a chain exists.

pub mod ackermann;
mod cell;
mod params;
mod select;

use std::time::Instant;

use thiserror::Error;

use crate::error::ParamError;
use crate::geometry::{euclid_dist, Point3};
use crate::run::{Outcome, PlanRun, RunMetrics, StepMode, StepRecord, Trajectory};
use crate::scalar::Real;
use crate::world::{OccupancyWorld, SensorConfig};

pub use cell::{dominant_axis, gen_search_cell, CellNode, Offset, SearchCell};
pub use params::{PlanParams, SignRule};
pub use select::{node_cost, safe_to_pass, select_cell_path, CellPath};

use select::{select_layers, Evaluator, LayerPlan, SignMode};

#[derive(Debug, Error)]
pub enum PlanError<T: Real> {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("no feasible cell path at {at:?} (cell sizes tried: {attempted:?})")]
    Stuck {
        at: Point3<T>,
        attempted: Vec<usize>,
        /// What was executed before getting stuck.
        partial: Box<PlanRun<T>>,
    },
}

/// Result of one replanning step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPlan<T> {
    pub path: CellPath<T>,
    pub mode: StepMode,
    /// Edge size of the cell that produced `path` (the last one tried if empty).
    pub cellsize: usize,
    pub spacing: T,
    pub nodes_evaluated: usize,
    pub attempted: Vec<usize>,
}

/// Plans one step from `p_t`.
///
/// Fast mode runs when the straight segment to the goal is clear within
/// `avoidance_range` and `force_avoidance` is off; an empty fast path is a
/// valid result (the caller retries in avoidance mode). Avoidance mode grows
/// the cell from the smallest size whose half-width covers the nearest
/// obstacle; an empty result there is reported as `Stuck`.
pub fn plan_step<T: Real>(
    world: &OccupancyWorld<T>,
    p_t: &Point3<T>,
    start: &Point3<T>,
    goal: &Point3<T>,
    params: &PlanParams<T>,
    force_avoidance: bool,
) -> Result<StepPlan<T>, Vec<usize>> {
    let dim = world.dimensionality();
    let dir = *goal - *p_t;
    let Some((axis, _)) = dominant_axis(&dir, dim) else {
        return Ok(StepPlan {
            path: CellPath::default(),
            mode: StepMode::Fast,
            cellsize: 3,
            spacing: params.bigstep,
            nodes_evaluated: 0,
            attempted: Vec::new(),
        });
    };
    let obstacle = world.nearest_obstacle_within(&[*goal], p_t, params.avoidance_range);

    if obstacle.is_none() && !force_avoidance {
        // Never step past the goal along the dominant axis.
        let spacing = params.bigstep.min(dir.axis(axis).abs());
        let cell = gen_search_cell(*p_t, 3, spacing, dir, dim).expect("validated cell parameters");
        let mut eval = Evaluator::new(
            world,
            *p_t,
            *start,
            *goal,
            params.w1,
            params.w2,
            SignMode::AlwaysPositive,
        );
        let path = select_layers(
            &cell,
            &mut eval,
            LayerPlan {
                lateral: false,
                forward: 1,
            },
        );
        return Ok(StepPlan {
            path,
            mode: StepMode::Fast,
            cellsize: 3,
            spacing,
            nodes_evaluated: eval.evaluated(),
            attempted: vec![3],
        });
    }

    let g = params.gridsize;
    let first = match obstacle {
        Some(d) => 2 * ((d / g).ceil().as_f64().max(1.0) as usize) + 1,
        None => params.cellsize_min,
    };
    let mut eval = Evaluator::new(
        world,
        *p_t,
        *start,
        *goal,
        params.w1,
        params.w2,
        SignMode::Rule(params.sign_rule),
    );
    let mut attempted = Vec::new();
    for cs in params.cellsizes_from(first) {
        attempted.push(cs);
        let cell = gen_search_cell(*p_t, cs, g, dir, dim).expect("validated cell parameters");
        let path = select_layers(&cell, &mut eval, LayerPlan::toward(&cell, goal, true));
        if !path.is_empty() {
            return Ok(StepPlan {
                path,
                mode: StepMode::Avoidance,
                cellsize: cs,
                spacing: g,
                nodes_evaluated: eval.evaluated(),
                attempted,
            });
        }
    }
    Err(attempted)
}

/// Runs the receding-horizon loop from `start` to `goal`.
///
/// With a sensor, the world is revealed around the agent before each step.
/// The agent executes every waypoint of a step's path in order and stops as
/// soon as it is within `goal_tolerance` of the goal.
pub fn plan<T: Real>(
    world: &mut OccupancyWorld<T>,
    start: &Point3<T>,
    goal: &Point3<T>,
    params: &PlanParams<T>,
    sensor: Option<&SensorConfig<T>>,
) -> Result<PlanRun<T>, PlanError<T>> {
    params.validate()?;
    if !start.is_finite() || !goal.is_finite() {
        return Err(ParamError::new("start/goal", "must be finite").into());
    }
    if world.is_occupied_true(start) {
        return Err(ParamError::new("start", "lies inside an obstacle").into());
    }
    if world.is_occupied_true(goal) {
        return Err(ParamError::new("goal", "lies inside an obstacle").into());
    }
    let clock = Instant::now();
    let res = world.resolution();
    let mut traj = Trajectory::new();
    let mut steps = Vec::new();
    let mut p_t = *start;
    let mut force_avoidance = false;

    let finish = |outcome, traj: Trajectory<T>, steps, clock: Instant| PlanRun {
        metrics: RunMetrics::from_steps(outcome, &traj, steps, res, clock.elapsed().as_secs_f64()),
        trajectory: traj,
    };

    while euclid_dist(&p_t, goal) > params.goal_tolerance {
        if steps.len() >= params.max_steps {
            let run = finish(Outcome::Timeout, traj, steps, clock);
            let detail = format!("max_steps {} exhausted", params.max_steps);
            return Ok(PlanRun {
                metrics: run.metrics.with_detail(detail),
                ..run
            });
        }
        if let Some(s) = sensor {
            world.reveal(&p_t, s);
        }
        let step = match plan_step(world, &p_t, start, goal, params, force_avoidance) {
            Ok(step) => step,
            Err(attempted) => {
                let partial = finish(Outcome::Failed, traj, steps, clock);
                return Err(PlanError::Stuck {
                    at: p_t,
                    attempted,
                    partial: Box::new(partial),
                });
            }
        };
        force_avoidance = step.path.is_empty();
        if traj.is_empty() && !step.path.is_empty() {
            traj.points.push(*start);
        }
        let from = p_t;
        let mut executed = 0;
        for wp in &step.path.waypoints {
            p_t = *wp;
            traj.points.push(p_t);
            executed += 1;
            if euclid_dist(&p_t, goal) <= params.goal_tolerance {
                break;
            }
        }
        steps.push(StepRecord {
            mode: step.mode,
            center: [from.x.as_f64(), from.y.as_f64(), from.z.as_f64()],
            cellsize: step.cellsize,
            spacing: step.spacing.as_f64(),
            nodes_evaluated: step.nodes_evaluated,
            executed,
        });
    }
    Ok(finish(Outcome::Success, traj, steps, clock))
}

#[cfg(test)]
mod tests;
