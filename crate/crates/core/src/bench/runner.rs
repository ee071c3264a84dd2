use std::time::Instant;

use crate::baselines::{dstar_lite_plan, hybrid_astar_plan, GridPlan, OctileCost, PathCost};
use crate::cell_astar::ackermann::{plan_ackermann, AckermannState};
use crate::cell_astar::{plan, PlanError};
use crate::error::BenchError;
use crate::geometry::Point3;
use crate::run::{Outcome, PlanRun, RunMetrics, Trajectory};
use crate::world::{Dimensionality, OccupancyWorld};

use super::scenario::{CostKind, PlannerKind, Scenario};

/// A finished run with its collision audit.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub scenario: String,
    pub planner: String,
    pub goal: Point3<f64>,
    pub goal_index: usize,
    pub dimensionality: Dimensionality,
    pub metrics: RunMetrics,
    pub trajectory: Trajectory<f64>,
    /// Trajectory segments (or a lone point) that touch a true obstacle.
    pub audit_hits: usize,
    /// Path cost as the grid search accounts it (D* Lite only).
    pub path_cost: Option<f64>,
}

/// Counts polyline segments that pass through inflated TRUE obstacles,
/// sampled at a quarter of the world resolution.
pub fn collision_audit(world: &OccupancyWorld<f64>, trajectory: &Trajectory<f64>) -> usize {
    match trajectory.points.as_slice() {
        [] => 0,
        [p] => usize::from(world.is_occupied_true(p)),
        pts => pts
            .windows(2)
            .filter(|w| !world.segment_clear_true(&w[0], &w[1]))
            .count(),
    }
}

fn grid_cell(world: &OccupancyWorld<f64>, p: &Point3<f64>, field: &'static str) -> Result<(usize, usize), BenchError> {
    world
        .cell_of(p)
        .ok_or_else(|| BenchError::Param(crate::error::ParamError::new(field, "lies outside the grid")))
}

fn dstar<C: PathCost>(
    world: &mut OccupancyWorld<f64>,
    scenario: &Scenario,
) -> Result<(PlanRun<f64>, Option<f64>), BenchError> {
    let s = grid_cell(world, &scenario.start, "start")?;
    let g = grid_cell(world, &scenario.goal, "goal")?;
    let sensor = scenario.sensor()?;
    let plan: GridPlan<f64, C> = dstar_lite_plan(world, s, g, sensor.as_ref())?;
    let cost = plan.cost.map(|c| c.to_f64() * world.resolution());
    Ok((plan.run, cost))
}

/// Loads the world, runs the planner and audits the executed trajectory
/// against the true obstacles. A run whose trajectory touches an obstacle is
/// reported as failed whatever the planner claimed.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioRun, BenchError> {
    scenario.planner.validate()?;
    let mut world = scenario.build_world()?;
    for (p, field) in [(&scenario.start, "task.start"), (&scenario.goal, "task.goals")] {
        if world.is_occupied_true(p) {
            return Err(BenchError::Schema {
                field: field.into(),
                reason: format!("({}, {}, {}) is inside an obstacle", p.x, p.y, p.z),
            });
        }
    }
    let sensor = scenario.sensor()?;
    let spec = &scenario.planner;
    let clock = Instant::now();
    let stuck = |e: PlanError<f64>| -> Result<PlanRun<f64>, BenchError> {
        match e {
            PlanError::Param(p) => Err(p.into()),
            PlanError::Stuck { at, partial, .. } => {
                let detail = format!("stuck at ({:.2}, {:.2}, {:.2})", at.x, at.y, at.z);
                let mut run = *partial;
                run.metrics.outcome = Outcome::Failed;
                run.metrics = run.metrics.with_detail(detail);
                Ok(run)
            }
        }
    };
    let (mut run, path_cost) = match spec.kind {
        PlannerKind::CellAstar => {
            let params = spec.cell.as_ref().expect("validated");
            let r = plan(&mut world, &scenario.start, &scenario.goal, params, sensor.as_ref());
            (r.or_else(stuck)?, None)
        }
        PlannerKind::CellAstarCar => {
            let params = spec.cell.as_ref().expect("validated");
            let sampler = spec.car.as_ref().expect("validated");
            let start = AckermannState::new(scenario.start.x, scenario.start.y, scenario.heading);
            let r = plan_ackermann(&mut world, &start, &scenario.goal, params, sampler, sensor.as_ref());
            (r.or_else(stuck)?, None)
        }
        PlannerKind::HybridAstar => {
            let params = spec.hybrid.as_ref().expect("validated");
            let r = hybrid_astar_plan(
                &mut world,
                &scenario.start,
                scenario.heading,
                &scenario.goal,
                params,
                sensor.as_ref(),
            )?;
            (r, None)
        }
        PlannerKind::DstarLite => match spec.cost {
            CostKind::F64 => dstar::<f64>(&mut world, scenario)?,
            CostKind::Exact => dstar::<OctileCost>(&mut world, scenario)?,
        },
    };
    // Planners time themselves; world loading is excluded on purpose.
    if run.metrics.wall_time == 0.0 {
        run.metrics.wall_time = clock.elapsed().as_secs_f64();
    }
    let audit_hits = collision_audit(&world, &run.trajectory);
    if audit_hits > 0 {
        let detail = format!("collision audit: {audit_hits} segment(s) touch obstacles");
        run.metrics.outcome = Outcome::Failed;
        run.metrics = run.metrics.with_detail(detail);
    }
    Ok(ScenarioRun {
        scenario: scenario.name.clone(),
        planner: spec.label().to_string(),
        goal: scenario.goal,
        goal_index: scenario.goal_index,
        dimensionality: world.dimensionality(),
        metrics: run.metrics,
        trajectory: run.trajectory,
        audit_hits,
        path_cost,
    })
}
