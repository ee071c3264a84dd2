use super::*;
use crate::fixtures::wall_points;
use crate::world::{load_obstacles_3d, Dimensionality, KnowledgeMode, WorldConfig};

fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
    Point3::new(x, y, z)
}

fn world3(points: Vec<Point3<f64>>, mode: KnowledgeMode) -> OccupancyWorld<f64> {
    let cfg = WorldConfig {
        resolution: 0.1,
        inflation_radius: 0.5,
        mode,
        bounds: None,
    };
    load_obstacles_3d(&points, cfg).unwrap()
}

fn drone_params() -> PlanParams<f64> {
    PlanParams {
        w1: 1.0,
        w2: 0.5,
        cellsize_min: 3,
        cellsize_max: 13,
        gridsize: 0.5,
        bigstep: 1.0,
        avoidance_range: 3.5,
        goal_tolerance: 0.5,
        max_steps: 200,
        sign_rule: SignRule::Corridor,
        w_g: 0.0,
        k_explore: 3,
    }
}

fn audit(world: &OccupancyWorld<f64>, traj: &Trajectory<f64>) -> usize {
    traj.points
        .windows(2)
        .filter(|w| !world.segment_clear_true(&w[0], &w[1]))
        .count()
}

#[test]
fn fast_mode_in_empty_world() {
    let w = world3(vec![], KnowledgeMode::FullyKnown);
    let (s, g) = (p(0., 0., 2.5), p(7., 0., 2.5));
    let step = plan_step(&w, &s, &s, &g, &drone_params(), false).unwrap();
    assert_eq!(step.mode, StepMode::Fast);
    assert_eq!(step.path.waypoints, vec![p(1.0, 0., 2.5)]);
    assert!(step.nodes_evaluated <= 27);
}

#[test]
fn wall_ahead_triggers_avoidance_with_lateral_deviation() {
    let w = world3(wall_points(), KnowledgeMode::FullyKnown);
    let (s, g) = (p(0.5, 0., 2.5), p(7., 0., 2.5));
    let pp = drone_params();
    let step = plan_step(&w, &s, &s, &g, &pp, false).unwrap();
    assert_eq!(step.mode, StepMode::Avoidance);
    assert!(step.nodes_evaluated <= 13usize.pow(3));
    let dev = step
        .path
        .waypoints
        .iter()
        .map(|q| q.y.abs().max((q.z - 2.5).abs()))
        .fold(0.0, f64::max);
    assert!(dev >= pp.gridsize);
    let mut prev = s;
    for q in &step.path.waypoints {
        assert!(w.segment_clear(&prev, q));
        prev = *q;
    }
}

#[test]
fn enclosed_agent_is_stuck() {
    // Hollow box of points around the agent, tight enough that only the
    // center stays free.
    let mut pts = Vec::new();
    for i in -6..=6 {
        for j in -6..=6 {
            let (a, b) = (i as f64 * 0.1, j as f64 * 0.1);
            for c in [-0.6, 0.6] {
                pts.push(p(c, a, 2.5 + b));
                pts.push(p(a, c, 2.5 + b));
                pts.push(p(a, b, 2.5 + c));
            }
        }
    }
    let mut w = world3(pts, KnowledgeMode::FullyKnown);
    let (s, g) = (p(0., 0., 2.5), p(7., 0., 2.5));
    assert!(plan_step(&w, &s, &s, &g, &drone_params(), false).is_err());
    match plan(&mut w, &s, &g, &drone_params(), None) {
        Err(PlanError::Stuck { at, attempted, partial }) => {
            assert_eq!(at, s);
            assert_eq!(*attempted.last().unwrap(), 13);
            assert_eq!(partial.metrics.outcome, Outcome::Failed);
        }
        other => panic!("expected Stuck, got {other:?}"),
    }
}

#[test]
fn start_at_goal_is_immediate_success() {
    let mut w = world3(vec![], KnowledgeMode::FullyKnown);
    let s = p(1., 1., 1.);
    let run = plan(&mut w, &s, &p(1.2, 1., 1.), &drone_params(), None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
    assert!(run.trajectory.is_empty());
    assert!(run.metrics.steps.is_empty());
}

#[test]
fn empty_world_straight_run() {
    let mut w = world3(vec![], KnowledgeMode::FullyKnown);
    let (s, g) = (p(0., 0., 2.5), p(7., 0., 2.5));
    let run = plan(&mut w, &s, &g, &drone_params(), None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
    let len = run.trajectory.length();
    assert!((len - 7.0).abs() <= 0.05 * 7.0, "length {len}");
    assert!(run
        .metrics
        .steps
        .iter()
        .all(|s| s.mode == StepMode::Fast && s.nodes_evaluated <= 27));
}

#[test]
fn greedy_descent_length_bound_without_line_term() {
    let mut w = world3(vec![], KnowledgeMode::FullyKnown);
    let mut pp = drone_params();
    pp.w2 = 0.0;
    for g in [p(7., 3., 1.), p(-4., 9., 2.5), p(5., -5., -5.)] {
        let s = p(0., 0., 2.5);
        let run = plan(&mut w, &s, &g, &pp, None).unwrap();
        let bound = euclid_dist(&s, &g) + pp.gridsize * 3f64.sqrt();
        assert!(
            run.trajectory.length() <= bound,
            "goal {g:?}: {}",
            run.trajectory.length()
        );
    }
}

#[test]
fn wall_run_semi_known_is_collision_free() {
    let mut w = world3(wall_points(), KnowledgeMode::SemiKnown);
    let truth = world3(wall_points(), KnowledgeMode::FullyKnown);
    let (s, g) = (p(0., 0., 2.5), p(7., 0., 2.5));
    let sensor = SensorConfig::new(6.0).unwrap();
    let pp = drone_params();
    let run = plan(&mut w, &s, &g, &pp, Some(&sensor)).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
    assert_eq!(audit(&truth, &run.trajectory), 0);
    assert!(
        run.trajectory.length() <= 1.5 * 7.0,
        "length {}",
        run.trajectory.length()
    );
    assert!(run.metrics.steps.iter().any(|s| s.mode == StepMode::Avoidance));
    assert!(run.metrics.max_nodes_per_step() <= 13usize.pow(3));
    let total: usize = run.metrics.nodes_evaluated_per_step.iter().sum();
    assert_eq!(total, run.metrics.nodes_evaluated_total);
}

#[test]
fn runs_are_deterministic() {
    let (s, g) = (p(0., 0., 2.5), p(7., 0., 2.5));
    let sensor = SensorConfig::new(6.0).unwrap();
    let mut a = world3(wall_points(), KnowledgeMode::SemiKnown);
    let mut b = world3(wall_points(), KnowledgeMode::SemiKnown);
    let ra = plan(&mut a, &s, &g, &drone_params(), Some(&sensor)).unwrap();
    let rb = plan(&mut b, &s, &g, &drone_params(), Some(&sensor)).unwrap();
    assert_eq!(ra.trajectory, rb.trajectory);
    let (mut ma, mut mb) = (ra.metrics, rb.metrics);
    ma.wall_time = 0.0;
    mb.wall_time = 0.0;
    assert_eq!(ma, mb);
}

#[test]
fn membership_rule_also_clears_the_wall() {
    let mut w = world3(wall_points(), KnowledgeMode::FullyKnown);
    let (s, g) = (p(0., 0., 2.5), p(7., 0., 2.5));
    let mut pp = drone_params();
    pp.sign_rule = SignRule::Membership;
    let run = plan(&mut w, &s, &g, &pp, None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
    assert_eq!(audit(&w, &run.trajectory), 0);
}

#[test]
fn two_dimensional_grid_run() {
    let map = "..........\n..........\n....#.....\n....#.....\n....#.....\n..........\n..........";
    let mut w = crate::world::load_map_2d(map, WorldConfig::default()).unwrap();
    assert_eq!(w.dimensionality(), Dimensionality::Two);
    let mut pp = PlanParams::with_gridsize(1.0);
    pp.bigstep = 1.0;
    let run = plan(&mut w, &Point3::planar(0.0, 3.0), &Point3::planar(9.0, 3.0), &pp, None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
    assert!(run.metrics.max_nodes_per_step() <= 81);
    assert_eq!(audit(&w, &run.trajectory), 0);
    assert!(run.trajectory.points.iter().all(|q| q.z == 0.0));
}

#[test]
fn timeout_keeps_partial_trajectory() {
    let mut w = world3(vec![], KnowledgeMode::FullyKnown);
    let mut pp = drone_params();
    pp.max_steps = 2;
    let run = plan(&mut w, &p(0., 0., 2.5), &p(7., 0., 2.5), &pp, None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Timeout);
    assert_eq!(run.trajectory.len(), 3);
}

#[test]
fn rejects_blocked_endpoints_and_bad_params() {
    let mut w = world3(wall_points(), KnowledgeMode::FullyKnown);
    let r = plan(&mut w, &p(3.5, 0., 2.5), &p(7., 0., 2.5), &drone_params(), None);
    assert!(matches!(r, Err(PlanError::Param(e)) if e.name == "start"));
    let mut pp = drone_params();
    pp.cellsize_max = 12;
    let r = plan(&mut w, &p(0., 0., 2.5), &p(7., 0., 2.5), &pp, None);
    assert!(matches!(r, Err(PlanError::Param(e)) if e.name == "cellsize_max"));
}

#[test]
fn single_precision_run() {
    let pts: Vec<Point3<f32>> = wall_points().iter().map(|q| q.cast()).collect();
    let cfg = WorldConfig {
        resolution: 0.1f32,
        inflation_radius: 0.5,
        mode: KnowledgeMode::FullyKnown,
        bounds: None,
    };
    let mut w = OccupancyWorld::from_points(pts, cfg).unwrap();
    let pp = PlanParams {
        w1: 1.0f32,
        w2: 0.5,
        cellsize_min: 3,
        cellsize_max: 13,
        gridsize: 0.5,
        bigstep: 1.0,
        avoidance_range: 3.5,
        goal_tolerance: 0.5,
        max_steps: 200,
        sign_rule: SignRule::Corridor,
        w_g: 0.0,
        k_explore: 3,
    };
    let run = plan(&mut w, &Point3::new(0., 0., 2.5), &Point3::new(7., 0., 2.5), &pp, None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
}
