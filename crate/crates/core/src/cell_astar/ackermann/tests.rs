use proptest::prelude::*;

use super::*;
use crate::world::{load_map_2d, WorldConfig};

fn sampler(l: f64, wheelbase: f64, set: Vec<f64>, d: i8) -> AckermannSampler<f64> {
    AckermannSampler {
        l,
        steering_set: set,
        wheelbase,
        delta_max: 0.6,
        d,
    }
}

/// Fourth-order Runge-Kutta on the rear-axle bicycle model.
fn integrate(s: AckermannState<f64>, delta: f64, wheelbase: f64, d: f64, l: f64, n: usize) -> (f64, f64, f64) {
    let f = |st: [f64; 3]| [d * st[2].cos(), d * st[2].sin(), d * delta.tan() / wheelbase];
    let h = l / n as f64;
    let mut st = [s.x, s.y, s.theta];
    for _ in 0..n {
        let k1 = f(st);
        let k2 = f([
            st[0] + h / 2.0 * k1[0],
            st[1] + h / 2.0 * k1[1],
            st[2] + h / 2.0 * k1[2],
        ]);
        let k3 = f([
            st[0] + h / 2.0 * k2[0],
            st[1] + h / 2.0 * k2[1],
            st[2] + h / 2.0 * k2[2],
        ]);
        let k4 = f([st[0] + h * k3[0], st[1] + h * k3[1], st[2] + h * k3[2]]);
        for i in 0..3 {
            st[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    (st[0], st[1], st[2])
}

fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

#[test]
fn straight_arcs() {
    let s = AckermannState::new(2.0, 3.0, 0.0);
    let fwd = ackermann_expand(&s, &sampler(1.0, 2.0, vec![0.0], 1));
    assert_eq!(
        fwd,
        vec![AckermannState {
            x: 3.0,
            y: 3.0,
            theta: 0.0,
            d: 1
        }]
    );
    let back = ackermann_expand(&s, &sampler(1.0, 2.0, vec![0.0], -1));
    assert_eq!(
        back,
        vec![AckermannState {
            x: 1.0,
            y: 3.0,
            theta: 0.0,
            d: -1
        }]
    );
}

#[test]
fn constant_steering_arc() {
    let s = AckermannState::new(0.0, 0.0, 0.0);
    let out = ackermann_expand(&s, &sampler(1.0, 2.0, vec![0.3], 1));
    let e = out[0];
    assert!((e.theta - 0.3f64.tan() / 2.0).abs() < 1e-12);
    assert!((e.theta - 0.1547).abs() < 1e-4);
    // turning center at (0, R)
    let r = 2.0 / 0.3f64.tan();
    assert!((r - 6.465).abs() < 1e-3);
    assert!(((e.x.powi(2) + (e.y - r).powi(2)).sqrt() - r).abs() < 1e-9);
    let (x, y, th) = integrate(s, 0.3, 2.0, 1.0, 1.0, 2000);
    assert!((e.x - x).abs() < 1e-6 && (e.y - y).abs() < 1e-6 && (e.theta - th).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn expansion_matches_numerical_integration(
        x in -20.0f64..20.0,
        y in -20.0f64..20.0,
        theta in -3.1f64..3.1,
        deltas in prop::collection::vec(-0.6f64..0.6, 1..5),
        wheelbase in 0.5f64..3.0,
        l in 0.1f64..2.0,
        reverse in any::<bool>(),
    ) {
        let d = if reverse { -1 } else { 1 };
        let s = AckermannState::new(x, y, theta);
        let smp = sampler(l, wheelbase, deltas.clone(), d);
        let out = ackermann_expand(&s, &smp);
        prop_assert_eq!(out.len(), deltas.len());
        for (e, &delta) in out.iter().zip(&deltas) {
            prop_assert_eq!(e.d.abs(), 1);
            prop_assert_eq!(e.d, d);
            prop_assert!(e.theta > -std::f64::consts::PI && e.theta <= std::f64::consts::PI);
            let (ix, iy, ith) = integrate(s, delta, wheelbase, d as f64, l, 1000);
            prop_assert!((e.x - ix).abs() < 1e-6);
            prop_assert!((e.y - iy).abs() < 1e-6);
            prop_assert!(angle_diff(e.theta, ith) < 1e-6);
        }
    }

    #[test]
    fn expansion_matches_rotation_about_the_turning_center(
        x in -20.0f64..20.0,
        y in -20.0f64..20.0,
        theta in -3.1f64..3.1,
        delta in -0.6f64..0.6,
        wheelbase in 0.5f64..3.0,
        l in 0.1f64..2.0,
        reverse in any::<bool>(),
    ) {
        let d = if reverse { -1 } else { 1 };
        let e = ackermann_expand(&AckermannState::new(x, y, theta), &sampler(l, wheelbase, vec![delta], d))[0];
        let (ox, oy, oth) = crate::oracle::arc_by_rotation(x, y, theta, delta, wheelbase, d as f64, l);
        prop_assert!((e.x - ox).abs() < 1e-6 && (e.y - oy).abs() < 1e-6);
        prop_assert!(angle_diff(e.theta, oth) < 1e-6);
    }
}

#[test]
fn sampler_validation() {
    let ok = AckermannSampler::symmetric(1.0, 1.0, 0.5, 5);
    ok.validate().unwrap();
    assert_eq!(ok.steering_set, vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
    let mut bad = ok.clone();
    bad.steering_set.push(0.7);
    assert_eq!(bad.validate().unwrap_err().name, "steering_set");
    let mut bad = ok.clone();
    bad.l = 0.0;
    assert_eq!(bad.validate().unwrap_err().name, "l");
    let mut bad = ok;
    bad.d = 0;
    assert_eq!(bad.validate().unwrap_err().name, "d");
}

#[test]
fn depth_fits_budget() {
    assert_eq!(max_depth(5, 81), 2);
    assert_eq!(max_depth(5, 169), 3);
    assert_eq!(max_depth(3, 169), 4);
    assert_eq!(max_depth(200, 81), 1);
}

fn open_map(w: usize, h: usize) -> String {
    let row = ".".repeat(w);
    (0..h).map(|_| row.clone()).collect::<Vec<_>>().join("\n")
}

fn car_params() -> PlanParams<f64> {
    let mut p = PlanParams::with_gridsize(1.0);
    p.cellsize_max = 13;
    p.goal_tolerance = 1.0;
    p.avoidance_range = 4.0;
    p.max_steps = 400;
    p.w_g = 0.1;
    p
}

#[test]
fn empty_world_heading_change_is_bounded() {
    let mut w = load_map_2d(&open_map(30, 20), WorldConfig::default()).unwrap();
    let smp = AckermannSampler::symmetric(1.0, 1.0, 0.5, 5);
    let start = AckermannState::new(2.0, 10.0, 0.0);
    let goal = Point3::planar(26.0, 12.0);
    let run = plan_ackermann(&mut w, &start, &goal, &car_params(), &smp, None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
    let bound = smp.max_curvature() * smp.l;
    // per executed arc the heading turns at most tan(delta_max) * l / wheelbase
    let mut i = 0;
    for st in &run.metrics.steps {
        let j = i + st.executed;
        let dth = normalize_angle(run.trajectory.headings[j] - run.trajectory.headings[i]).abs();
        assert!(dth <= bound * st.executed.div_ceil(4) as f64 + 1e-9);
        i = j;
    }
    assert!(max_curvature(&run.trajectory) <= smp.max_curvature() * 1.05);
    assert!(run.metrics.path_length < 1.2 * euclid_dist(&start.position(), &goal));
}

#[test]
fn rejects_three_dimensional_worlds() {
    let mut w = crate::world::load_obstacles_3d(&[], WorldConfig::default()).unwrap();
    let smp = AckermannSampler::symmetric(1.0, 1.0, 0.5, 5);
    let err = plan_ackermann(
        &mut w,
        &AckermannState::new(0.0, 0.0, 0.0),
        &Point3::planar(5.0, 0.0),
        &car_params(),
        &smp,
        None,
    );
    assert!(matches!(err, Err(PlanError::Param(e)) if e.name == "world"));
}

fn trap_params() -> PlanParams<f64> {
    PlanParams {
        cellsize_max: 13,
        avoidance_range: 6.0,
        goal_tolerance: 1.0,
        k_explore: 5,
        w_g: 0.1,
        ..car_params()
    }
}

#[test]
fn backs_out_of_a_dead_corner() {
    let g = crate::fixtures::dead_corner();
    let cfg = WorldConfig {
        inflation_radius: 0.3,
        ..WorldConfig::default()
    };
    let mut w = load_map_2d(&g.to_text(), cfg).unwrap();
    let smp = AckermannSampler::symmetric(1.0, 1.0, 0.5, 5);
    let start = AckermannState::new(14.0, 17.0, std::f64::consts::FRAC_PI_2);
    let run = plan_ackermann(&mut w, &start, &Point3::planar(14.0, 27.0), &trap_params(), &smp, None).unwrap();
    assert_eq!(run.metrics.outcome, Outcome::Success);
    let modes: Vec<_> = run.metrics.steps.iter().map(|s| s.mode).collect();
    assert!(modes.contains(&StepMode::Reverse));
    // left the box through its open south side
    assert!(run.trajectory.points.iter().any(|p| p.y < 14.0));
    assert!(run.trajectory.points.iter().all(|p| !w.is_occupied_true(p)));
    assert!(max_curvature(&run.trajectory) <= smp.max_curvature() * 1.05);
    assert!(run.metrics.steps.iter().all(|s| s.nodes_evaluated <= 13 * 13));
}

#[test]
fn reverse_steps_move_backwards() {
    let g = crate::fixtures::dead_corner();
    let mut w = load_map_2d(&g.to_text(), WorldConfig::default()).unwrap();
    let smp = AckermannSampler::symmetric(1.0, 1.0, 0.5, 5);
    let start = AckermannState::new(14.0, 17.0, std::f64::consts::FRAC_PI_2);
    let run = plan_ackermann(&mut w, &start, &Point3::planar(14.0, 27.0), &trap_params(), &smp, None).unwrap();
    let mut i = 0;
    for st in &run.metrics.steps {
        let j = i + st.executed;
        if st.mode == StepMode::Reverse && st.executed > 0 {
            let (a, b) = (run.trajectory.points[i], run.trajectory.points[j]);
            let th = run.trajectory.headings[i];
            let along = (b.x - a.x) * th.cos() + (b.y - a.y) * th.sin();
            assert!(along < 0.0, "reverse step moved forward by {along}");
        }
        i = j;
    }
}
