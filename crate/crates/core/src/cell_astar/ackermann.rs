//! Car-like variant: the search cell is replaced by a tree of constant-steering
//! arcs grown from the current pose (rear-axle reference).

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::geometry::{euclid_dist, heuristic_h, line_dist, LineRef, Point3};
use crate::run::{Outcome, PlanRun, RunMetrics, StepMode, StepRecord, Trajectory};
use crate::scalar::{normalize_angle, Real};
use crate::world::{Dimensionality, OccupancyWorld, SensorConfig};

use super::{PlanError, PlanParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AckermannState<T> {
    pub x: T,
    pub y: T,
    /// Yaw from the x-axis, in `(-pi, pi]`.
    pub theta: T,
    /// Motion direction, +1 forward or -1 reverse.
    pub d: i8,
}

impl<T: Real> AckermannState<T> {
    pub fn new(x: T, y: T, theta: T) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
            d: 1,
        }
    }

    pub fn position(&self) -> Point3<T> {
        Point3::planar(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AckermannSampler<T> {
    /// Arc length of one sample.
    pub l: T,
    pub steering_set: Vec<T>,
    pub wheelbase: T,
    pub delta_max: T,
    #[serde(default = "forward")]
    pub d: i8,
}

fn forward() -> i8 {
    1
}

impl<T: Real> AckermannSampler<T> {
    /// `count` steering angles evenly spread over `[-delta_max, delta_max]`.
    pub fn symmetric(l: T, wheelbase: T, delta_max: T, count: usize) -> Self {
        let steering_set = if count <= 1 {
            vec![T::zero()]
        } else {
            (0..count)
                .map(|i| {
                    let f = T::from_usize_lossy(i) / T::from_usize_lossy(count - 1);
                    -delta_max + (delta_max + delta_max) * f
                })
                .collect()
        };
        Self {
            l,
            steering_set,
            wheelbase,
            delta_max,
            d: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.l) {
            return Err(ParamError::new("l", "must be positive"));
        }
        if !pos(self.wheelbase) {
            return Err(ParamError::new("wheelbase", "must be positive"));
        }
        if !(self.delta_max >= T::zero() && self.delta_max < T::FRAC_PI_2()) {
            return Err(ParamError::new("delta_max", "must lie in [0, pi/2)"));
        }
        if self.steering_set.is_empty() {
            return Err(ParamError::new("steering_set", "must not be empty"));
        }
        if self.steering_set.iter().any(|s| !(s.abs() <= self.delta_max)) {
            return Err(ParamError::new("steering_set", "angle exceeds delta_max"));
        }
        if self.d != 1 && self.d != -1 {
            return Err(ParamError::new("d", "must be +1 or -1"));
        }
        Ok(())
    }

    /// Largest curvature the steering set can produce.
    pub fn max_curvature(&self) -> T {
        self.delta_max.tan() / self.wheelbase
    }
}

/// Pose after driving arc length `s` (in the direction `d`) at steering `delta`.
pub fn arc_pose<T: Real>(state: &AckermannState<T>, delta: T, wheelbase: T, d: i8, s: T) -> AckermannState<T> {
    let kappa = delta.tan() / wheelbase;
    let dir = if d >= 0 { T::one() } else { -T::one() };
    let ds = dir * s;
    let th = state.theta;
    let (x, y, theta) = if kappa.abs() < T::lit(1e-12) {
        (state.x + ds * th.cos(), state.y + ds * th.sin(), th)
    } else {
        let th1 = th + ds * kappa;
        (
            state.x + (th1.sin() - th.sin()) / kappa,
            state.y - (th1.cos() - th.cos()) / kappa,
            th1,
        )
    };
    AckermannState {
        x,
        y,
        theta: normalize_angle(theta),
        d: if d >= 0 { 1 } else { -1 },
    }
}

/// One terminal state per steering angle, each an arc of length `l`.
pub fn ackermann_expand<T: Real>(state: &AckermannState<T>, sampler: &AckermannSampler<T>) -> Vec<AckermannState<T>> {
    sampler
        .steering_set
        .iter()
        .map(|&delta| arc_pose(state, delta, sampler.wheelbase, sampler.d, sampler.l))
        .collect()
}

/// Arc poses at spacing no larger than `spacing`, excluding the start pose.
fn arc_samples<T: Real>(
    state: &AckermannState<T>,
    delta: T,
    sampler: &AckermannSampler<T>,
    spacing: T,
) -> Vec<AckermannState<T>> {
    let n = (sampler.l / spacing).ceil().as_f64().max(1.0) as usize;
    (1..=n)
        .map(|i| {
            let s = sampler.l * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            arc_pose(state, delta, sampler.wheelbase, sampler.d, s)
        })
        .collect()
}

/// Deepest tree the per-step budget allows: `sum_{k=1..N} |S|^k <= budget`.
pub fn max_depth(branching: usize, budget: usize) -> usize {
    let mut total = 0usize;
    let mut level = 1usize;
    let mut depth = 0;
    loop {
        level = level.saturating_mul(branching);
        total = total.saturating_add(level);
        if total > budget {
            return depth.max(1);
        }
        depth += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Normal,
    /// Forward sampling with the line term negated.
    Explore(usize),
    /// Reverse sampling, backing away from the last failure pose.
    Reverse(usize),
}

/// Learned additions to the goal term on square cells of side `2 l`. Values only grow,
/// so a pocket the agent keeps returning to ends up costlier than the way
/// around it.
struct Memory<T> {
    res: T,
    extra: HashMap<(i64, i64), T>,
}

impl<T: Real> Memory<T> {
    fn key(&self, p: &Point3<T>) -> (i64, i64) {
        let k = |v: T| (v / self.res).round().as_f64() as i64;
        (k(p.x), k(p.y))
    }

    fn get(&self, p: &Point3<T>) -> T {
        self.extra.get(&self.key(p)).copied().unwrap_or_else(T::zero)
    }

    fn raise(&mut self, p: &Point3<T>, value: T) {
        let e = self.extra.entry(self.key(p)).or_insert_with(T::zero);
        *e = e.max(value);
    }
}

/// Keep-out discs left where forward sampling failed. A disc does not
/// constrain an agent already inside it.
struct DeadEnds<T> {
    marks: Vec<Point3<T>>,
    radius: T,
}

impl<T: Real> DeadEnds<T> {
    fn blocks(&self, p: &Point3<T>, agent: &Point3<T>) -> bool {
        self.marks
            .iter()
            .any(|m| euclid_dist(p, m) <= self.radius && euclid_dist(agent, m) > self.radius)
    }
}

struct TreeNode<T> {
    parent: Option<usize>,
    state: AckermannState<T>,
    samples: Vec<AckermannState<T>>,
    cost: T,
}

struct StepResult<T> {
    chain: Vec<usize>,
    nodes: Vec<TreeNode<T>>,
    evaluated: usize,
    depth: usize,
    /// Some arc was rejected only because of a keep-out disc.
    disc_blocked: bool,
}

/// How leaves are scored in one step.
enum Score<'a, T> {
    /// Nodal cost; `negate` forces the line term negative, otherwise
    /// `use_sign` applies the corridor rule from the current pose.
    Goal { negate: bool, use_sign: bool },
    /// The leaf farthest from this pose wins.
    Away(&'a Point3<T>),
}

#[allow(clippy::too_many_arguments)]
fn grow<T: Real>(
    world: &OccupancyWorld<T>,
    root: &AckermannState<T>,
    line: &LineRef<T>,
    goal: &Point3<T>,
    params: &PlanParams<T>,
    sampler: &AckermannSampler<T>,
    depth: usize,
    score: &Score<'_, T>,
    memory: &Memory<T>,
    dead: &DeadEnds<T>,
) -> StepResult<T> {
    let local = root.position();
    let spacing = world.sample_spacing();
    let mut nodes: Vec<TreeNode<T>> = Vec::new();
    let mut frontier: Vec<Option<usize>> = vec![None];
    let mut evaluated = 0;
    let mut deepest: Vec<usize> = Vec::new();
    let mut reached = 0;
    let mut disc_blocked = false;
    for level in 1..=depth {
        let mut next = Vec::new();
        for parent in &frontier {
            let from = parent.map_or(*root, |i| nodes[i].state);
            for &delta in &sampler.steering_set {
                evaluated += 1;
                let samples = arc_samples(&from, delta, sampler, spacing);
                if samples.iter().any(|s| world.is_occupied(&s.position())) {
                    continue;
                }
                if sampler.d > 0 && samples.iter().any(|s| dead.blocks(&s.position(), &local)) {
                    disc_blocked = true;
                    continue;
                }
                let end = *samples.last().expect("arc has samples");
                let p = end.position();
                let cost = match *score {
                    Score::Away(stuck) => -euclid_dist(&p, stuck),
                    Score::Goal { negate, use_sign } => {
                        let sign = if negate || (use_sign && !world.segment_clear(&local, &p)) {
                            -T::one()
                        } else {
                            T::one()
                        };
                        params.w1 * heuristic_h(&p, goal)
                            + sign * params.w2 * line_dist(&p, line)
                            + params.w_g * euclid_dist(&p, &local)
                            + memory.get(&p)
                    }
                };
                nodes.push(TreeNode {
                    parent: *parent,
                    state: end,
                    samples,
                    cost,
                });
                next.push(Some(nodes.len() - 1));
            }
        }
        if next.is_empty() {
            break;
        }
        reached = level;
        deepest = next.iter().map(|n| n.expect("child index")).collect();
        frontier = next;
    }
    let mut chain = Vec::new();
    let best = deepest.iter().copied().min_by(|&a, &b| {
        nodes[a]
            .cost
            .partial_cmp(&nodes[b].cost)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut cur = best;
    while let Some(i) = cur {
        chain.push(i);
        cur = nodes[i].parent;
    }
    chain.reverse();
    StepResult {
        chain,
        nodes,
        evaluated,
        depth: reached,
        disc_blocked,
    }
}

/// Receding-horizon planning for a car-like agent on a 2-D world.
///
/// Far from obstacles a single layer of arcs is sampled; when the straight
/// segment to the goal meets an obstacle within `avoidance_range`, the tree
/// is grown to the deepest level the per-step budget (`cellsize_max^2`
/// nodes) allows and the cheapest deepest leaf wins. The first half of the
/// winning chain is executed.
///
/// When no arc is viable the agent samples forward with the line term
/// negated for `k_explore` steps, then backs away from the failure pose for
/// `k_explore` steps, then explores forward again. Failure poses become
/// keep-out discs of radius `3 l` for forward sampling, and every forward
/// step raises a learned cost on the cell it leaves (real-time heuristic
/// learning), so pockets stop attracting the agent after a few visits.
/// Three failed steps in a row end the run as stuck.
pub fn plan_ackermann<T: Real>(
    world: &mut OccupancyWorld<T>,
    start: &AckermannState<T>,
    goal: &Point3<T>,
    params: &PlanParams<T>,
    sampler: &AckermannSampler<T>,
    sensor: Option<&SensorConfig<T>>,
) -> Result<PlanRun<T>, PlanError<T>> {
    params.validate()?;
    sampler.validate()?;
    if world.dimensionality() != Dimensionality::Two {
        return Err(ParamError::new("world", "car-like planning needs a 2-D world").into());
    }
    let start_p = start.position();
    if world.is_occupied_true(&start_p) {
        return Err(ParamError::new("start", "lies inside an obstacle").into());
    }
    if world.is_occupied_true(goal) {
        return Err(ParamError::new("goal", "lies inside an obstacle").into());
    }
    let clock = Instant::now();
    let res = world.resolution();
    let line = LineRef::new(start_p, *goal);
    let budget = params.cellsize_max * params.cellsize_max;
    let full_depth = max_depth(sampler.steering_set.len(), budget);
    let k = params.k_explore.max(1);

    let mut traj = Trajectory::new();
    let mut steps = Vec::new();
    let mut pose = AckermannState { d: 1, ..*start };
    let mut phase = Phase::Normal;
    let mut stalled = 0;
    let mut stuck_at = start_p;
    let mut memory = Memory {
        res: sampler.l + sampler.l,
        extra: HashMap::new(),
    };
    let mut dead = DeadEnds {
        marks: Vec::new(),
        radius: sampler.l * T::lit(3.0),
    };
    let h = |p: &Point3<T>, m: &Memory<T>| params.w1 * heuristic_h(p, goal) + m.get(p);

    let finish = |outcome, traj: Trajectory<T>, steps, clock: Instant| PlanRun {
        metrics: RunMetrics::from_steps(outcome, &traj, steps, res, clock.elapsed().as_secs_f64()),
        trajectory: traj,
    };

    while euclid_dist(&pose.position(), goal) > params.goal_tolerance {
        if steps.len() >= params.max_steps {
            let run = finish(Outcome::Timeout, traj, steps, clock);
            let detail = format!("max_steps {} exhausted", params.max_steps);
            return Ok(PlanRun {
                metrics: run.metrics.with_detail(detail),
                ..run
            });
        }
        let p = pose.position();
        if let Some(s) = sensor {
            world.reveal(&p, s);
        }
        let near = world
            .nearest_obstacle_within(&[*goal], &p, params.avoidance_range)
            .is_some();
        let (dir, score) = match phase {
            Phase::Normal => (
                1,
                Score::Goal {
                    negate: false,
                    use_sign: near,
                },
            ),
            Phase::Explore(_) => (
                1,
                Score::Goal {
                    negate: true,
                    use_sign: near,
                },
            ),
            Phase::Reverse(_) => (-1, Score::Away(&stuck_at)),
        };
        let depth = if near || phase != Phase::Normal { full_depth } else { 1 };
        let step_sampler = AckermannSampler {
            d: dir,
            ..sampler.clone()
        };
        let r = grow(
            world,
            &pose,
            &line,
            goal,
            params,
            &step_sampler,
            depth,
            &score,
            &memory,
            &dead,
        );

        let mut record = StepRecord {
            mode: match phase {
                Phase::Normal => StepMode::Kinematic,
                Phase::Explore(_) => StepMode::Explore,
                Phase::Reverse(_) => StepMode::Reverse,
            },
            center: [p.x.as_f64(), p.y.as_f64(), 0.0],
            cellsize: r.depth,
            spacing: sampler.l.as_f64(),
            nodes_evaluated: r.evaluated,
            executed: 0,
        };
        if r.chain.is_empty() {
            steps.push(record);
            if r.disc_blocked {
                // Nearby discs boxed the agent in; forget them rather than give up.
                let reach = dead.radius + sampler.l * T::from_usize_lossy(depth);
                dead.marks.retain(|m| euclid_dist(m, &p) > reach);
                continue;
            }
            stalled += 1;
            // Forward, exploratory and reverse sampling all failed here.
            if stalled >= 3 {
                let partial = finish(Outcome::Failed, traj, steps, clock);
                return Err(PlanError::Stuck {
                    at: p,
                    attempted: vec![depth],
                    partial: Box::new(partial),
                });
            }
            if dir > 0 {
                stuck_at = p;
                dead.marks.push(p);
            }
            phase = match phase {
                Phase::Normal => Phase::Explore(k),
                Phase::Explore(_) => Phase::Reverse(k),
                Phase::Reverse(_) => Phase::Explore(k),
            };
            continue;
        }
        stalled = 0;

        if dir > 0 {
            // h(s) <- max(h(s), c(s, leaf) + h(leaf)).
            let leaf = r.nodes[*r.chain.last().expect("non-empty chain")].state.position();
            let travel = sampler.l * T::from_usize_lossy(r.chain.len());
            let target = params.w1 * travel + h(&leaf, &memory) - params.w1 * heuristic_h(&p, goal);
            memory.raise(&p, target);
        }

        if traj.is_empty() {
            traj.points.push(start_p);
            traj.headings.push(start.theta);
        }
        let take = r.chain.len().div_ceil(2);
        'exec: for &i in &r.chain[..take] {
            for s in &r.nodes[i].samples {
                traj.points.push(s.position());
                traj.headings.push(s.theta);
                record.executed += 1;
                pose = *s;
                if euclid_dist(&pose.position(), goal) <= params.goal_tolerance {
                    break 'exec;
                }
            }
        }
        steps.push(record);
        phase = match phase {
            Phase::Normal => Phase::Normal,
            Phase::Explore(n) if n > 1 => Phase::Explore(n - 1),
            Phase::Explore(_) => Phase::Normal,
            Phase::Reverse(n) if n > 1 => Phase::Reverse(n - 1),
            Phase::Reverse(_) => Phase::Explore(k),
        };
    }
    Ok(finish(Outcome::Success, traj, steps, clock))
}

/// Largest `|dtheta| / ds` between consecutive trajectory points.
pub fn max_curvature<T: Real>(traj: &Trajectory<T>) -> T {
    let mut worst = T::zero();
    for i in 1..traj.points.len().min(traj.headings.len()) {
        let ds = euclid_dist(&traj.points[i - 1], &traj.points[i]);
        if ds > T::zero() {
            let dth = normalize_angle(traj.headings[i] - traj.headings[i - 1]).abs();
            worst = worst.max(dth / ds);
        }
    }
    worst
}

#[cfg(test)]
mod tests;
