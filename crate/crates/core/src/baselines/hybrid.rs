//! Local Hybrid A*: a best-first search capped at a fixed number of
//! expansions per replanning call, executed in a receding-horizon loop.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cell_astar::ackermann::{arc_pose, AckermannSampler, AckermannState};
use crate::error::ParamError;
use crate::geometry::{check_unit_weight, euclid_dist, Point3};
use crate::run::{Outcome, PlanRun, RunMetrics, StepMode, StepRecord, Trajectory};
use crate::scalar::{normalize_angle, Real};
use crate::world::{Dimensionality, OccupancyWorld, SensorConfig};

/// How successors are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Motion<T> {
    /// Constant-steering arcs, forward and reverse (2-D only).
    Ackermann(AckermannSampler<T>),
    /// Axis-aligned moves of length `step`: 4 neighbors in 2-D, 6 in 3-D.
    Lattice { step: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct HybridAStarParams<T> {
    /// Weight of the distance-travelled term in the priority.
    pub w_g: T,
    /// Maximum expansions per replanning call.
    pub step_budget: usize,
    pub motion: Motion<T>,
    pub goal_tolerance: T,
    pub max_steps: usize,
    /// Position bucket edge for duplicate detection.
    pub position_bucket: T,
    /// Heading bucket width for duplicate detection, in degrees.
    #[serde(default = "default_heading_bucket")]
    pub heading_bucket_deg: T,
    /// An executed bucket visited more often than this means the agent is trapped.
    #[serde(default = "default_loop_threshold")]
    pub loop_threshold: usize,
    /// Motions executed per replanning call when the goal was not found.
    #[serde(default = "default_exec_motions")]
    pub exec_motions: usize,
}

fn default_heading_bucket<T: Real>() -> T {
    T::lit(10.0)
}

fn default_loop_threshold() -> usize {
    3
}

fn default_exec_motions() -> usize {
    2
}

impl<T: Real> HybridAStarParams<T> {
    pub fn lattice(step: T, step_budget: usize) -> Self {
        Self {
            w_g: T::lit(0.5),
            step_budget,
            motion: Motion::Lattice { step },
            goal_tolerance: step / T::lit(2.0),
            max_steps: 1000,
            position_bucket: step,
            heading_bucket_deg: default_heading_bucket(),
            loop_threshold: default_loop_threshold(),
            exec_motions: default_exec_motions(),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        check_unit_weight(self.w_g)?;
        if self.step_budget == 0 {
            return Err(ParamError::new("step_budget", "must be positive"));
        }
        match &self.motion {
            Motion::Ackermann(s) => s.validate()?,
            Motion::Lattice { step } => {
                if !(*step > T::zero() && step.is_finite()) {
                    return Err(ParamError::new("step", "must be positive"));
                }
            }
        }
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.goal_tolerance) {
            return Err(ParamError::new("goal_tolerance", "must be positive"));
        }
        if !pos(self.position_bucket) {
            return Err(ParamError::new("position_bucket", "must be positive"));
        }
        if !pos(self.heading_bucket_deg) {
            return Err(ParamError::new("heading_bucket_deg", "must be positive"));
        }
        if self.max_steps == 0 {
            return Err(ParamError::new("max_steps", "must be positive"));
        }
        if self.loop_threshold == 0 {
            return Err(ParamError::new("loop_threshold", "must be positive"));
        }
        if self.exec_motions == 0 {
            return Err(ParamError::new("exec_motions", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pose<T> {
    p: Point3<T>,
    theta: T,
}

type Bucket = (i64, i64, i64, i64);

fn bucket<T: Real>(pose: &Pose<T>, params: &HybridAStarParams<T>, with_heading: bool) -> Bucket {
    let b = params.position_bucket;
    let f = |v: T| (v / b).floor().as_f64() as i64;
    let h = if with_heading {
        let w = params.heading_bucket_deg.to_radians();
        ((normalize_angle(pose.theta) + T::PI()) / w).floor().as_f64() as i64
    } else {
        0
    };
    (f(pose.p.x), f(pose.p.y), f(pose.p.z), h)
}

struct SearchNode<T> {
    parent: Option<usize>,
    pose: Pose<T>,
    /// Samples of the motion from the parent, ending at `pose`.
    samples: Vec<Pose<T>>,
    g: T,
    priority: T,
}

#[derive(Debug, Clone, Copy)]
struct Queued<T> {
    priority: T,
    id: usize,
}

impl<T: Real> PartialEq for Queued<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T: Real> Eq for Queued<T> {}
impl<T: Real> PartialOrd for Queued<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T: Real> Ord for Queued<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.priority
            .partial_cmp(&o.priority)
            .unwrap_or(Ordering::Equal)
            .then(self.id.cmp(&o.id))
    }
}

/// Collision-checked successors of `pose`.
fn successors<T: Real>(world: &OccupancyWorld<T>, pose: &Pose<T>, motion: &Motion<T>) -> Vec<(Vec<Pose<T>>, T)> {
    let spacing = world.sample_spacing();
    let mut out = Vec::new();
    match motion {
        Motion::Ackermann(s) => {
            let n = (s.l / spacing).ceil().as_f64().max(1.0) as usize;
            for d in [1i8, -1] {
                for &delta in &s.steering_set {
                    let st = AckermannState {
                        x: pose.p.x,
                        y: pose.p.y,
                        theta: pose.theta,
                        d,
                    };
                    let samples: Vec<Pose<T>> = (1..=n)
                        .map(|i| {
                            let e = arc_pose(
                                &st,
                                delta,
                                s.wheelbase,
                                d,
                                s.l * T::from_usize_lossy(i) / T::from_usize_lossy(n),
                            );
                            Pose {
                                p: e.position(),
                                theta: e.theta,
                            }
                        })
                        .collect();
                    if samples.iter().all(|q| !world.is_occupied(&q.p)) {
                        out.push((samples, s.l));
                    }
                }
            }
        }
        Motion::Lattice { step } => {
            let axes = world.dimensionality().count();
            for axis in 0..axes {
                for sign in [T::one(), -T::one()] {
                    let q = pose.p.with_axis(axis, pose.p.axis(axis) + sign * *step);
                    if !world.is_occupied(&q) && world.segment_clear(&pose.p, &q) {
                        out.push((
                            vec![Pose {
                                p: q,
                                theta: pose.theta,
                            }],
                            *step,
                        ));
                    }
                }
            }
        }
    }
    out
}

struct Search<T> {
    nodes: Vec<SearchNode<T>>,
    expansions: usize,
    /// Node within goal tolerance, if one was generated.
    goal: Option<usize>,
}

fn search<T: Real>(
    world: &OccupancyWorld<T>,
    root: Pose<T>,
    g0: T,
    goal: &Point3<T>,
    params: &HybridAStarParams<T>,
) -> Search<T> {
    let with_heading = matches!(params.motion, Motion::Ackermann(_));
    let prio = |p: &Point3<T>, g: T| euclid_dist(p, goal) + params.w_g * g;
    let mut nodes = vec![SearchNode {
        parent: None,
        pose: root,
        samples: Vec::new(),
        g: g0,
        priority: prio(&root.p, g0),
    }];
    let mut open = BinaryHeap::new();
    open.push(Reverse(Queued {
        priority: nodes[0].priority,
        id: 0,
    }));
    let mut closed: HashMap<Bucket, ()> = HashMap::new();
    let mut expansions = 0;
    while expansions < params.step_budget {
        let Some(Reverse(Queued { id, .. })) = open.pop() else {
            break;
        };
        let pose = nodes[id].pose;
        if closed.insert(bucket(&pose, params, with_heading), ()).is_some() {
            continue;
        }
        expansions += 1;
        for (samples, len) in successors(world, &pose, &params.motion) {
            let end = *samples.last().expect("motion has samples");
            let g = nodes[id].g + len;
            nodes.push(SearchNode {
                parent: Some(id),
                pose: end,
                samples,
                g,
                priority: prio(&end.p, g),
            });
            let child = nodes.len() - 1;
            if euclid_dist(&end.p, goal) <= params.goal_tolerance {
                return Search {
                    nodes,
                    expansions,
                    goal: Some(child),
                };
            }
            if !closed.contains_key(&bucket(&end, params, with_heading)) {
                open.push(Reverse(Queued {
                    priority: nodes[child].priority,
                    id: child,
                }));
            }
        }
    }
    Search {
        nodes,
        expansions,
        goal: None,
    }
}

/// Budget-limited Hybrid A* in a receding-horizon loop.
///
/// Each call expands at most `step_budget` states from the current pose. If a
/// state within goal tolerance was generated the whole path to it is
/// executed; otherwise the agent moves `exec_motions` motions toward the
/// generated state of best priority. The run fails once any executed state
/// bucket has been entered more than `loop_threshold` times, when a search
/// produces no successor, or when `max_steps` calls have been spent.
pub fn hybrid_astar_plan<T: Real>(
    world: &mut OccupancyWorld<T>,
    start: &Point3<T>,
    heading: T,
    goal: &Point3<T>,
    params: &HybridAStarParams<T>,
    sensor: Option<&SensorConfig<T>>,
) -> Result<PlanRun<T>, ParamError> {
    params.validate()?;
    if matches!(params.motion, Motion::Ackermann(_)) && world.dimensionality() != Dimensionality::Two {
        return Err(ParamError::new("motion", "car-like motion needs a 2-D world"));
    }
    if world.is_occupied_true(start) {
        return Err(ParamError::new("start", "lies inside an obstacle"));
    }
    if world.is_occupied_true(goal) {
        return Err(ParamError::new("goal", "lies inside an obstacle"));
    }
    let with_heading = matches!(params.motion, Motion::Ackermann(_));
    let clock = Instant::now();
    let res = world.resolution();
    let mut traj = Trajectory::new();
    let mut steps = Vec::new();
    let mut pose = Pose {
        p: *start,
        theta: normalize_angle(heading),
    };
    let mut travelled = T::zero();
    let mut visits: HashMap<Bucket, usize> = HashMap::new();
    let mut detail = None;

    let outcome = loop {
        if euclid_dist(&pose.p, goal) <= params.goal_tolerance {
            break Outcome::Success;
        }
        if steps.len() >= params.max_steps {
            detail = Some(format!("max_steps {} exhausted", params.max_steps));
            break Outcome::Failed;
        }
        if let Some(s) = sensor {
            world.reveal(&pose.p, s);
        }
        let found = search(world, pose, travelled, goal, params);
        let mut record = StepRecord {
            mode: StepMode::Search,
            center: [pose.p.x.as_f64(), pose.p.y.as_f64(), pose.p.z.as_f64()],
            cellsize: params.step_budget,
            spacing: match &params.motion {
                Motion::Ackermann(s) => s.l.as_f64(),
                Motion::Lattice { step } => step.as_f64(),
            },
            nodes_evaluated: found.expansions,
            executed: 0,
        };
        let target = found.goal.or_else(|| {
            (1..found.nodes.len()).min_by(|&a, &b| {
                found.nodes[a]
                    .priority
                    .partial_cmp(&found.nodes[b].priority)
                    .unwrap_or(Ordering::Equal)
                    .then(a.cmp(&b))
            })
        });
        let Some(target) = target else {
            steps.push(record);
            detail = Some(format!(
                "no successor at ({:.2}, {:.2})",
                pose.p.x.as_f64(),
                pose.p.y.as_f64()
            ));
            break Outcome::Failed;
        };
        let mut chain = Vec::new();
        let mut cur = Some(target);
        while let Some(i) = cur {
            if found.nodes[i].parent.is_some() {
                chain.push(i);
            }
            cur = found.nodes[i].parent;
        }
        chain.reverse();
        if found.goal.is_none() {
            chain.truncate(params.exec_motions);
        }
        if traj.is_empty() {
            traj.points.push(pose.p);
            traj.headings.push(pose.theta);
        }
        let mut trapped = false;
        for &i in &chain {
            let node = &found.nodes[i];
            for s in &node.samples {
                traj.points.push(s.p);
                traj.headings.push(s.theta);
                record.executed += 1;
            }
            pose = node.pose;
            travelled = node.g;
            let count = visits.entry(bucket(&pose, params, with_heading)).or_insert(0);
            *count += 1;
            if *count > params.loop_threshold {
                trapped = true;
                break;
            }
        }
        steps.push(record);
        if trapped {
            detail = Some(format!(
                "trapped near ({:.2}, {:.2})",
                pose.p.x.as_f64(),
                pose.p.y.as_f64()
            ));
            break Outcome::Failed;
        }
    };
    let mut metrics = RunMetrics::from_steps(outcome, &traj, steps, res, clock.elapsed().as_secs_f64());
    metrics.detail = detail;
    Ok(PlanRun {
        trajectory: traj,
        metrics,
    })
}
