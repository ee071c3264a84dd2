//! Node evaluation and per-layer waypoint selection inside one search cell.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::geometry::{heuristic_h, line_dist, LineRef, Point3};
use crate::scalar::Real;
use crate::world::OccupancyWorld;

use super::cell::{Offset, SearchCell};
use super::params::{PlanParams, SignRule};

/// Sign of the line term for `node` seen from `p_t` under the corridor rule:
/// +1 iff the node is free and the straight segment from `p_t` is clear.
pub fn safe_to_pass<T: Real>(world: &OccupancyWorld<T>, p_t: &Point3<T>, node: &Point3<T>) -> i8 {
    if !world.is_occupied(node) && world.segment_clear(p_t, node) {
        1
    } else {
        -1
    }
}

/// `w1 * H + sign * w2 * L`, with `L` measured to the start-goal line.
pub fn node_cost<T: Real>(node: &Point3<T>, start: &Point3<T>, goal: &Point3<T>, w1: T, w2: T, sign: i8) -> T {
    let h = heuristic_h(node, goal);
    let l = line_dist(node, &LineRef::new(*start, *goal));
    let s = if sign >= 0 { T::one() } else { -T::one() };
    w1 * h + s * w2 * l
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellPath<T> {
    pub waypoints: Vec<Point3<T>>,
    pub costs: Vec<T>,
    pub offsets: Vec<Offset>,
}

impl<T> CellPath<T> {
    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NodeEval<T> {
    pub free: bool,
    pub cost: T,
}

/// Which sign a selection applies to the line term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SignMode {
    AlwaysPositive,
    Rule(SignRule),
}

/// Lazily evaluates nodes of the cells centered on one position at one
/// spacing. Cells of different sizes share the memo, so escalating the cell
/// size never evaluates a node twice.
pub(crate) struct Evaluator<'w, T: Real> {
    world: &'w OccupancyWorld<T>,
    center: Point3<T>,
    start: Point3<T>,
    goal: Point3<T>,
    w1: T,
    w2: T,
    sign: SignMode,
    nodes: HashMap<Offset, NodeEval<T>>,
    corridors: HashMap<Offset, bool>,
    edges: HashMap<(Offset, Offset), bool>,
}

impl<'w, T: Real> Evaluator<'w, T> {
    pub fn new(
        world: &'w OccupancyWorld<T>,
        center: Point3<T>,
        start: Point3<T>,
        goal: Point3<T>,
        w1: T,
        w2: T,
        sign: SignMode,
    ) -> Self {
        Self {
            world,
            center,
            start,
            goal,
            w1,
            w2,
            sign,
            nodes: HashMap::new(),
            corridors: HashMap::new(),
            edges: HashMap::new(),
        }
    }

    /// Distinct nodes whose cost has been computed.
    pub fn evaluated(&self) -> usize {
        self.nodes.len()
    }

    pub fn eval(&mut self, cell: &SearchCell<T>, off: Offset) -> NodeEval<T> {
        if let Some(e) = self.nodes.get(&off) {
            return *e;
        }
        let pos = cell.position(&off);
        let free = !self.world.is_occupied(&pos);
        let sign = match self.sign {
            SignMode::AlwaysPositive => 1,
            SignMode::Rule(SignRule::Membership) => {
                if free {
                    1
                } else {
                    -1
                }
            }
            SignMode::Rule(SignRule::Corridor) => {
                if free && self.corridor(cell, off) {
                    1
                } else {
                    -1
                }
            }
        };
        let e = NodeEval {
            free,
            cost: node_cost(&pos, &self.start, &self.goal, self.w1, self.w2, sign),
        };
        self.nodes.insert(off, e);
        e
    }

    /// Straight segment from the cell center to the node is clear.
    fn corridor(&mut self, cell: &SearchCell<T>, off: Offset) -> bool {
        if let Some(&c) = self.corridors.get(&off) {
            return c;
        }
        let c = self.world.segment_clear(&self.center, &cell.position(&off));
        self.corridors.insert(off, c);
        c
    }

    fn edge(&mut self, cell: &SearchCell<T>, a: Offset, b: Offset) -> bool {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&c) = self.edges.get(&key) {
            return c;
        }
        let c = self.world.segment_clear(&cell.position(&a), &cell.position(&b));
        self.edges.insert(key, c);
        c
    }
}

/// Layer range a selection walks and how many waypoints may come out of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LayerPlan {
    /// Include the slice through the center before the forward slices.
    pub lateral: bool,
    /// Number of forward slices, 1..=half.
    pub forward: i64,
}

impl LayerPlan {
    /// Forward slices needed to reach the goal along the dominant axis, capped
    /// by the cell.
    pub fn toward<T: Real>(cell: &SearchCell<T>, goal: &Point3<T>, lateral: bool) -> Self {
        let along = (goal.axis(cell.axis) - cell.center.axis(cell.axis)).abs();
        let need = (along / cell.gridsize - T::lit(1e-9)).ceil().as_f64().max(1.0) as i64;
        Self {
            lateral,
            forward: need.min(cell.half()),
        }
    }

    fn layers(&self) -> Vec<i64> {
        let first = if self.lateral { 0 } else { 1 };
        (first..=self.forward).collect()
    }
}

fn key_cmp<T: Real>(a: (T, i64, Offset), b: (T, i64, Offset)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.cmp(&b.1))
        .then(a.2.cmp(&b.2))
}

/// Picks one node per layer.
///
/// A chain is feasible when every node is free, every consecutive pair
/// (starting from the center) is joined by a clear segment, and consecutive
/// chosen nodes satisfy the continuity constraint. Among feasible chains the
/// result minimizes the per-layer key `(cost, deviation, offset)` of the
/// farthest layer first, then of each nearer layer given the later choice, so
/// the chain commits to its far end before deciding where to turn.
pub(crate) fn select_layers<T: Real>(
    cell: &SearchCell<T>,
    eval: &mut Evaluator<'_, T>,
    plan: LayerPlan,
) -> CellPath<T> {
    let layers = plan.layers();
    let center: Offset = [0, 0, 0];

    // Forward pass: nodes reachable by some feasible prefix.
    let mut reach: Vec<Vec<Offset>> = Vec::with_capacity(layers.len());
    for (i, &layer) in layers.iter().enumerate() {
        let mut here = Vec::new();
        for node in cell.layer(layer) {
            let off = node.offset;
            if !eval.eval(cell, off).free {
                continue;
            }
            let ok = if i == 0 {
                eval.edge(cell, center, off)
            } else {
                let mut any = false;
                for &prev in &reach[i - 1] {
                    if cell.continuous(&prev, &off) && eval.edge(cell, prev, off) {
                        any = true;
                        break;
                    }
                }
                any
            };
            if ok {
                here.push(off);
            }
        }
        if here.is_empty() {
            return CellPath::default();
        }
        reach.push(here);
    }

    // Backward pass: commit to the far end, then walk back.
    let mut chain: Vec<Offset> = Vec::with_capacity(layers.len());
    let mut next: Option<Offset> = None;
    for i in (0..layers.len()).rev() {
        let mut best: Option<(T, i64, Offset)> = None;
        for &off in &reach[i] {
            if let Some(n) = next {
                if !(cell.continuous(&off, &n) && eval.edge(cell, off, n)) {
                    continue;
                }
            }
            let k = (eval.eval(cell, off).cost, cell.deviation(&off), off);
            if best.is_none_or(|b| key_cmp(k, b) == Ordering::Less) {
                best = Some(k);
            }
        }
        let (_, _, off) = best.expect("reachable node has a compatible predecessor");
        chain.push(off);
        next = Some(off);
    }
    chain.reverse();

    let limit = cell.cellsize - 1;
    let mut path = CellPath::default();
    for off in chain.into_iter().filter(|o| *o != center).take(limit) {
        path.waypoints.push(cell.position(&off));
        path.costs.push(eval.eval(cell, off).cost);
        path.offsets.push(off);
    }
    path
}

/// Avoidance-mode selection on a single cell: lateral plus forward slices,
/// signs per `params.sign_rule`.
pub fn select_cell_path<T: Real>(
    cell: &SearchCell<T>,
    world: &OccupancyWorld<T>,
    start: &Point3<T>,
    goal: &Point3<T>,
    params: &PlanParams<T>,
) -> CellPath<T> {
    let mut eval = Evaluator::new(
        world,
        cell.center,
        *start,
        *goal,
        params.w1,
        params.w2,
        SignMode::Rule(params.sign_rule),
    );
    select_layers(cell, &mut eval, LayerPlan::toward(cell, goal, true))
}
