//! D* Lite on an 8-connected grid, searching backward from the goal so that
//! agent moves only shift the heuristic origin.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::ParamError;
use crate::run::{Outcome, PlanRun, RunMetrics, StepMode, StepRecord, Trajectory};
use crate::scalar::Real;
use crate::world::{OccupancyWorld, SensorConfig};

use super::cost::{Ext, PathCost};
use super::grid::{octile, Cell, Entry, GridGraph, KeyOrder};

type Key<C> = (Ext<C>, Ext<C>);

impl<C: PathCost> KeyOrder for Key<C> {
    fn key_cmp(&self, o: &Self) -> Ordering {
        self.0.order(&o.0).then(self.1.order(&o.1))
    }
}

#[derive(Debug, Clone)]
pub struct DStarLite<C: PathCost> {
    graph: GridGraph,
    start: Cell,
    goal: Cell,
    last: Cell,
    km: C,
    g: Vec<Ext<C>>,
    rhs: Vec<Ext<C>>,
    /// Current key of every queued cell; heap entries with another key are stale.
    queued: Vec<Option<Key<C>>>,
    heap: BinaryHeap<Reverse<Entry<Key<C>>>>,
}

impl<C: PathCost> DStarLite<C> {
    pub fn new(graph: GridGraph, start: Cell, goal: Cell) -> Self {
        let n = graph.len();
        let mut s = Self {
            graph,
            start,
            goal,
            last: start,
            km: C::zero(),
            g: vec![Ext::Inf; n],
            rhs: vec![Ext::Inf; n],
            queued: vec![None; n],
            heap: BinaryHeap::new(),
        };
        let gi = s.graph.index(goal);
        s.rhs[gi] = Ext::Fin(C::zero());
        let k = s.key(goal);
        s.push(gi, k);
        s
    }

    pub fn graph(&self) -> &GridGraph {
        &self.graph
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    /// Cost from the current start to the goal after the last
    /// [`compute_shortest_path`](Self::compute_shortest_path).
    pub fn start_cost(&self) -> Option<C> {
        self.g[self.graph.index(self.start)].finite()
    }

    fn key(&self, c: Cell) -> Key<C> {
        let i = self.graph.index(c);
        let m = self.g[i].min(self.rhs[i]);
        (m.plus(octile::<C>(self.start, c)).plus(self.km), m)
    }

    fn push(&mut self, i: usize, key: Key<C>) {
        self.queued[i] = Some(key);
        self.heap.push(Reverse(Entry { key, index: i }));
    }

    /// Drops stale heap entries and returns the live top.
    fn top(&mut self) -> Option<(Key<C>, usize)> {
        while let Some(Reverse(e)) = self.heap.peek() {
            match self.queued[e.index] {
                Some(k) if k.key_cmp(&e.key) == Ordering::Equal => return Some((e.key, e.index)),
                _ => {
                    self.heap.pop();
                }
            }
        }
        None
    }

    fn update_vertex(&mut self, c: Cell) {
        let i = self.graph.index(c);
        if c != self.goal {
            let mut best = Ext::Inf;
            for (n, w) in self.graph.successors::<C>(c) {
                best = best.min(self.g[self.graph.index(n)].plus(w));
            }
            self.rhs[i] = best;
        }
        self.queued[i] = None;
        if self.g[i] != self.rhs[i] {
            let k = self.key(c);
            self.push(i, k);
        }
    }

    /// Returns the number of cells expanded.
    pub fn compute_shortest_path(&mut self) -> usize {
        let mut expanded = 0;
        loop {
            let si = self.graph.index(self.start);
            let start_key = self.key(self.start);
            let Some((k_old, i)) = self.top() else { break };
            if k_old.key_cmp(&start_key) != Ordering::Less && self.rhs[si] == self.g[si] {
                break;
            }
            let u = self.graph.cell(i);
            let k_new = self.key(u);
            if k_old.key_cmp(&k_new) == Ordering::Less {
                self.push(i, k_new);
                continue;
            }
            expanded += 1;
            self.queued[i] = None;
            if self.g[i].order(&self.rhs[i]) == Ordering::Greater {
                self.g[i] = self.rhs[i];
                for n in self.graph.neighbors(u).collect::<Vec<_>>() {
                    self.update_vertex(n);
                }
            } else {
                self.g[i] = Ext::Inf;
                self.update_vertex(u);
                for n in self.graph.neighbors(u).collect::<Vec<_>>() {
                    self.update_vertex(n);
                }
            }
        }
        expanded
    }

    /// Cheapest successor of the start under the current g-values.
    pub fn next_move(&self) -> Option<(Cell, C)> {
        let mut best: Option<(Ext<C>, Cell, C)> = None;
        for (n, w) in self.graph.successors::<C>(self.start) {
            let total = self.g[self.graph.index(n)].plus(w);
            if total.is_inf() {
                continue;
            }
            if best.is_none_or(|b| total.order(&b.0) == Ordering::Less) {
                best = Some((total, n, w));
            }
        }
        best.map(|(_, n, w)| (n, w))
    }

    pub fn advance(&mut self, to: Cell) {
        self.start = to;
    }

    /// Applies occupancy changes and repairs the affected vertices.
    pub fn update_cells(&mut self, changes: &[(Cell, bool)]) {
        if changes.is_empty() {
            return;
        }
        self.km = self.km + octile::<C>(self.last, self.start);
        self.last = self.start;
        let mut touched = Vec::new();
        for &(c, b) in changes {
            self.graph.set_blocked(c, b);
            touched.push(c);
            touched.extend(self.graph.neighbors(c));
        }
        touched.sort_unstable_by_key(|&c| self.graph.index(c));
        touched.dedup();
        for c in touched {
            self.update_vertex(c);
        }
    }
}

/// Result of a grid run: what was executed and at what exact cost.
#[derive(Debug, Clone)]
pub struct GridPlan<T, C> {
    pub run: PlanRun<T>,
    pub cells: Vec<Cell>,
    /// Cost of the executed path; `None` when the goal was not reached.
    pub cost: Option<C>,
}

/// Moves from `start` to `goal` on the world's grid, replanning whenever the
/// sensor reveals cells that change the known map.
pub fn dstar_lite_plan<T: Real, C: PathCost>(
    world: &mut OccupancyWorld<T>,
    start: Cell,
    goal: Cell,
    sensor: Option<&SensorConfig<T>>,
) -> Result<GridPlan<T, C>, ParamError> {
    let (w, h) = world
        .grid_dims()
        .ok_or_else(|| ParamError::new("world", "grid search needs a 2-D grid world"))?;
    for (name, c) in [("start", start), ("goal", goal)] {
        if c.0 >= w || c.1 >= h {
            return Err(ParamError::new(name, "cell lies outside the grid"));
        }
        if world.is_occupied_true(&world.cell_center(c.0, c.1)) {
            return Err(ParamError::new(name, "cell is occupied"));
        }
    }
    let clock = Instant::now();
    let res = world.resolution();
    if let Some(s) = sensor {
        world.reveal(&world.cell_center(start.0, start.1), s);
    }
    let graph = GridGraph::from_world(world).expect("grid world");
    let mut search = DStarLite::<C>::new(graph, start, goal);
    let mut traj = Trajectory::new();
    let mut cells = vec![start];
    let mut steps = Vec::new();
    let mut cost = C::zero();
    let mut pending = search.compute_shortest_path();
    let max_moves = 4 * w * h;

    let outcome = loop {
        if search.start() == goal {
            break Outcome::Success;
        }
        if steps.len() >= max_moves {
            break Outcome::Timeout;
        }
        let here = search.start();
        let center = world.cell_center(here.0, here.1);
        let mut record = StepRecord {
            mode: StepMode::Search,
            center: [center.x.as_f64(), center.y.as_f64(), 0.0],
            cellsize: 1,
            spacing: res.as_f64(),
            nodes_evaluated: pending,
            executed: 0,
        };
        let Some((next, c)) = search.next_move() else {
            steps.push(record);
            break Outcome::Unreachable;
        };
        if traj.is_empty() {
            traj.points.push(center);
        }
        search.advance(next);
        cells.push(next);
        cost = cost + c;
        traj.points.push(world.cell_center(next.0, next.1));
        record.executed = 1;
        steps.push(record);
        pending = 0;
        if let Some(s) = sensor {
            let report = world.reveal_detailed(&world.cell_center(next.0, next.1), s);
            if !report.changed_cells.is_empty() {
                let changes: Vec<(Cell, bool)> = report
                    .changed_cells
                    .iter()
                    .map(|&(x, y)| ((x, y), world.cell_blocked(x, y)))
                    .collect();
                search.update_cells(&changes);
                pending = search.compute_shortest_path();
            }
        }
    };
    let metrics = RunMetrics::from_steps(outcome, &traj, steps, res, clock.elapsed().as_secs_f64());
    let metrics = match outcome {
        Outcome::Unreachable => metrics.with_detail(format!("no path from {start:?} to {goal:?}")),
        Outcome::Timeout => metrics.with_detail(format!("{max_moves} moves exhausted")),
        _ => metrics,
    };
    Ok(GridPlan {
        run: PlanRun {
            trajectory: traj,
            metrics,
        },
        cells,
        cost: (outcome == Outcome::Success).then_some(cost),
    })
}
