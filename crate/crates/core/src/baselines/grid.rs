//! 8-connected grid graph over a world's known, inflated occupancy.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::scalar::Real;
use crate::world::OccupancyWorld;

use super::cost::{Ext, PathCost};

pub type Cell = (usize, usize);

/// Neighbor order used everywhere a deterministic scan is needed.
pub const MOVES: [(i64, i64); 8] = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)];

#[derive(Debug, Clone, PartialEq)]
pub struct GridGraph {
    pub width: usize,
    pub height: usize,
    blocked: Vec<bool>,
}

impl GridGraph {
    pub fn new(width: usize, height: usize, blocked: Vec<bool>) -> Self {
        assert_eq!(blocked.len(), width * height, "blocked mask matches grid size");
        Self { width, height, blocked }
    }

    /// Snapshot of the known, inflated occupancy of a grid world.
    pub fn from_world<T: Real>(world: &OccupancyWorld<T>) -> Option<Self> {
        let (w, h) = world.grid_dims()?;
        let mut blocked = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                blocked.push(world.cell_blocked(x, y));
            }
        }
        Some(Self::new(w, h, blocked))
    }

    pub fn index(&self, c: Cell) -> usize {
        c.1 * self.width + c.0
    }

    pub fn cell(&self, i: usize) -> Cell {
        (i % self.width, i / self.width)
    }

    pub fn len(&self) -> usize {
        self.blocked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked.is_empty()
    }

    pub fn blocked(&self, c: Cell) -> bool {
        self.blocked[self.index(c)]
    }

    pub fn set_blocked(&mut self, c: Cell, b: bool) {
        let i = self.index(c);
        self.blocked[i] = b;
    }

    pub fn offset(&self, c: Cell, d: (i64, i64)) -> Option<Cell> {
        let x = c.0 as i64 + d.0;
        let y = c.1 as i64 + d.1;
        (x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height)
            .then_some((x as usize, y as usize))
    }

    /// Cost of the move `c -> c + d`; `None` if either end is blocked or a
    /// diagonal would cut a blocked corner.
    pub fn move_cost<C: PathCost>(&self, c: Cell, d: (i64, i64)) -> Option<(Cell, C)> {
        let n = self.offset(c, d)?;
        if self.blocked(c) || self.blocked(n) {
            return None;
        }
        if d.0 != 0 && d.1 != 0 {
            let a = self.offset(c, (d.0, 0))?;
            let b = self.offset(c, (0, d.1))?;
            if self.blocked(a) || self.blocked(b) {
                return None;
            }
            Some((n, C::diagonal()))
        } else {
            Some((n, C::axial()))
        }
    }

    /// Free neighbors with their move costs, in `MOVES` order.
    pub fn successors<C: PathCost>(&self, c: Cell) -> impl Iterator<Item = (Cell, C)> + '_ {
        MOVES.iter().filter_map(move |&d| self.move_cost(c, d))
    }

    /// All in-range neighbors regardless of occupancy.
    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        MOVES.iter().filter_map(move |&d| self.offset(c, d))
    }
}

/// Octile distance heuristic.
pub fn octile<C: PathCost>(a: Cell, b: Cell) -> C {
    C::octile(a.0.abs_diff(b.0), a.1.abs_diff(b.1))
}

/// Heap entry ordered by cost, then cell index for determinism.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry<K> {
    pub key: K,
    pub index: usize,
}

pub(crate) trait KeyOrder {
    fn key_cmp(&self, other: &Self) -> Ordering;
}

impl<C: PathCost> KeyOrder for C {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.order(other)
    }
}

impl<K: KeyOrder> PartialEq for Entry<K> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<K: KeyOrder> Eq for Entry<K> {}
impl<K: KeyOrder> PartialOrd for Entry<K> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<K: KeyOrder> Ord for Entry<K> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key.key_cmp(&o.key).then(self.index.cmp(&o.index))
    }
}

/// Exact shortest-path cost between two cells, or `None` if unreachable.
pub fn dijkstra_oracle<C: PathCost>(graph: &GridGraph, start: Cell, goal: Cell) -> Option<C> {
    if graph.blocked(start) || graph.blocked(goal) {
        return None;
    }
    let mut dist: Vec<Ext<C>> = vec![Ext::Inf; graph.len()];
    let mut heap = BinaryHeap::new();
    dist[graph.index(start)] = Ext::Fin(C::zero());
    heap.push(Reverse(Entry {
        key: C::zero(),
        index: graph.index(start),
    }));
    while let Some(Reverse(Entry { key, index })) = heap.pop() {
        if dist[index].order(&Ext::Fin(key)) == Ordering::Less {
            continue;
        }
        let c = graph.cell(index);
        if c == goal {
            return Some(key);
        }
        for (n, w) in graph.successors::<C>(c) {
            let nd = key + w;
            let ni = graph.index(n);
            if Ext::Fin(nd).order(&dist[ni]) == Ordering::Less {
                dist[ni] = Ext::Fin(nd);
                heap.push(Reverse(Entry { key: nd, index: ni }));
            }
        }
    }
    None
}
