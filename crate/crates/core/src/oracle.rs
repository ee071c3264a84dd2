//! Slow reference implementations the fast kernels are checked against.
//! They favour obviousness over speed and are not meant for planning.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use crate::cell_astar::{node_cost, CellPath, SearchCell};
use crate::geometry::{euclid_dist, Point3};
use crate::world::OccupancyWorld;

/// Distance from `q` to the line through `a` and `b`, by minimizing
/// `|q - (a + t (b - a))|` over a dense grid of `t` and refining the best
/// bracket with golden-section search. `a` and `b` must differ.
pub fn line_dist_parametric(q: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> f64 {
    let f = |t: f64| euclid_dist(q, &(*a + (*b - *a) * t));
    // The foot of the perpendicular lies within |q - a| / |b - a| of t = 0.
    let span = (euclid_dist(q, a) / euclid_dist(a, b)).max(1.0) * 1.01;
    let n = 20_000;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=n {
        let t = -span + 2.0 * span * i as f64 / n as f64;
        let v = f(t);
        if v < best.0 {
            best = (v, t);
        }
    }
    let step = 2.0 * span / n as f64;
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..300 {
        let c = hi - g * (hi - lo);
        let d = lo + g * (hi - lo);
        if f(c) < f(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    f(0.5 * (lo + hi)).min(best.0)
}

/// End pose `(x, y, theta)` of an arc of length `l` at steering `delta`,
/// obtained by rotating the rear axle about the instantaneous center of
/// rotation. `d` is +1 forward or -1 reverse. Theta is not normalized.
pub fn arc_by_rotation(x: f64, y: f64, theta: f64, delta: f64, wheelbase: f64, d: f64, l: f64) -> (f64, f64, f64) {
    if delta == 0.0 {
        return (x + d * l * theta.cos(), y + d * l * theta.sin(), theta);
    }
    // Signed radius: the center sits to the left for positive steering.
    let r = wheelbase / delta.tan();
    let (cx, cy) = (x - r * theta.sin(), y + r * theta.cos());
    let phi = d * l / r;
    let (s, c) = phi.sin_cos();
    let (dx, dy) = (x - cx, y - cy);
    (cx + c * dx - s * dy, cy + s * dx + c * dy, theta + phi)
}

/// Exhaustive counterpart of avoidance-mode cell selection on a 3-D cell.
///
/// Layers are offset slices along the dominant goal axis, slice 0 through the
/// center then forward up to the goal or the cell edge. A node is usable if
/// free; consecutive chain members (the center first) must be joined by a
/// clear segment and, between chosen nodes, differ by at most one step on each
/// transverse axis. Node signs follow the corridor rule. Among all feasible
/// chains the winner minimizes the per-layer keys `(cost, deviation, offset)`
/// compared from the farthest layer back.
pub fn select_cell_path_exhaustive(
    cell: &SearchCell<f64>,
    w: &OccupancyWorld<f64>,
    start: &Point3<f64>,
    goal: &Point3<f64>,
    w1: f64,
    w2: f64,
) -> CellPath<f64> {
    let h = (cell.cellsize as i64 - 1) / 2;
    let dir = *goal - cell.center;
    let mut axis = 0;
    for a in 1..3 {
        if dir.axis(a).abs() > dir.axis(axis).abs() {
            axis = a;
        }
    }
    let sgn = if dir.axis(axis) > 0.0 { 1 } else { -1 };
    let need = ((dir.axis(axis).abs() / cell.gridsize) - 1e-9).ceil().max(1.0) as i64;
    let forward = need.min(h);
    let at = |o: [i64; 3]| {
        Point3::new(
            cell.center.x + o[0] as f64 * cell.gridsize,
            cell.center.y + o[1] as f64 * cell.gridsize,
            cell.center.z + o[2] as f64 * cell.gridsize,
        )
    };
    let mut slices: Vec<Vec<[i64; 3]>> = Vec::new();
    for layer in 0..=forward {
        let mut s = Vec::new();
        for i in -h..=h {
            for j in -h..=h {
                for k in -h..=h {
                    let o = [i, j, k];
                    if o[axis] * sgn == layer {
                        s.push(o);
                    }
                }
            }
        }
        slices.push(s);
    }
    let mut costs = HashMap::new();
    for o in slices.iter().flatten() {
        let q = at(*o);
        let sign = if !w.is_occupied(&q) && w.segment_clear(&cell.center, &q) {
            1
        } else {
            -1
        };
        costs.insert(*o, node_cost(&q, start, goal, w1, w2, sign));
    }
    let cost = |o: [i64; 3]| costs[&o];
    let dev = |o: [i64; 3]| (0..3).filter(|&a| a != axis).map(|a| o[a].abs()).sum::<i64>();

    type Ok<'a> = dyn Fn(Option<[i64; 3]>, [i64; 3]) -> bool + 'a;
    fn rec(
        depth: usize,
        prev: Option<[i64; 3]>,
        chain: &mut Vec<[i64; 3]>,
        out: &mut Vec<Vec<[i64; 3]>>,
        slices: &[Vec<[i64; 3]>],
        ok: &Ok<'_>,
    ) {
        if depth == slices.len() {
            out.push(chain.clone());
            return;
        }
        for &o in &slices[depth] {
            if ok(prev, o) {
                chain.push(o);
                rec(depth + 1, Some(o), chain, out, slices, ok);
                chain.pop();
            }
        }
    }
    let clear = RefCell::new(HashMap::new());
    let ok = |prev: Option<[i64; 3]>, o: [i64; 3]| {
        let q = at(o);
        if w.is_occupied(&q) {
            return false;
        }
        let from = prev.unwrap_or([0, 0, 0]);
        if let Some(pr) = prev {
            if !(0..3).filter(|&a| a != axis).all(|a| (pr[a] - o[a]).abs() <= 1) {
                return false;
            }
        }
        *clear
            .borrow_mut()
            .entry((from, o))
            .or_insert_with(|| w.segment_clear(&at(from), &q))
    };
    let mut chains = Vec::new();
    rec(0, None, &mut Vec::new(), &mut chains, &slices, &ok);
    let best = chains.into_iter().min_by(|a, b| {
        for l in (0..a.len()).rev() {
            let ka = (cost(a[l]), dev(a[l]), a[l]);
            let kb = (cost(b[l]), dev(b[l]), b[l]);
            let c =
                ka.0.partial_cmp(&kb.0)
                    .unwrap()
                    .then(ka.1.cmp(&kb.1))
                    .then(ka.2.cmp(&kb.2));
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    });
    let mut path = CellPath::default();
    if let Some(chain) = best {
        for o in chain.into_iter().filter(|o| *o != [0, 0, 0]) {
            path.waypoints.push(at(o));
            path.costs.push(cost(o));
            path.offsets.push(o);
        }
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_arc_examples() {
        // A quarter circle of radius 2 to the left.
        let r = 2.0;
        let delta = (1.0f64 / r).atan();
        let l = std::f64::consts::FRAC_PI_2 * r;
        let (x, y, th) = arc_by_rotation(0.0, 0.0, 0.0, delta, 1.0, 1.0, l);
        assert!((x - 2.0).abs() < 1e-12 && (y - 2.0).abs() < 1e-12);
        assert!((th - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let (x, y, _) = arc_by_rotation(1.0, 1.0, 0.0, 0.0, 1.0, -1.0, 3.0);
        assert_eq!((x, y), (-2.0, 1.0));
    }

    #[test]
    fn parametric_line_distance_example() {
        let d = line_dist_parametric(
            &Point3::new(0.5, 3.0, 4.0),
            &Point3::origin(),
            &Point3::new(1.0, 0.0, 0.0),
        );
        assert!((d - 5.0).abs() < 1e-9);
    }
}
