//! The search cell: a centered lattice of candidate nodes around the agent,
//! sliced into layers perpendicular to the dominant goal axis.

use crate::error::ParamError;
use crate::geometry::Point3;
use crate::scalar::Real;
use crate::world::Dimensionality;

/// Integer lattice offset of a node from the cell center.
pub type Offset = [i64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellNode<T> {
    pub offset: Offset,
    pub position: Point3<T>,
    /// Signed slice index along the goal direction; 0 is the slice through
    /// the center, positive values lie ahead.
    pub layer: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchCell<T> {
    pub center: Point3<T>,
    pub cellsize: usize,
    pub gridsize: T,
    pub dim: Dimensionality,
    /// Dominant axis of the goal direction (0 = x, 1 = y, 2 = z).
    pub axis: usize,
    /// +1 if the goal lies in the positive direction of `axis`, else -1.
    pub axis_sign: i64,
}

/// Axis with the largest absolute component; ties resolve to the lower index.
pub fn dominant_axis<T: Real>(dir: &Point3<T>, dim: Dimensionality) -> Option<(usize, i64)> {
    let mut best: Option<(usize, T)> = None;
    for axis in 0..dim.count() {
        let v = dir.axis(axis).abs();
        if v > T::zero() && best.is_none_or(|(_, b)| v > b) {
            best = Some((axis, v));
        }
    }
    best.map(|(axis, _)| (axis, if dir.axis(axis) > T::zero() { 1 } else { -1 }))
}

pub fn gen_search_cell<T: Real>(
    center: Point3<T>,
    cellsize: usize,
    gridsize: T,
    goal_dir: Point3<T>,
    dim: Dimensionality,
) -> Result<SearchCell<T>, ParamError> {
    if cellsize < 3 || cellsize.is_multiple_of(2) {
        return Err(ParamError::new(
            "cellsize",
            format!("{cellsize} is not an odd count >= 3"),
        ));
    }
    if !(gridsize > T::zero()) || !gridsize.is_finite() {
        return Err(ParamError::new("gridsize", "must be positive and finite"));
    }
    let (axis, axis_sign) =
        dominant_axis(&goal_dir, dim).ok_or_else(|| ParamError::new("goal_dir", "must be non-zero"))?;
    Ok(SearchCell {
        center,
        cellsize,
        gridsize,
        dim,
        axis,
        axis_sign,
    })
}

impl<T: Real> SearchCell<T> {
    pub fn half(&self) -> i64 {
        (self.cellsize as i64 - 1) / 2
    }

    /// Node count before validity filtering: `cellsize^d`.
    pub fn node_count(&self) -> usize {
        self.cellsize.pow(self.dim.count() as u32)
    }

    pub fn position(&self, offset: &Offset) -> Point3<T> {
        let g = self.gridsize;
        let f = |i: i64| T::lit(i as f64) * g;
        self.center + Point3::new(f(offset[0]), f(offset[1]), f(offset[2]))
    }

    pub fn layer_of(&self, offset: &Offset) -> i64 {
        self.axis_sign * offset[self.axis]
    }

    /// Axes other than the dominant one.
    pub fn transverse_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim.count()).filter(move |&a| a != self.axis)
    }

    pub fn node(&self, offset: Offset) -> CellNode<T> {
        CellNode {
            offset,
            position: self.position(&offset),
            layer: self.layer_of(&offset),
        }
    }

    /// Every node of the cell in lexicographic offset order.
    pub fn nodes(&self) -> Vec<CellNode<T>> {
        let h = self.half();
        let zr = if self.dim == Dimensionality::Three { h } else { 0 };
        let mut out = Vec::with_capacity(self.node_count());
        for i in -h..=h {
            for j in -h..=h {
                for k in -zr..=zr {
                    out.push(self.node([i, j, k]));
                }
            }
        }
        out
    }

    /// Nodes of one layer (slice), in lexicographic offset order.
    pub fn layer(&self, layer: i64) -> Vec<CellNode<T>> {
        let h = self.half();
        if layer.abs() > h {
            return Vec::new();
        }
        let along = self.axis_sign * layer;
        let zr = if self.dim == Dimensionality::Three { h } else { 0 };
        let mut out = Vec::new();
        for i in -h..=h {
            for j in -h..=h {
                for k in -zr..=zr {
                    let off = [i, j, k];
                    if off[self.axis] == along {
                        out.push(self.node(off));
                    }
                }
            }
        }
        out
    }

    /// Sum of absolute transverse offsets.
    pub fn deviation(&self, offset: &Offset) -> i64 {
        self.transverse_axes().map(|a| offset[a].abs()).sum()
    }

    /// Continuity between consecutively chosen nodes: at most one lattice
    /// step on every transverse axis.
    pub fn continuous(&self, a: &Offset, b: &Offset) -> bool {
        self.transverse_axes().all(|t| (a[t] - b[t]).abs() <= 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    #[test]
    fn node_counts() {
        let c3 = gen_search_cell(p(0., 0., 0.), 3, 1.0, p(1., 0., 0.), Dimensionality::Three).unwrap();
        assert_eq!(c3.nodes().len(), 27);
        assert_eq!(c3.node_count(), 27);
        let c5 = gen_search_cell(p(0., 0., 0.), 5, 1.0, p(0., 1., 0.), Dimensionality::Two).unwrap();
        assert_eq!(c5.nodes().len(), 25);
        assert!(c5.nodes().iter().all(|n| n.position.z == 0.0));
    }

    #[test]
    fn even_or_small_cellsize_rejected() {
        let dir = p(1., 0., 0.);
        assert!(gen_search_cell(p(0., 0., 0.), 4, 1.0, dir, Dimensionality::Three).is_err());
        assert!(gen_search_cell(p(0., 0., 0.), 1, 1.0, dir, Dimensionality::Three).is_err());
        assert!(gen_search_cell(p(0., 0., 0.), 3, 0.0, dir, Dimensionality::Three).is_err());
        assert!(gen_search_cell(p(0., 0., 0.), 3, 1.0, p(0., 0., 0.), Dimensionality::Three).is_err());
    }

    #[test]
    fn layers_of_a_three_cell_toward_plus_x() {
        let cell = gen_search_cell(p(0., 0., 0.), 3, 0.5, p(2., 1., -1.), Dimensionality::Three).unwrap();
        assert_eq!((cell.axis, cell.axis_sign), (0, 1));
        // Independent enumeration of the lattice.
        let mut expected_fwd = Vec::new();
        let mut expected_lat = Vec::new();
        for y in [-0.5, 0.0, 0.5] {
            for z in [-0.5, 0.0, 0.5] {
                expected_fwd.push(p(0.5, y, z));
                expected_lat.push(p(0.0, y, z));
            }
        }
        let fwd: Vec<_> = cell.layer(1).iter().map(|n| n.position).collect();
        let lat: Vec<_> = cell.layer(0).iter().map(|n| n.position).collect();
        assert_eq!(fwd, expected_fwd);
        assert_eq!(lat, expected_lat);
        assert!(cell.layer(-1).iter().all(|n| n.position.x == -0.5));
        assert!(cell.layer(2).is_empty());
        // nodes on all sides of the center
        for axis in 0..3 {
            assert!(cell.nodes().iter().any(|n| n.position.axis(axis) > 0.0));
            assert!(cell.nodes().iter().any(|n| n.position.axis(axis) < 0.0));
        }
    }

    #[test]
    fn negative_goal_direction_flips_layer_order() {
        let cell = gen_search_cell(p(1., 1., 0.), 5, 1.0, p(0., -3., 0.), Dimensionality::Two).unwrap();
        assert_eq!((cell.axis, cell.axis_sign), (1, -1));
        assert!(cell.layer(2).iter().all(|n| n.position.y == -1.0));
        assert_eq!(cell.layer(2).len(), 5);
    }

    #[test]
    fn dominant_axis_ties_prefer_lower_index() {
        assert_eq!(dominant_axis(&p(1., -1., 1.), Dimensionality::Three), Some((0, 1)));
        assert_eq!(dominant_axis(&p(0., -2., 2.), Dimensionality::Three), Some((1, -1)));
        // z is ignored in 2-D
        assert_eq!(dominant_axis(&p(0., 1., 5.), Dimensionality::Two), Some((1, 1)));
    }
}
