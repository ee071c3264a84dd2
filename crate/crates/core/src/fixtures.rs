//! Generators for the obstacle sets used by the shipped scenarios.
//!
//! The checked-in CSV files under `scenarios/maps/` are produced by these
//! functions; tests regenerate them to confirm the files are in sync.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point3;

/// A vertical wall in the plane `x = 3.5`, spanning `y` in [-2, 2] and `z` in
/// [0, 5] at 0.25 m spacing (17 x 21 points). It sits between (0, 0, 2.5)
/// and (7, 0, 2.5).
pub fn wall_points() -> Vec<Point3<f64>> {
    let mut pts = Vec::with_capacity(17 * 21);
    for iy in 0..17 {
        for iz in 0..21 {
            pts.push(Point3::new(3.5, -2.0 + 0.25 * iy as f64, 0.25 * iz as f64));
        }
    }
    pts
}

/// One tree: a trunk column from the ground up to `top`, and a roughly
/// spherical canopy of radius `canopy` centered at the top of the trunk.
pub fn tree_points(x: f64, y: f64, top: f64, canopy: f64) -> Vec<Point3<f64>> {
    let step = 0.5;
    let mut pts = Vec::new();
    let mut z = 0.0;
    while z < top - canopy {
        pts.push(Point3::new(x, y, z));
        z += step;
    }
    let n = (canopy / step).round() as i64;
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let (dx, dy, dz) = (i as f64 * step, j as f64 * step, k as f64 * step);
                let r2 = dx * dx + dy * dy + dz * dz;
                // Hollow shell: interior points never change inflated occupancy.
                if r2 <= canopy * canopy + 1e-9 && r2 > (canopy - step) * (canopy - step) + 1e-9 {
                    pts.push(Point3::new(x + dx, y + dy, top + dz));
                }
            }
        }
    }
    pts
}

/// Clusters of trees scattered near the take-off point of the long-distance
/// run from (0, 0, 6) to (45, -6, 8).
pub fn tree_cluster_points() -> Vec<Point3<f64>> {
    let trees = [
        (5.0, 0.5, 6.0, 1.5),
        (6.5, -2.5, 5.5, 1.5),
        (9.0, 1.5, 7.0, 2.0),
        (11.0, -2.0, 6.5, 1.5),
        (12.5, 3.0, 5.0, 1.0),
        (14.0, -0.5, 7.5, 2.0),
        (16.5, -4.0, 6.0, 1.5),
    ];
    trees
        .iter()
        .flat_map(|&(x, y, top, canopy)| tree_points(x, y, top, canopy))
        .collect()
}

/// Row-major occupancy grid built from filled axis-aligned rectangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridFixture {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<bool>,
}

impl GridFixture {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    /// Fills the inclusive cell range `[x0, x1] x [y0, y1]`.
    pub fn fill(&mut self, x0: usize, y0: usize, x1: usize, y1: usize) -> &mut Self {
        for y in y0..=y1.min(self.height - 1) {
            for x in x0..=x1.min(self.width - 1) {
                self.cells[y * self.width + x] = true;
            }
        }
        self
    }

    pub fn blocked(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn to_text(&self) -> String {
        grid_to_text(self.width, &self.cells)
    }
}

/// 50 x 70 arena for the car-like comparison. A U-shaped trap opening south
/// (walls x 15..25, y 38..48) sits right below the goal (15, 50) and on the
/// straight line to it from the start (25, 3); the lines to (6, 60) and
/// (30, 43) pass beside it.
pub fn trap_arena() -> GridFixture {
    let mut g = GridFixture::empty(50, 70);
    g.fill(15, 38, 15, 48).fill(25, 38, 25, 48).fill(15, 48, 25, 48);
    g.fill(30, 18, 38, 24).fill(4, 20, 12, 25).fill(24, 52, 32, 56);
    g
}

/// 30 x 30 arena with a three-sided box (interior x 12..16, y 16..21) that
/// opens south, away from the goal (14, 27). The car starts inside it
/// facing the closed end.
pub fn dead_corner() -> GridFixture {
    let mut g = GridFixture::empty(30, 30);
    g.fill(11, 14, 11, 22).fill(17, 14, 17, 22).fill(11, 22, 17, 22);
    g
}

/// 60 x 70 block map for the grid comparison: staggered rows of 4 x 4
/// blocks every 10 cells, odd rows shifted by 5, plus a few 2 x 6 bars.
pub fn block_map() -> GridFixture {
    let mut g = GridFixture::empty(60, 70);
    for row in 0..6 {
        for col in 0..6 {
            let x0 = 4 + col * 10 + (row % 2) * 5;
            let y0 = 6 + row * 10;
            if x0 + 3 < g.width {
                g.fill(x0, y0, x0 + 3, y0 + 3);
            }
        }
    }
    for (x0, y0, x1, y1) in [(20, 20, 21, 25), (44, 14, 49, 15), (30, 50, 35, 51), (50, 58, 51, 63)] {
        g.fill(x0, y0, x1, y1);
    }
    g
}

/// Row-major random occupancy (`y * width + x`) with the given fill
/// density. Cells in `keep_free` are always free. Deterministic per seed.
pub fn random_grid(width: usize, height: usize, density: f64, seed: u64, keep_free: &[(usize, usize)]) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<bool> = (0..width * height).map(|_| rng.gen_bool(density)).collect();
    for &(x, y) in keep_free {
        cells[y * width + x] = false;
    }
    cells
}

/// Renders a row-major occupancy vector in the text map format.
pub fn grid_to_text(width: usize, cells: &[bool]) -> String {
    let mut out = String::with_capacity(cells.len() + cells.len() / width.max(1));
    for row in cells.chunks(width) {
        out.extend(row.iter().map(|&b| if b { '#' } else { '.' }));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_has_357_points() {
        // 17 samples over [-2, 2] and 21 over [0, 5] at 0.25 m.
        let pts = wall_points();
        assert_eq!(pts.len(), 17 * 21);
        assert_eq!(pts.len(), 357);
        assert!(pts
            .iter()
            .all(|p| p.x == 3.5 && (-2.0..=2.0).contains(&p.y) && (0.0..=5.0).contains(&p.z)));
    }

    #[test]
    fn random_grid_is_seeded() {
        let a = random_grid(32, 32, 0.25, 7, &[(0, 0), (31, 31)]);
        assert_eq!(a, random_grid(32, 32, 0.25, 7, &[(0, 0), (31, 31)]));
        assert_ne!(a, random_grid(32, 32, 0.25, 8, &[(0, 0), (31, 31)]));
        assert!(!a[0] && !a[32 * 32 - 1]);
        let filled = a.iter().filter(|&&b| b).count();
        assert!((150..=370).contains(&filled), "{filled}");
        assert_eq!(grid_to_text(2, &[true, false, false, false]), "#.\n..\n");
    }
}
