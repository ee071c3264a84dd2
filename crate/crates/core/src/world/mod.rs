//! Occupancy worlds for both experiment families.
//!
//! A world is either a dense 2-D grid (text maps, `#` occupied) or a sparse
//! set of 3-D obstacle points with spherical inflation. Every world carries a
//! true obstacle set and the subset revealed so far; planners only ever query
//! the revealed subset, while the collision audit queries the true set.
//!
//! Positions outside the declared bounds count as occupied.

mod grid;
mod io;
mod points;

pub use io::{load_map_2d, load_obstacles_3d, parse_obstacles_csv, save_map_2d, save_obstacles_3d};

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::geometry::{euclid_dist, Aabb, Point3};
use crate::scalar::Real;

use grid::GridStore;
use points::PointStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimensionality {
    Two,
    Three,
}

impl Dimensionality {
    pub fn count(self) -> usize {
        match self {
            Dimensionality::Two => 2,
            Dimensionality::Three => 3,
        }
    }
}

/// Whether obstacles are known up front or revealed by a sensor as the agent
/// moves. Fixed at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnowledgeMode {
    FullyKnown,
    SemiKnown,
}

/// Omnidirectional range sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig<T> {
    pub range: T,
}

impl<T: Real> SensorConfig<T> {
    pub fn new(range: T) -> Result<Self, ParamError> {
        if !(range > T::zero()) || !range.is_finite() {
            return Err(ParamError::new("sensor.range", "must be positive and finite"));
        }
        Ok(Self { range })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldConfig<T> {
    /// Meters per grid cell (2-D) or collision sampling scale (3-D).
    pub resolution: T,
    pub inflation_radius: T,
    pub mode: KnowledgeMode,
    /// Arena bounds for 3-D worlds; `None` leaves the arena unbounded. Grid
    /// worlds derive their bounds from the map extent.
    pub bounds: Option<Aabb<T>>,
}

impl<T: Real> Default for WorldConfig<T> {
    fn default() -> Self {
        Self {
            resolution: T::one(),
            inflation_radius: T::zero(),
            mode: KnowledgeMode::FullyKnown,
            bounds: None,
        }
    }
}

impl<T: Real> WorldConfig<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.resolution > T::zero()) || !self.resolution.is_finite() {
            return Err(ParamError::new("resolution", "must be positive and finite"));
        }
        if !(self.inflation_radius >= T::zero()) || !self.inflation_radius.is_finite() {
            return Err(ParamError::new("inflation_radius", "must be non-negative and finite"));
        }
        if let Some(b) = &self.bounds {
            if !(b.min.is_finite() && b.max.is_finite()) || b.min.x > b.max.x || b.min.y > b.max.y || b.min.z > b.max.z
            {
                return Err(ParamError::new("bounds", "min must not exceed max"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Backing<T> {
    Grid(GridStore),
    Points(PointStore<T>),
}

/// Result of a sensor sweep.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RevealReport {
    /// Obstacles (cells or points) moved into the known set by this sweep.
    pub newly_revealed: usize,
    /// Grid cells whose known-inflated blocked state changed (2-D only).
    pub changed_cells: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct OccupancyWorld<T> {
    config: WorldConfig<T>,
    bounds: Option<Aabb<T>>,
    backing: Backing<T>,
    /// `;` comment lines of a text map with their original line numbers.
    comments: Vec<(usize, String)>,
}

impl<T: Real> OccupancyWorld<T> {
    /// Builds a grid world from a row-major occupancy vector (`y * width + x`).
    pub fn from_grid(
        width: usize,
        height: usize,
        cells: Vec<bool>,
        config: WorldConfig<T>,
    ) -> Result<Self, ParamError> {
        config.validate()?;
        if width == 0 || height == 0 {
            return Err(ParamError::new("grid", "width and height must be positive"));
        }
        if cells.len() != width * height {
            return Err(ParamError::new("grid", "cell count does not match width * height"));
        }
        let half = config.resolution / T::lit(2.0);
        let bounds = Aabb::new(
            Point3::new(-half, -half, T::zero()),
            Point3::new(
                T::from_usize_lossy(width) * config.resolution - half,
                T::from_usize_lossy(height) * config.resolution - half,
                T::zero(),
            ),
        );
        let radius_cells = (config.inflation_radius / config.resolution).as_f64();
        let store = GridStore::new(width, height, cells, radius_cells);
        let mut world = Self {
            config: WorldConfig {
                bounds: Some(bounds),
                ..config
            },
            bounds: Some(bounds),
            backing: Backing::Grid(store),
            comments: Vec::new(),
        };
        if config.mode == KnowledgeMode::FullyKnown {
            world.reveal_everything();
        }
        Ok(world)
    }

    /// Builds a 3-D point world. Points must be finite and inside the bounds.
    pub fn from_points(points: Vec<Point3<T>>, config: WorldConfig<T>) -> Result<Self, ParamError> {
        config.validate()?;
        if let Some(b) = &config.bounds {
            if let Some(i) = points.iter().position(|p| !b.contains(p)) {
                return Err(ParamError::new(
                    "obstacles",
                    format!("point {i} lies outside the bounds"),
                ));
            }
        }
        let bucket = config.inflation_radius.max(config.resolution);
        let mut world = Self {
            config,
            bounds: config.bounds,
            backing: Backing::Points(PointStore::new(points, bucket)),
            comments: Vec::new(),
        };
        if config.mode == KnowledgeMode::FullyKnown {
            world.reveal_everything();
        }
        Ok(world)
    }

    fn reveal_everything(&mut self) {
        match &mut self.backing {
            Backing::Grid(g) => {
                let mut scratch = Vec::new();
                for idx in 0..g.true_occ.len() {
                    let (x, y) = g.coords(idx);
                    g.learn(x, y, &mut scratch);
                }
            }
            Backing::Points(p) => {
                p.reveal_all();
            }
        }
    }

    pub(crate) fn set_comments(&mut self, comments: Vec<(usize, String)>) {
        self.comments = comments;
    }

    pub(crate) fn comments(&self) -> &[(usize, String)] {
        &self.comments
    }

    pub fn dimensionality(&self) -> Dimensionality {
        match self.backing {
            Backing::Grid(_) => Dimensionality::Two,
            Backing::Points(_) => Dimensionality::Three,
        }
    }

    pub fn config(&self) -> &WorldConfig<T> {
        &self.config
    }

    pub fn resolution(&self) -> T {
        self.config.resolution
    }

    pub fn inflation_radius(&self) -> T {
        self.config.inflation_radius
    }

    pub fn mode(&self) -> KnowledgeMode {
        self.config.mode
    }

    pub fn bounds(&self) -> Option<&Aabb<T>> {
        self.bounds.as_ref()
    }

    /// Width and height in cells for grid worlds.
    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        match &self.backing {
            Backing::Grid(g) => Some((g.width, g.height)),
            Backing::Points(_) => None,
        }
    }

    pub fn true_obstacle_count(&self) -> usize {
        match &self.backing {
            Backing::Grid(g) => g.true_count(),
            Backing::Points(p) => p.true_points.len(),
        }
    }

    pub fn known_obstacle_count(&self) -> usize {
        match &self.backing {
            Backing::Grid(g) => g.known_count(),
            Backing::Points(p) => p.known.len(),
        }
    }

    /// True obstacle points of a 3-D world, in load order.
    pub fn obstacle_points(&self) -> &[Point3<T>] {
        match &self.backing {
            Backing::Grid(_) => &[],
            Backing::Points(p) => &p.true_points,
        }
    }

    /// Whether the obstacle at `index` (3-D) has been revealed.
    pub fn point_known(&self, index: usize) -> bool {
        match &self.backing {
            Backing::Grid(_) => false,
            Backing::Points(p) => p.known_mask[index],
        }
    }

    /// True occupancy of a grid cell (not inflated).
    pub fn cell_occupied(&self, x: usize, y: usize) -> bool {
        match &self.backing {
            Backing::Grid(g) => g.true_occ[g.index(x, y)],
            Backing::Points(_) => false,
        }
    }

    pub fn cell_known_occupied(&self, x: usize, y: usize) -> bool {
        match &self.backing {
            Backing::Grid(g) => g.known_occ[g.index(x, y)],
            Backing::Points(_) => false,
        }
    }

    /// Whether a grid cell is blocked under the known, inflated map.
    pub fn cell_blocked(&self, x: usize, y: usize) -> bool {
        match &self.backing {
            Backing::Grid(g) => x >= g.width || y >= g.height || g.known_blocked(x, y),
            Backing::Points(_) => false,
        }
    }

    pub fn cell_center(&self, x: usize, y: usize) -> Point3<T> {
        let r = self.config.resolution;
        Point3::planar(T::from_usize_lossy(x) * r, T::from_usize_lossy(y) * r)
    }

    /// Grid cell containing `p`, or `None` outside the grid.
    pub fn cell_of(&self, p: &Point3<T>) -> Option<(usize, usize)> {
        match &self.backing {
            Backing::Grid(g) => {
                let (x, y) = self.raw_cell(p);
                g.in_range(x, y).then_some((x as usize, y as usize))
            }
            Backing::Points(_) => None,
        }
    }

    fn raw_cell(&self, p: &Point3<T>) -> (i64, i64) {
        let r = self.config.resolution;
        let half = T::lit(0.5);
        let c = |v: T| {
            let f = (v / r + half).floor();
            if f.is_finite() {
                f.as_f64() as i64
            } else {
                i64::MIN
            }
        };
        (c(p.x), c(p.y))
    }

    fn out_of_bounds(&self, p: &Point3<T>) -> bool {
        match &self.bounds {
            Some(b) => match self.backing {
                // Grid bounds are enforced by the cell lookup (half-open cells).
                Backing::Grid(_) => false,
                Backing::Points(_) => !b.contains(p),
            },
            None => false,
        }
    }

    /// Occupancy under the KNOWN obstacle set with inflation.
    pub fn is_occupied(&self, p: &Point3<T>) -> bool {
        self.occupied_impl(p, false)
    }

    /// Occupancy under the TRUE obstacle set with inflation. Used for audits.
    pub fn is_occupied_true(&self, p: &Point3<T>) -> bool {
        self.occupied_impl(p, true)
    }

    fn occupied_impl(&self, p: &Point3<T>, truth: bool) -> bool {
        if !p.is_finite() || self.out_of_bounds(p) {
            return true;
        }
        match &self.backing {
            Backing::Grid(g) => {
                let (x, y) = self.raw_cell(p);
                if !g.in_range(x, y) {
                    return true;
                }
                let (x, y) = (x as usize, y as usize);
                if truth {
                    g.true_blocked(x, y)
                } else {
                    g.known_blocked(x, y)
                }
            }
            Backing::Points(s) => {
                let set = if truth { &s.all } else { &s.known };
                set.any_within(p, self.config.inflation_radius)
            }
        }
    }

    /// Spacing used when sampling segments for collision.
    pub fn sample_spacing(&self) -> T {
        self.config.resolution / T::lit(4.0)
    }

    /// True iff every sample along `a -> b` is free under the known map.
    pub fn segment_clear(&self, a: &Point3<T>, b: &Point3<T>) -> bool {
        let (a, b) = canonical_order(a, b);
        segment_samples(a, b, self.sample_spacing()).all(|p| !self.is_occupied(&p))
    }

    /// Like [`segment_clear`](Self::segment_clear) but against the true map.
    pub fn segment_clear_true(&self, a: &Point3<T>, b: &Point3<T>) -> bool {
        let (a, b) = canonical_order(a, b);
        segment_samples(a, b, self.sample_spacing()).all(|p| !self.is_occupied_true(&p))
    }

    /// Arc length from `from` to the first occupied sample along the polyline
    /// `from -> path[0] -> path[1] -> ...`, or `None` if the polyline is clear.
    pub fn nearest_obstacle_on_path(&self, path: &[Point3<T>], from: &Point3<T>) -> Option<T> {
        self.nearest_obstacle_within(path, from, T::infinity())
    }

    /// Same as [`nearest_obstacle_on_path`](Self::nearest_obstacle_on_path),
    /// but stops scanning once `limit` meters of arc have been covered.
    pub fn nearest_obstacle_within(&self, path: &[Point3<T>], from: &Point3<T>, limit: T) -> Option<T> {
        if self.is_occupied(from) {
            return Some(T::zero());
        }
        let mut travelled = T::zero();
        let mut prev = *from;
        for next in path {
            let len = euclid_dist(&prev, next);
            let n = sample_count(len, self.sample_spacing());
            for i in 1..=n {
                let s = len * T::from_usize_lossy(i) / T::from_usize_lossy(n);
                if travelled + s > limit {
                    return None;
                }
                let q = prev.lerp(next, T::from_usize_lossy(i) / T::from_usize_lossy(n));
                if self.is_occupied(&q) {
                    return Some(travelled + s);
                }
            }
            travelled = travelled + len;
            prev = *next;
        }
        None
    }

    /// Moves every true obstacle within `sensor.range` of `p` into the known
    /// set. Returns the number of newly revealed obstacles. A no-op in
    /// fully-known mode.
    pub fn reveal(&mut self, p: &Point3<T>, sensor: &SensorConfig<T>) -> usize {
        self.reveal_detailed(p, sensor).newly_revealed
    }

    pub fn reveal_detailed(&mut self, p: &Point3<T>, sensor: &SensorConfig<T>) -> RevealReport {
        let mut report = RevealReport::default();
        if self.config.mode == KnowledgeMode::FullyKnown {
            return report;
        }
        let res = self.config.resolution;
        let center = self.raw_cell(p);
        match &mut self.backing {
            Backing::Grid(g) => {
                let reach = (sensor.range / res).ceil().as_f64() as i64 + 1;
                let r2 = sensor.range * sensor.range;
                for y in (center.1 - reach)..=(center.1 + reach) {
                    for x in (center.0 - reach)..=(center.0 + reach) {
                        if !g.in_range(x, y) {
                            continue;
                        }
                        let (ux, uy) = (x as usize, y as usize);
                        let c = Point3::planar(T::from_usize_lossy(ux) * res, T::from_usize_lossy(uy) * res);
                        let d = Point3::planar(c.x - p.x, c.y - p.y);
                        if d.norm_squared() <= r2 && g.learn(ux, uy, &mut report.changed_cells) {
                            report.newly_revealed += 1;
                        }
                    }
                }
                report.changed_cells.sort_unstable();
                report.changed_cells.dedup();
            }
            Backing::Points(s) => {
                report.newly_revealed = s.reveal_within(p, sensor.range);
            }
        }
        report
    }
}

/// Orders endpoints so that `a -> b` and `b -> a` produce the same samples.
fn canonical_order<'a, T: Real>(a: &'a Point3<T>, b: &'a Point3<T>) -> (&'a Point3<T>, &'a Point3<T>) {
    let ka = (a.x, a.y, a.z);
    let kb = (b.x, b.y, b.z);
    if ka <= kb {
        (a, b)
    } else {
        (b, a)
    }
}

fn sample_count<T: Real>(len: T, spacing: T) -> usize {
    let n = (len / spacing).ceil();
    if n.is_finite() && n >= T::one() {
        n.as_f64() as usize
    } else {
        1
    }
}

/// Evenly spaced samples on `a -> b`, endpoints included, at spacing at most
/// `spacing`. A zero-length segment yields its single point.
pub fn segment_samples<T: Real>(a: &Point3<T>, b: &Point3<T>, spacing: T) -> impl Iterator<Item = Point3<T>> {
    let (a, b) = (*a, *b);
    let len = euclid_dist(&a, &b);
    let n = if len == T::zero() {
        0
    } else {
        sample_count(len, spacing)
    };
    (0..=n).map(move |i| {
        if n == 0 {
            a
        } else if i == n {
            b
        } else {
            a.lerp(&b, T::from_usize_lossy(i) / T::from_usize_lossy(n))
        }
    })
}
