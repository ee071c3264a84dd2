//! Sparse 3-D obstacle points bucketed in a uniform spatial hash.

use std::collections::HashMap;

use crate::geometry::Point3;
use crate::scalar::Real;

type Key = (i64, i64, i64);

#[derive(Debug, Clone)]
pub(crate) struct SpatialHash<T> {
    bucket: T,
    cells: HashMap<Key, Vec<Point3<T>>>,
    len: usize,
}

impl<T: Real> SpatialHash<T> {
    pub fn new(bucket: T) -> Self {
        Self {
            bucket,
            cells: HashMap::new(),
            len: 0,
        }
    }

    fn key(&self, p: &Point3<T>) -> Key {
        let k = |v: T| (v / self.bucket).floor().as_f64() as i64;
        (k(p.x), k(p.y), k(p.z))
    }

    pub fn insert(&mut self, p: Point3<T>) {
        let key = self.key(&p);
        self.cells.entry(key).or_default().push(p);
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// True if some stored point lies within `radius` of `p`. `radius` must not
    /// exceed the bucket size.
    pub fn any_within(&self, p: &Point3<T>, radius: T) -> bool {
        if self.len == 0 {
            return false;
        }
        let (kx, ky, kz) = self.key(p);
        let r2 = radius * radius;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(pts) = self.cells.get(&(kx + dx, ky + dy, kz + dz)) {
                        if pts.iter().any(|q| (*q - *p).norm_squared() <= r2) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PointStore<T> {
    pub true_points: Vec<Point3<T>>,
    pub known_mask: Vec<bool>,
    unrevealed: Vec<usize>,
    pub known: SpatialHash<T>,
    pub all: SpatialHash<T>,
}

impl<T: Real> PointStore<T> {
    pub fn new(points: Vec<Point3<T>>, bucket: T) -> Self {
        let mut all = SpatialHash::new(bucket);
        for p in &points {
            all.insert(*p);
        }
        Self {
            known_mask: vec![false; points.len()],
            unrevealed: (0..points.len()).collect(),
            known: SpatialHash::new(bucket),
            all,
            true_points: points,
        }
    }

    pub fn reveal_all(&mut self) -> usize {
        let ids = std::mem::take(&mut self.unrevealed);
        for &i in &ids {
            self.known_mask[i] = true;
            self.known.insert(self.true_points[i]);
        }
        ids.len()
    }

    pub fn reveal_within(&mut self, p: &Point3<T>, range: T) -> usize {
        let r2 = range * range;
        let mut revealed = 0;
        let pts = &self.true_points;
        let mask = &mut self.known_mask;
        let known = &mut self.known;
        self.unrevealed.retain(|&i| {
            if (pts[i] - *p).norm_squared() <= r2 {
                mask[i] = true;
                known.insert(pts[i]);
                revealed += 1;
                false
            } else {
                true
            }
        });
        revealed
    }
}
