//! Distance and cost kernels shared by every planner.
//!
//! Two-dimensional worlds reuse [`Point3`] with `z = 0`, so the same kernels
//! serve the grid experiments and the point-cloud experiments.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::scalar::Real;

/// A position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn planar(x: T, y: T) -> Self {
        Self::new(x, y, T::zero())
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Component by axis index (0 = x, 1 = y, 2 = z).
    pub fn axis(&self, i: usize) -> T {
        match i {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {i} out of range"),
        }
    }

    pub fn with_axis(mut self, i: usize, v: T) -> Self {
        match i {
            0 => self.x = v,
            1 => self.y = v,
            2 => self.z = v,
            _ => panic!("axis index {i} out of range"),
        }
        self
    }

    /// Linear interpolation `self + t (other - self)`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        *self + (*other - *self) * t
    }

    pub fn cast<U: Real>(&self) -> Point3<U> {
        Point3::new(
            U::lit(self.x.as_f64()),
            U::lit(self.y.as_f64()),
            U::lit(self.z.as_f64()),
        )
    }
}

impl<T: Real> Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Neg for Point3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// The straight reference line through the global start and the goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineRef<T> {
    pub start: Point3<T>,
    pub goal: Point3<T>,
}

impl<T: Real> LineRef<T> {
    pub fn new(start: Point3<T>, goal: Point3<T>) -> Self {
        Self { start, goal }
    }
}

/// Axis-aligned box in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: Point3<T>,
    pub max: Point3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(min: Point3<T>, max: Point3<T>) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: &Point3<T>) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }
}

pub fn euclid_dist<T: Real>(a: &Point3<T>, b: &Point3<T>) -> T {
    (*a - *b).norm()
}

/// Goal heuristic `H_t`: straight-line distance to the goal.
pub fn heuristic_h<T: Real>(p: &Point3<T>, goal: &Point3<T>) -> T {
    euclid_dist(p, goal)
}

/// Perpendicular distance `L_t` from `p` to the infinite line through
/// `line.start` and `line.goal`.
///
/// A degenerate line (start == goal) collapses to the distance to that point.
pub fn line_dist<T: Real>(p: &Point3<T>, line: &LineRef<T>) -> T {
    let dir = line.goal - line.start;
    let len2 = dir.norm_squared();
    if len2 == T::zero() {
        return euclid_dist(p, &line.start);
    }
    let rel = *p - line.start;
    let t = rel.dot(&dir) / len2;
    let foot = line.start + dir * t;
    euclid_dist(p, &foot)
}

/// Hybrid A* priority `f_t + w_g * g_t`, with `g_t` measured to `start`.
pub fn hybrid_heuristic<T: Real>(p: &Point3<T>, start: &Point3<T>, goal: &Point3<T>, w_g: T) -> Result<T, ParamError> {
    check_unit_weight(w_g)?;
    Ok(euclid_dist(p, goal) + w_g * euclid_dist(p, start))
}

pub(crate) fn check_unit_weight<T: Real>(w_g: T) -> Result<(), ParamError> {
    if !(w_g >= T::zero() && w_g <= T::one()) {
        return Err(ParamError::new("w_g", format!("{w_g} is outside [0, 1]")));
    }
    Ok(())
}
