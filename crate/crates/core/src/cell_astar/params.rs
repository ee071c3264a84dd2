use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::geometry::check_unit_weight;
use crate::scalar::Real;

/// How the per-node sign of the line term is decided in avoidance mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignRule {
    /// +1 iff the node is free and the straight corridor from the agent is clear.
    #[default]
    Corridor,
    /// +1 iff the node is free.
    Membership,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct PlanParams<T> {
    pub w1: T,
    pub w2: T,
    #[serde(default = "default_cellsize_min")]
    pub cellsize_min: usize,
    pub cellsize_max: usize,
    pub gridsize: T,
    pub bigstep: T,
    pub avoidance_range: T,
    pub goal_tolerance: T,
    pub max_steps: usize,
    #[serde(default)]
    pub sign_rule: SignRule,
    /// Weight of the local-start term (car-like variant only).
    #[serde(default = "zero")]
    pub w_g: T,
    /// Steps spent with a flipped line-term sign before reversing (car-like variant only).
    #[serde(default = "default_k_explore")]
    pub k_explore: usize,
}

fn default_cellsize_min() -> usize {
    3
}

fn zero<T: Real>() -> T {
    T::zero()
}

fn default_k_explore() -> usize {
    3
}

impl<T: Real> PlanParams<T> {
    /// Defaults for a lattice of spacing `gridsize`: w1 = 1, w2 = 0.5, cells up to 9.
    pub fn with_gridsize(gridsize: T) -> Self {
        Self {
            w1: T::one(),
            w2: T::lit(0.5),
            cellsize_min: 3,
            cellsize_max: 9,
            gridsize,
            bigstep: gridsize + gridsize,
            avoidance_range: gridsize * T::lit(4.0),
            goal_tolerance: gridsize,
            max_steps: 1000,
            sign_rule: SignRule::Corridor,
            w_g: T::zero(),
            k_explore: 3,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.w1) {
            return Err(ParamError::new("w1", "must be positive"));
        }
        if !(self.w2 >= T::zero() && self.w2.is_finite()) {
            return Err(ParamError::new("w2", "must be non-negative"));
        }
        for (name, v) in [("cellsize_min", self.cellsize_min), ("cellsize_max", self.cellsize_max)] {
            if v < 3 || v % 2 == 0 {
                return Err(ParamError::new(name, format!("{v} is not an odd count >= 3")));
            }
        }
        if self.cellsize_max < self.cellsize_min {
            return Err(ParamError::new("cellsize_max", "smaller than cellsize_min"));
        }
        if !pos(self.gridsize) {
            return Err(ParamError::new("gridsize", "must be positive"));
        }
        if !(self.bigstep >= self.gridsize && self.bigstep.is_finite()) {
            return Err(ParamError::new("bigstep", "must be at least gridsize"));
        }
        if !(self.avoidance_range >= T::zero() && self.avoidance_range.is_finite()) {
            return Err(ParamError::new("avoidance_range", "must be non-negative"));
        }
        if !pos(self.goal_tolerance) {
            return Err(ParamError::new("goal_tolerance", "must be positive"));
        }
        if self.max_steps == 0 {
            return Err(ParamError::new("max_steps", "must be positive"));
        }
        check_unit_weight(self.w_g)?;
        Ok(())
    }

    /// Odd cell sizes from `first` (rounded up to odd, clamped) to `cellsize_max`.
    pub fn cellsizes_from(&self, first: usize) -> impl Iterator<Item = usize> {
        let first = first.clamp(self.cellsize_min, self.cellsize_max) | 1;
        (first..=self.cellsize_max).step_by(2)
    }
}
