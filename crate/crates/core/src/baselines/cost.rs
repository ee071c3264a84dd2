//! Path-cost scalars for 8-connected grid search.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::Add;

use serde::Serialize;

/// Cost type of 8-connected grid search: unit axial moves, `sqrt(2)` diagonals.
pub trait PathCost: Copy + PartialEq + PartialOrd + Add<Output = Self> + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn axial() -> Self;
    fn diagonal() -> Self;
    fn to_f64(self) -> f64;

    /// Octile distance between cells `dx`, `dy` apart.
    fn octile(dx: usize, dy: usize) -> Self {
        let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
        Self::times(Self::axial(), hi - lo) + Self::times(Self::diagonal(), lo)
    }

    fn times(unit: Self, n: usize) -> Self {
        let mut acc = Self::zero();
        for _ in 0..n {
            acc = acc + unit;
        }
        acc
    }

    /// Total order used by priority queues; incomparable values compare equal.
    fn order(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl PathCost for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axial() -> Self {
        1.0
    }
    fn diagonal() -> Self {
        std::f64::consts::SQRT_2
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn times(unit: Self, n: usize) -> Self {
        unit * n as f64
    }
}

impl PathCost for f32 {
    fn zero() -> Self {
        0.0
    }
    fn axial() -> Self {
        1.0
    }
    fn diagonal() -> Self {
        std::f32::consts::SQRT_2
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn times(unit: Self, n: usize) -> Self {
        unit * n as f32
    }
}

/// Exact octile cost `axial + diagonal * sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct OctileCost {
    pub axial: u64,
    pub diagonal: u64,
}

impl OctileCost {
    pub fn new(axial: u64, diagonal: u64) -> Self {
        Self { axial, diagonal }
    }
}

impl Add for OctileCost {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            axial: self.axial + o.axial,
            diagonal: self.diagonal + o.diagonal,
        }
    }
}

impl Ord for OctileCost {
    fn cmp(&self, o: &Self) -> Ordering {
        // a1 + b1 r  vs  a2 + b2 r   <=>   (a1 - a2)  vs  (b2 - b1) r
        let da = self.axial as i128 - o.axial as i128;
        let db = o.diagonal as i128 - self.diagonal as i128;
        if da == 0 && db == 0 {
            Ordering::Equal
        } else if da >= 0 && db <= 0 {
            Ordering::Greater
        } else if da <= 0 && db >= 0 {
            Ordering::Less
        } else if da > 0 {
            (da * da).cmp(&(2 * db * db))
        } else {
            (2 * db * db).cmp(&(da * da))
        }
    }
}

impl PartialOrd for OctileCost {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Display for OctileCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*sqrt2", self.axial, self.diagonal)
    }
}

impl PathCost for OctileCost {
    fn zero() -> Self {
        Self::default()
    }
    fn axial() -> Self {
        Self::new(1, 0)
    }
    fn diagonal() -> Self {
        Self::new(0, 1)
    }
    fn to_f64(self) -> f64 {
        self.axial as f64 + self.diagonal as f64 * std::f64::consts::SQRT_2
    }
    fn times(unit: Self, n: usize) -> Self {
        Self::new(unit.axial * n as u64, unit.diagonal * n as u64)
    }
}

/// A cost or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext<C> {
    Fin(C),
    Inf,
}

impl<C: PathCost> Ext<C> {
    pub fn is_inf(&self) -> bool {
        matches!(self, Ext::Inf)
    }

    pub fn plus(self, c: C) -> Self {
        match self {
            Ext::Fin(v) => Ext::Fin(v + c),
            Ext::Inf => Ext::Inf,
        }
    }

    pub fn order(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Ext::Inf, Ext::Inf) => Ordering::Equal,
            (Ext::Inf, _) => Ordering::Greater,
            (_, Ext::Inf) => Ordering::Less,
            (Ext::Fin(a), Ext::Fin(b)) => a.order(b),
        }
    }

    pub fn min(self, o: Self) -> Self {
        if o.order(&self) == Ordering::Less {
            o
        } else {
            self
        }
    }

    pub fn finite(self) -> Option<C> {
        match self {
            Ext::Fin(c) => Some(c),
            Ext::Inf => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn octile_examples() {
        assert_eq!(OctileCost::octile(9, 9), OctileCost::new(0, 9));
        assert!((OctileCost::octile(9, 9).to_f64() - 12.728).abs() < 1e-3);
        assert_eq!(OctileCost::octile(3, 5), OctileCost::new(2, 3));
        assert_eq!(f64::octile(1, 0), 1.0);
        assert_eq!(f64::octile(1, 1), std::f64::consts::SQRT_2);
    }

    #[test]
    fn exact_comparison_near_ties() {
        // 99 / 70 is a convergent of sqrt(2): 70 sqrt2 ~ 98.9949
        assert!(OctileCost::new(0, 70) < OctileCost::new(99, 0));
        assert!(OctileCost::new(0, 70) > OctileCost::new(98, 0));
        assert!(OctileCost::new(99, 0) > OctileCost::new(0, 70));
        assert_eq!(OctileCost::new(5, 5).cmp(&OctileCost::new(5, 5)), Ordering::Equal);
        assert!(OctileCost::new(10, 1) > OctileCost::new(0, 8));
    }

    proptest! {
        #[test]
        fn exact_order_agrees_with_floats_when_apart(
            a1 in 0u64..10_000, b1 in 0u64..10_000, a2 in 0u64..10_000, b2 in 0u64..10_000,
        ) {
            let (x, y) = (OctileCost::new(a1, b1), OctileCost::new(a2, b2));
            let (fx, fy) = (x.to_f64(), y.to_f64());
            if (fx - fy).abs() > 1e-6 {
                prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
            }
            prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
            prop_assert_eq!(x.cmp(&y) == Ordering::Equal, x == y);
        }
    }

    #[test]
    fn ext_ordering() {
        let a: Ext<f64> = Ext::Fin(3.0);
        assert_eq!(a.order(&Ext::Inf), Ordering::Less);
        assert_eq!(Ext::<f64>::Inf.plus(1.0), Ext::Inf);
        assert_eq!(a.min(Ext::Fin(2.0)), Ext::Fin(2.0));
    }
}
