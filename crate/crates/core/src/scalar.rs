//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the planner is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or constant into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A possibly unbounded upper limit on path velocity.
///
/// `Unbounded` is a distinct state rather than a large float so that taking
/// the minimum with a finite bound is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound<T> {
    Finite(T),
    Unbounded,
}

impl<T: Real> Bound<T> {
    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    /// The bound as a float, `+inf` when unbounded.
    pub fn value(self) -> T {
        match self {
            Bound::Finite(v) => v,
            Bound::Unbounded => T::infinity(),
        }
    }

    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(if b < a { b } else { a }),
            (Bound::Finite(a), Bound::Unbounded) | (Bound::Unbounded, Bound::Finite(a)) => {
                Bound::Finite(a)
            }
            (Bound::Unbounded, Bound::Unbounded) => Bound::Unbounded,
        }
    }

    /// Square of the bound (`Unbounded` stays unbounded).
    pub fn squared(self) -> Self {
        match self {
            Bound::Finite(v) => Bound::Finite(v * v),
            Bound::Unbounded => Bound::Unbounded,
        }
    }

    /// `true` when `x` lies strictly below the bound.
    pub fn exceeds(self, x: T) -> bool {
        match self {
            Bound::Finite(v) => v > x,
            Bound::Unbounded => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_with_sentinel_is_exact() {
        let a = Bound::Finite(1.3_f64);
        assert_eq!(a.min(Bound::Unbounded), Bound::Finite(1.3));
        assert_eq!(Bound::<f64>::Unbounded.min(Bound::Unbounded), Bound::Unbounded);
        assert_eq!(a.min(Bound::Finite(0.4)), Bound::Finite(0.4));
        assert!(Bound::<f32>::Unbounded.value().is_infinite());
    }
}
