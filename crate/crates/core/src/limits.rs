//! Sampled limit curves: MVC, the velocity limit `V`, their pointwise minimum
//! MVC* and the velocity-bound stretches (MVC†) where `V` is strictly lower.

use crate::constraints::{ConstraintProfile, MvcSource};
use crate::error::{Error, Result};
use crate::scalar::{Bound, Real};

/// Relative margin for the strict `V < MVC` test.
pub const DAGGER_MARGIN: f64 = 1e-9;

const BOUNDARY_BISECTIONS: usize = 60;

/// Closed `s`-interval of MVC† (velocity limit strictly below MVC).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaggerSegment<T> {
    pub start: T,
    pub end: T,
}

impl<T: Real> DaggerSegment<T> {
    pub fn contains(&self, s: T) -> bool {
        s >= self.start && s <= self.end
    }

    pub fn length(&self) -> T {
        self.end - self.start
    }
}

#[derive(Debug, Clone)]
pub struct LimitCurves<T> {
    pub grid: Vec<T>,
    pub mvc: Vec<Bound<T>>,
    pub mvc_source: Vec<MvcSource>,
    pub vlim: Vec<Bound<T>>,
    pub mvc_star: Vec<Bound<T>>,
    pub dagger: Vec<bool>,
    pub dagger_segments: Vec<DaggerSegment<T>>,
    /// Absolute margin used for the strict `V < MVC` comparison.
    pub margin: T,
}

impl<T: Real> LimitCurves<T> {
    pub fn total_length(&self) -> T {
        *self.grid.last().expect("limit grid is never empty")
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn spacing(&self) -> T {
        self.grid[1] - self.grid[0]
    }

    pub fn in_dagger(&self, s: T) -> bool {
        self.dagger_segments.iter().any(|d| d.contains(s))
    }

    /// Largest finite value over MVC* and V, used as the velocity scale.
    pub fn velocity_scale(&self) -> T {
        self.mvc_star
            .iter()
            .chain(self.vlim.iter())
            .chain(self.mvc.iter())
            .filter_map(|b| b.finite())
            .fold(T::zero(), |m, v| m.max(v))
    }
}

fn is_dagger<T: Real>(mvc: Bound<T>, vlim: Bound<T>, margin: T) -> bool {
    match (vlim, mvc) {
        (Bound::Unbounded, _) => false,
        (Bound::Finite(_), Bound::Unbounded) => true,
        (Bound::Finite(v), Bound::Finite(m)) => v < m - margin,
    }
}

/// Samples MVC, V and MVC* on `grid_n` uniform nodes and extracts the
/// maximal MVC† intervals, refining their endpoints by bisection.
pub fn compute_limit_curves<T: Real>(cp: &ConstraintProfile<T>, grid_n: usize) -> Result<LimitCurves<T>> {
    if grid_n < 16 {
        return Err(Error::InvalidArgument(format!("limit grid needs at least 16 nodes, got {grid_n}")));
    }
    let total = cp.total_length();
    let n = grid_n - 1;
    let grid: Vec<T> = (0..grid_n)
        .map(|k| if k == n { total } else { total * T::from_usize_lossy(k) / T::from_usize_lossy(n) })
        .collect();

    let mut mvc = Vec::with_capacity(grid_n);
    let mut mvc_source = Vec::with_capacity(grid_n);
    let mut vlim = Vec::with_capacity(grid_n);
    for &s in &grid {
        let sample = cp.mvc_at(s)?;
        mvc.push(sample.sdot);
        mvc_source.push(sample.source);
        vlim.push(cp.velocity_limit(s)?);
    }
    let mvc_star: Vec<Bound<T>> = mvc.iter().zip(&vlim).map(|(m, v)| m.min(*v)).collect();

    let scale = mvc
        .iter()
        .chain(vlim.iter())
        .filter_map(|b| b.finite())
        .fold(T::zero(), |m, v| m.max(v));
    let margin = T::lit(DAGGER_MARGIN) * scale.max(T::one());
    let dagger: Vec<bool> = mvc.iter().zip(&vlim).map(|(m, v)| is_dagger(*m, *v, margin)).collect();

    let flag_at = |s: T| -> Result<bool> {
        Ok(is_dagger(cp.mvc_at(s)?.sdot, cp.velocity_limit(s)?, margin))
    };
    // bisect between a flagged point and an unflagged one
    let refine = |mut inside: T, mut outside: T| -> Result<T> {
        for _ in 0..BOUNDARY_BISECTIONS {
            let mid = (inside + outside) * T::half();
            if flag_at(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(inside)
    };

    let mut dagger_segments = Vec::new();
    let mut k = 0;
    while k < grid_n {
        if !dagger[k] {
            k += 1;
            continue;
        }
        let first = k;
        while k + 1 < grid_n && dagger[k + 1] {
            k += 1;
        }
        let last = k;
        let start = if first == 0 { grid[0] } else { refine(grid[first], grid[first - 1])? };
        let end = if last == n { grid[n] } else { refine(grid[last], grid[last + 1])? };
        dagger_segments.push(DaggerSegment { start, end });
        k += 1;
    }

    Ok(LimitCurves { grid, mvc, mvc_source, vlim, mvc_star, dagger, dagger_segments, margin })
}
