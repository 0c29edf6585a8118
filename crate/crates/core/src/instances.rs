//! Built-in demo instances and seeded random unicycle instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{unicycle_constraints, ConstraintProfile};
use crate::error::Result;
use crate::path::{PathSpec, Point2};
use crate::scalar::Real;

/// Environment variable holding the seed for randomized instances.
pub const SEED_ENV: &str = "TOPP_NI_SEED";

pub const DEFAULT_SEED: u64 = 0x70_70_6e_69;

/// Control polygon of the demo path; curvature has two interior extrema of
/// opposite sign and one inflection.
pub const DEMO_CONTROL_POINTS: [[f64; 2]; 4] = [[0.0, 0.0], [2.0, 3.0], [5.0, -3.0], [8.0, 0.0]];

pub const DEMO_A_MAX: [f64; 2] = [0.05, 0.1];

/// Angular/linear velocity bounds of the two demo cases.
pub fn demo_v_max(case: u8) -> Option<[f64; 2]> {
    match case {
        1 => Some([0.5, 1.3]),
        2 => Some([0.2, 1.3]),
        _ => None,
    }
}

pub fn demo_path<T: Real>() -> Result<PathSpec<T>> {
    PathSpec::bezier(DEMO_CONTROL_POINTS.map(|p| p.map(T::lit)))
}

/// Demo unicycle instance for case 1 or 2; `None` for any other case.
pub fn demo_case<T: Real>(case: u8) -> Option<Result<ConstraintProfile<T>>> {
    let v_max = demo_v_max(case)?;
    Some(demo_path().and_then(|path| unicycle_constraints(path, v_max.map(T::lit), DEMO_A_MAX.map(T::lit))))
}

/// Seed from `TOPP_NI_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

#[derive(Debug, Clone)]
pub struct UnicycleInstance<T: Real> {
    pub seed: u64,
    pub control_points: [Point2<T>; 4],
    pub v_max: [T; 2],
    pub a_max: [T; 2],
    pub constraints: ConstraintProfile<T>,
}

/// Random Bézier path with random unicycle bounds, fully determined by `seed`.
pub fn random_unicycle_instance<T: Real>(seed: u64) -> Result<UnicycleInstance<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = rng.gen_range(4.0..10.0);
    let pts = [
        [0.0, 0.0],
        [rng.gen_range(0.15..0.45) * length, rng.gen_range(-3.5..3.5)],
        [rng.gen_range(0.55..0.85) * length, rng.gen_range(-3.5..3.5)],
        [length, rng.gen_range(-1.0..1.0)],
    ];
    let v_max = [rng.gen_range(0.1..0.8), rng.gen_range(0.8..2.0)];
    let a_max = [rng.gen_range(0.02..0.1), rng.gen_range(0.05..0.2)];
    let control_points = pts.map(|p| p.map(T::lit));
    let v_max = v_max.map(T::lit);
    let a_max = a_max.map(T::lit);
    let constraints = unicycle_constraints(PathSpec::bezier(control_points)?, v_max, a_max)?;
    Ok(UnicycleInstance { seed, control_points, v_max, a_max, constraints })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_cases() {
        assert!(demo_case::<f64>(1).unwrap().is_ok());
        assert!(demo_case::<f64>(2).unwrap().is_ok());
        assert!(demo_case::<f64>(3).is_none());
    }

    #[test]
    fn random_instances_are_reproducible() {
        let a = random_unicycle_instance::<f64>(7).unwrap();
        let b = random_unicycle_instance::<f64>(7).unwrap();
        assert_eq!(a.control_points, b.control_points);
        assert_eq!(a.v_max, b.v_max);
        let c = random_unicycle_instance::<f64>(8).unwrap();
        assert_ne!(a.control_points, c.control_points);
    }
}
