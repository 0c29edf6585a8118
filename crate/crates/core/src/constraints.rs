//! Path-projected constraint rows and the pointwise quantities derived from
//! them: extremal path accelerations `α`/`β`, the velocity limit `V(s)` and
//! the maximum velocity curve.
//!
//! Acceleration rows read `A_i(s)·s̈ + B_i(s)·ṡ² + C_i(s) ≤ 0`; velocity rows
//! read `A_i(s)·ṡ + D_i(s) ≤ 0`. All evaluations take `z = ṡ²` internally.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::bracket;
use crate::path::PathSpec;
use crate::scalar::{Bound, Real};

/// Rows with `|A_i| <= ZERO_INERTIA_TOL * max_j |A_j|` are treated as zero-inertia.
pub const ZERO_INERTIA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelRow<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityRow<T> {
    pub a: T,
    pub d: T,
}

/// Source of constraint rows along a path.
pub trait RowModel<T: Real>: Send + Sync + fmt::Debug {
    fn total_length(&self) -> T;
    fn accel_rows(&self, s: T) -> Vec<AccelRow<T>>;
    fn velocity_rows(&self, s: T) -> Vec<VelocityRow<T>>;
}

/// What determines the maximum velocity curve at a path point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvcSource {
    /// `β_upper = α_lower` for the given pair of acceleration rows.
    Pair { upper: usize, lower: usize },
    /// A zero-inertia row capping `ṡ²` directly through `B_i ṡ² + C_i <= 0`.
    ZeroInertiaCap { row: usize },
    /// No acceleration conflict at any velocity.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvcSample<T> {
    pub sdot: Bound<T>,
    pub source: MvcSource,
}

/// Constraint data `A, B, C` (and optionally `A, D`) evaluated along a path.
#[derive(Clone)]
pub struct ConstraintProfile<T: Real> {
    model: Arc<dyn RowModel<T>>,
    ignore_velocity: bool,
}

impl<T: Real> fmt::Debug for ConstraintProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintProfile")
            .field("model", &self.model)
            .field("ignore_velocity", &self.ignore_velocity)
            .finish()
    }
}

fn row_scale<T: Real>(values: impl Iterator<Item = T>) -> T {
    values.fold(T::zero(), |m, a| m.max(a.abs()))
}

impl<T: Real> ConstraintProfile<T> {
    pub fn from_model<M: RowModel<T> + 'static>(model: M) -> Self {
        Self { model: Arc::new(model), ignore_velocity: false }
    }

    pub fn from_shared(model: Arc<dyn RowModel<T>>) -> Self {
        Self { model, ignore_velocity: false }
    }

    /// Same acceleration rows with every velocity row dropped.
    pub fn without_velocity_rows(&self) -> Self {
        Self { model: Arc::clone(&self.model), ignore_velocity: true }
    }

    pub fn total_length(&self) -> T {
        self.model.total_length()
    }

    fn clamp(&self, s: T) -> T {
        s.max(T::zero()).min(self.total_length())
    }

    pub fn accel_rows(&self, s: T) -> Vec<AccelRow<T>> {
        self.model.accel_rows(self.clamp(s))
    }

    pub fn velocity_rows(&self, s: T) -> Vec<VelocityRow<T>> {
        if self.ignore_velocity {
            Vec::new()
        } else {
            self.model.velocity_rows(self.clamp(s))
        }
    }

    pub fn has_velocity_rows(&self) -> bool {
        !self.velocity_rows(T::zero()).is_empty()
    }

    /// Threshold under which `|A_i|` counts as zero at this point.
    pub fn zero_inertia_threshold(rows: &[AccelRow<T>]) -> T {
        T::lit(ZERO_INERTIA_TOL) * row_scale(rows.iter().map(|r| r.a))
    }

    /// `(α, β)` at `(s, z = ṡ²)` from pre-evaluated rows.
    pub fn extremes_from_rows(rows: &[AccelRow<T>], s: T, z: T) -> Result<(T, T)> {
        let tol = Self::zero_inertia_threshold(rows);
        let mut alpha: Option<T> = None;
        let mut beta: Option<T> = None;
        for r in rows {
            let bound = (-r.b * z - r.c) / r.a;
            if r.a < -tol {
                alpha = Some(alpha.map_or(bound, |a| a.max(bound)));
            } else if r.a > tol {
                beta = Some(beta.map_or(bound, |b| b.min(bound)));
            }
        }
        let alpha = alpha.ok_or(Error::AlphaUndefined { s: s.to_f64_lossy() })?;
        let beta = beta.ok_or(Error::BetaUndefined { s: s.to_f64_lossy() })?;
        Ok((alpha, beta))
    }

    /// Minimum and maximum path acceleration at `(s, z = ṡ²)`.
    pub fn extremes(&self, s: T, z: T) -> Result<(T, T)> {
        Self::extremes_from_rows(&self.accel_rows(s), s, z)
    }

    /// Minimum feasible path acceleration `α(s, ṡ)`.
    pub fn alpha(&self, s: T, sdot: T) -> Result<T> {
        let rows = self.accel_rows(s);
        let tol = Self::zero_inertia_threshold(&rows);
        let z = sdot * sdot;
        rows.iter()
            .filter(|r| r.a < -tol)
            .map(|r| (-r.b * z - r.c) / r.a)
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
            .ok_or(Error::AlphaUndefined { s: s.to_f64_lossy() })
    }

    /// Maximum feasible path acceleration `β(s, ṡ)`.
    pub fn beta(&self, s: T, sdot: T) -> Result<T> {
        let rows = self.accel_rows(s);
        let tol = Self::zero_inertia_threshold(&rows);
        let z = sdot * sdot;
        rows.iter()
            .filter(|r| r.a > tol)
            .map(|r| (-r.b * z - r.c) / r.a)
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |b| b.min(v))))
            .ok_or(Error::BetaUndefined { s: s.to_f64_lossy() })
    }

    /// Largest `ṡ >= 0` allowed by the velocity rows at `s`.
    pub fn velocity_limit(&self, s: T) -> Result<Bound<T>> {
        let rows = self.velocity_rows(s);
        let tol = T::lit(ZERO_INERTIA_TOL) * row_scale(rows.iter().map(|r| r.a));
        let mut limit = Bound::Unbounded;
        for r in &rows {
            if r.d > T::zero() {
                return Err(Error::VelocityInfeasible { s: s.to_f64_lossy() });
            }
            if r.a > tol {
                limit = limit.min(Bound::Finite(-r.d / r.a));
            }
            // a <= 0 with d <= 0 holds for every sdot >= 0
        }
        Ok(limit)
    }

    /// Maximum velocity curve at `s` by closed-form pairwise intersection of
    /// the upper and lower acceleration bounds, plus direct caps from
    /// zero-inertia rows.
    pub fn mvc_at(&self, s: T) -> Result<MvcSample<T>> {
        Self::mvc_from_rows(&self.accel_rows(s), s)
    }

    pub fn mvc_from_rows(rows: &[AccelRow<T>], s: T) -> Result<MvcSample<T>> {
        let tol = Self::zero_inertia_threshold(rows);
        let zero = || Error::ZeroMvc { s: s.to_f64_lossy() };
        let mut best: Option<(T, MvcSource)> = None;
        let mut offer = |z: T, src: MvcSource| {
            if best.map_or(true, |(b, _)| z < b) {
                best = Some((z, src));
            }
        };
        for (i, r) in rows.iter().enumerate() {
            if r.a.abs() <= tol {
                if r.b > T::zero() {
                    let cap = -r.c / r.b;
                    if !(cap > T::zero()) {
                        return Err(zero());
                    }
                    offer(cap, MvcSource::ZeroInertiaCap { row: i });
                } else if r.c > T::zero() {
                    return Err(zero());
                }
                continue;
            }
            if r.a <= tol {
                continue;
            }
            for (j, q) in rows.iter().enumerate() {
                if q.a >= -tol {
                    continue;
                }
                // beta_i(z) - alpha_j(z) = c0 + c1 z
                let c0 = -r.c / r.a + q.c / q.a;
                let c1 = -r.b / r.a + q.b / q.a;
                if !(c0 > T::zero()) {
                    return Err(zero());
                }
                if c1 < T::zero() {
                    offer(-c0 / c1, MvcSource::Pair { upper: i, lower: j });
                }
            }
        }
        Ok(match best {
            Some((z, source)) => MvcSample { sdot: Bound::Finite(z.sqrt()), source },
            None => MvcSample { sdot: Bound::Unbounded, source: MvcSource::None },
        })
    }

    /// `min(MVC(s), V(s))`.
    pub fn mvc_star_at(&self, s: T) -> Result<Bound<T>> {
        Ok(self.mvc_at(s)?.sdot.min(self.velocity_limit(s)?))
    }
}

// ---------------------------------------------------------------------------
// Unicycle

/// Unicycle following a planar path with bounded angular/linear velocity and
/// acceleration. Row order is `[ω, v, -ω, -v]`.
#[derive(Debug, Clone)]
pub struct UnicycleModel<T> {
    pub path: PathSpec<T>,
    /// `[ω_max (rad/s), v_max (m/s)]`
    pub v_max: [T; 2],
    /// `[ω̇_max (rad/s²), v̇_max (m/s²)]`
    pub a_max: [T; 2],
}

impl<T: Real> RowModel<T> for UnicycleModel<T> {
    fn total_length(&self) -> T {
        self.path.total_length()
    }

    fn accel_rows(&self, s: T) -> Vec<AccelRow<T>> {
        let k = self.path.curvature(s);
        let ks = self.path.curvature_rate(s);
        let [aw, av] = self.a_max;
        vec![
            AccelRow { a: k, b: ks, c: -aw },
            AccelRow { a: T::one(), b: T::zero(), c: -av },
            AccelRow { a: -k, b: -ks, c: -aw },
            AccelRow { a: -T::one(), b: T::zero(), c: -av },
        ]
    }

    fn velocity_rows(&self, s: T) -> Vec<VelocityRow<T>> {
        let k = self.path.curvature(s);
        let [vw, vv] = self.v_max;
        vec![
            VelocityRow { a: k, d: -vw },
            VelocityRow { a: T::one(), d: -vv },
            VelocityRow { a: -k, d: -vw },
            VelocityRow { a: -T::one(), d: -vv },
        ]
    }
}

/// Constraint rows of a unicycle tracking `path` under componentwise bounds
/// `|[ω, v]| <= v_max` and `|[ω̇, v̇]| <= a_max`.
pub fn unicycle_constraints<T: Real>(
    path: PathSpec<T>,
    v_max: [T; 2],
    a_max: [T; 2],
) -> Result<ConstraintProfile<T>> {
    for (name, v) in [("v_max", v_max), ("a_max", a_max)] {
        if v.iter().any(|x| !(*x > T::zero()) || !x.is_finite()) {
            return Err(Error::InvalidBound(format!(
                "{name} must be strictly positive and finite, got [{}, {}]",
                v[0], v[1]
            )));
        }
    }
    Ok(ConstraintProfile::from_model(UnicycleModel { path, v_max, a_max }))
}

// ---------------------------------------------------------------------------
// Generalized dynamics

/// `ξ(s)` and its first two arc-length derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSample<T> {
    pub xi: Vec<T>,
    pub xi_s: Vec<T>,
    pub xi_ss: Vec<T>,
}

pub type StateMap<T> = Arc<dyn Fn(T) -> StateSample<T> + Send + Sync>;
pub type MatrixMap<T> = Arc<dyn Fn(&[T]) -> Vec<Vec<T>> + Send + Sync>;
pub type TensorMap<T> = Arc<dyn Fn(&[T]) -> Vec<Vec<Vec<T>>> + Send + Sync>;
pub type VectorMap<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// Inequality `M(ξ)ξ̈ + ξ̇ᵀP(ξ)ξ̇ + Q(ξ) <= 0` along a state curve `ξ(s)`.
///
/// `M` is `m×n`, `P` is indexed `[j][i][k]` with shape `n×m×n`, `Q` has `m`
/// entries and `ξ` has `n`.
#[derive(Clone)]
pub struct GeneralizedDynamics<T> {
    pub n: usize,
    pub m: usize,
    pub total_length: T,
    pub state: StateMap<T>,
    pub inertia: MatrixMap<T>,
    pub quadratic: TensorMap<T>,
    pub bias: VectorMap<T>,
}

impl<T: Real> fmt::Debug for GeneralizedDynamics<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralizedDynamics")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("total_length", &self.total_length)
            .finish_non_exhaustive()
    }
}

impl<T: Real> GeneralizedDynamics<T> {
    fn check_at(&self, s: T) -> Result<()> {
        let (n, m) = (self.n, self.m);
        let mismatch = |what: String| Err(Error::DimensionMismatch(what));
        let st = (self.state)(s);
        if st.xi.len() != n || st.xi_s.len() != n || st.xi_ss.len() != n {
            return mismatch(format!("state map must return {n}-vectors at s = {s}"));
        }
        let mm = (self.inertia)(&st.xi);
        if mm.len() != m || mm.iter().any(|row| row.len() != n) {
            return mismatch(format!("inertia must be {m}x{n}"));
        }
        let p = (self.quadratic)(&st.xi);
        if p.len() != n || p.iter().any(|mat| mat.len() != m || mat.iter().any(|r| r.len() != n)) {
            return mismatch(format!("quadratic tensor must be {n}x{m}x{n}"));
        }
        if (self.bias)(&st.xi).len() != m {
            return mismatch(format!("bias must have {m} entries"));
        }
        Ok(())
    }

    fn rows_at(&self, s: T) -> Vec<AccelRow<T>> {
        let st = (self.state)(s);
        let mm = (self.inertia)(&st.xi);
        let p = (self.quadratic)(&st.xi);
        let q = (self.bias)(&st.xi);
        (0..self.m)
            .map(|i| {
                let dot = |v: &[T]| mm[i].iter().zip(v).fold(T::zero(), |acc, (x, y)| acc + *x * *y);
                let mut quad = T::zero();
                for j in 0..self.n {
                    for k in 0..self.n {
                        quad = quad + st.xi_s[j] * p[j][i][k] * st.xi_s[k];
                    }
                }
                AccelRow { a: dot(&st.xi_s), b: dot(&st.xi_ss) + quad, c: q[i] }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct DynamicsModel<T: Real> {
    dynamics: GeneralizedDynamics<T>,
}

impl<T: Real> RowModel<T> for DynamicsModel<T> {
    fn total_length(&self) -> T {
        self.dynamics.total_length
    }

    fn accel_rows(&self, s: T) -> Vec<AccelRow<T>> {
        self.dynamics.rows_at(s)
    }

    fn velocity_rows(&self, _s: T) -> Vec<VelocityRow<T>> {
        Vec::new()
    }
}

/// Projects generalized dynamics onto the path:
/// `A = M ξ_s`, `B = M ξ_ss + ξ_sᵀ P ξ_s`, `C = Q`.
pub fn from_generalized_dynamics<T: Real>(dynamics: GeneralizedDynamics<T>) -> Result<ConstraintProfile<T>> {
    if dynamics.n == 0 || dynamics.m == 0 {
        return Err(Error::DimensionMismatch("n and m must be positive".into()));
    }
    let len = dynamics.total_length;
    if !(len > T::zero()) || !len.is_finite() {
        return Err(Error::ZeroLengthPath);
    }
    for s in [T::zero(), len * T::half(), len] {
        dynamics.check_at(s)?;
    }
    Ok(ConstraintProfile::from_model(DynamicsModel { dynamics }))
}

// ---------------------------------------------------------------------------
// Tabulated rows

/// Rows sampled on an increasing `s` grid, linearly interpolated between nodes.
#[derive(Debug, Clone)]
pub struct TabulatedModel<T> {
    grid: Vec<T>,
    accel: Vec<Vec<AccelRow<T>>>,
    velocity: Vec<Vec<VelocityRow<T>>>,
}

impl<T: Real> TabulatedModel<T> {
    pub fn new(
        grid: Vec<T>,
        accel: Vec<Vec<AccelRow<T>>>,
        velocity: Vec<Vec<VelocityRow<T>>>,
    ) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidArgument("tabulated rows need at least 2 grid nodes".into()));
        }
        if grid[0] != T::zero() {
            return Err(Error::InvalidArgument("tabulated grid must start at s = 0".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("tabulated grid must be strictly increasing".into()));
        }
        if accel.len() != grid.len() {
            return Err(Error::DimensionMismatch("one acceleration row set per grid node".into()));
        }
        let m = accel[0].len();
        if m == 0 || accel.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("acceleration row count must be constant and positive".into()));
        }
        if !velocity.is_empty() {
            if velocity.len() != grid.len() {
                return Err(Error::DimensionMismatch("one velocity row set per grid node".into()));
            }
            let mv = velocity[0].len();
            if velocity.iter().any(|r| r.len() != mv) {
                return Err(Error::DimensionMismatch("velocity row count must be constant".into()));
            }
        }
        let finite_accel = accel.iter().flatten().all(|r| r.a.is_finite() && r.b.is_finite() && r.c.is_finite());
        let finite_vel = velocity.iter().flatten().all(|r| r.a.is_finite() && r.d.is_finite());
        if !finite_accel || !finite_vel {
            return Err(Error::InvalidArgument("tabulated rows must be finite".into()));
        }
        Ok(Self { grid, accel, velocity })
    }

    fn weights(&self, s: T) -> (usize, T) {
        let k = bracket(&self.grid, s);
        let t = (s - self.grid[k]) / (self.grid[k + 1] - self.grid[k]);
        (k, t.max(T::zero()).min(T::one()))
    }
}

impl<T: Real> RowModel<T> for TabulatedModel<T> {
    fn total_length(&self) -> T {
        *self.grid.last().expect("grid has at least two nodes")
    }

    fn accel_rows(&self, s: T) -> Vec<AccelRow<T>> {
        let (k, t) = self.weights(s);
        let mix = |x: T, y: T| x + (y - x) * t;
        self.accel[k]
            .iter()
            .zip(&self.accel[k + 1])
            .map(|(l, r)| AccelRow { a: mix(l.a, r.a), b: mix(l.b, r.b), c: mix(l.c, r.c) })
            .collect()
    }

    fn velocity_rows(&self, s: T) -> Vec<VelocityRow<T>> {
        if self.velocity.is_empty() {
            return Vec::new();
        }
        let (k, t) = self.weights(s);
        let mix = |x: T, y: T| x + (y - x) * t;
        self.velocity[k]
            .iter()
            .zip(&self.velocity[k + 1])
            .map(|(l, r)| VelocityRow { a: mix(l.a, r.a), d: mix(l.d, r.d) })
            .collect()
    }
}
