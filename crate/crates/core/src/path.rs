//! Planar geometric paths parameterized by arc length.
//!
//! A [`BezierPath`] stores a cubic Bézier curve together with a table mapping
//! the curve parameter `λ ∈ [0, 1]` to arc length. [`PathSpec`] is the view the
//! planner consumes: total length, curvature `κ(s)` and its arc-length
//! derivative `κ_s(s)`.

use crate::error::{Error, Result};
use crate::interp::{bracket, gauss_legendre5, MonotoneCubic};
use crate::scalar::Real;

pub type Point2<T> = [T; 2];

/// Default number of arc-length table nodes (200 quadrature sub-intervals).
pub const DEFAULT_ARC_SAMPLES: usize = 201;

const NEWTON_ITERS: usize = 8;

/// Cubic Bézier curve with an arc-length reparameterization table.
#[derive(Debug, Clone)]
pub struct BezierPath<T> {
    control_points: [Point2<T>; 4],
    lambdas: Vec<T>,
    arc: Vec<T>,
    inverse: MonotoneCubic<T>,
}

impl<T: Real> BezierPath<T> {
    /// Builds the curve and its arc table with `samples` nodes.
    pub fn new(control_points: [Point2<T>; 4], samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "arc table needs at least 2 samples, got {samples}"
            )));
        }
        if control_points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPath("non-finite control point".into()));
        }
        let scale = control_points
            .iter()
            .flatten()
            .fold(T::one(), |m, c| m.max(c.abs()));
        let mut path = Self {
            control_points,
            lambdas: Vec::new(),
            arc: Vec::new(),
            inverse: MonotoneCubic::new(vec![T::zero(), T::one()], vec![T::zero(), T::one()]),
        };

        let n = samples - 1;
        let mut lambdas = Vec::with_capacity(samples);
        let mut arc = Vec::with_capacity(samples);
        lambdas.push(T::zero());
        arc.push(T::zero());
        for k in 1..=n {
            let a = T::from_usize_lossy(k - 1) / T::from_usize_lossy(n);
            let b = T::from_usize_lossy(k) / T::from_usize_lossy(n);
            let ds = gauss_legendre5(|l| path.speed(l), a, b);
            lambdas.push(b);
            arc.push(arc[k - 1] + ds);
        }
        let total = arc[n];
        if !(total > T::lit(1e-12) * scale) {
            return Err(Error::ZeroLengthPath);
        }
        if arc.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPath("arc table is not strictly increasing".into()));
        }
        path.inverse = MonotoneCubic::new(arc.clone(), lambdas.clone());
        path.lambdas = lambdas;
        path.arc = arc;
        Ok(path)
    }

    pub fn control_points(&self) -> &[Point2<T>; 4] {
        &self.control_points
    }

    /// `(λ, s)` nodes of the arc table.
    pub fn arc_table(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.lambdas.iter().copied().zip(self.arc.iter().copied())
    }

    pub fn total_length(&self) -> T {
        *self.arc.last().expect("arc table is never empty")
    }

    pub fn position(&self, lambda: T) -> Point2<T> {
        let [p0, p1, p2, p3] = self.control_points;
        let u = T::one() - lambda;
        let three = T::lit(3.0);
        let b0 = u * u * u;
        let b1 = three * u * u * lambda;
        let b2 = three * (lambda * lambda - lambda * lambda * lambda);
        let b3 = lambda * lambda * lambda;
        [
            b0 * p0[0] + b1 * p1[0] + b2 * p2[0] + b3 * p3[0],
            b0 * p0[1] + b1 * p1[1] + b2 * p2[1] + b3 * p3[1],
        ]
    }

    /// First, second and third derivatives with respect to `λ`.
    pub fn derivatives(&self, lambda: T) -> [Point2<T>; 3] {
        let [p0, p1, p2, p3] = self.control_points;
        let u = T::one() - lambda;
        let three = T::lit(3.0);
        let six = T::lit(6.0);
        let mut d = [[T::zero(); 2]; 3];
        for c in 0..2 {
            let q0 = p1[c] - p0[c];
            let q1 = p2[c] - p1[c];
            let q2 = p3[c] - p2[c];
            d[0][c] = three * (u * u * q0 + T::two() * u * lambda * q1 + lambda * lambda * q2);
            d[1][c] = six * (u * (q1 - q0) + lambda * (q2 - q1));
            d[2][c] = six * (q2 - T::two() * q1 + q0);
        }
        d
    }

    fn speed(&self, lambda: T) -> T {
        let [d1, _, _] = self.derivatives(lambda);
        d1[0].hypot(d1[1])
    }

    /// Arc length from the start to parameter `λ`.
    pub fn arc_length_at(&self, lambda: T) -> T {
        let lambda = lambda.max(T::zero()).min(T::one());
        let k = bracket(&self.lambdas, lambda);
        self.arc[k] + gauss_legendre5(|l| self.speed(l), self.lambdas[k], lambda)
    }

    /// Curve parameter at arc length `s` (monotone cubic guess polished by Newton).
    pub fn lambda_at(&self, s: T) -> T {
        let total = self.total_length();
        let s = s.max(T::zero()).min(total);
        let mut lambda = self.inverse.eval(s).max(T::zero()).min(T::one());
        for _ in 0..NEWTON_ITERS {
            let residual = self.arc_length_at(lambda) - s;
            let speed = self.speed(lambda);
            if !(speed > T::zero()) {
                break;
            }
            let step = residual / speed;
            lambda = (lambda - step).max(T::zero()).min(T::one());
            if step.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        lambda
    }

    pub fn position_at_s(&self, s: T) -> Point2<T> {
        self.position(self.lambda_at(s))
    }

    /// Curvature and its derivative with respect to `λ`, or `None` where the
    /// curve has zero speed.
    fn curvature_lambda(&self, lambda: T) -> Option<(T, T, T)> {
        let [d1, d2, d3] = self.derivatives(lambda);
        let speed = d1[0].hypot(d1[1]);
        if !(speed > T::lit(1e-12)) {
            return None;
        }
        let cross = d1[0] * d2[1] - d1[1] * d2[0];
        let cross_rate = d1[0] * d3[1] - d1[1] * d3[0];
        let speed_rate = (d1[0] * d2[0] + d1[1] * d2[1]) / speed;
        let s3 = speed * speed * speed;
        let kappa = cross / s3;
        let kappa_lambda = (cross_rate * speed - T::lit(3.0) * cross * speed_rate) / (s3 * speed);
        Some((kappa, kappa_lambda, speed))
    }

    pub fn curvature(&self, s: T) -> T {
        match self.curvature_lambda(self.lambda_at(s)) {
            Some((k, _, _)) => k,
            None => {
                // cusp: average of the one-sided neighbours
                let h = self.total_length() * T::lit(1e-4);
                (self.curvature(s - h) + self.curvature(s + h)) * T::half()
            }
        }
    }

    pub fn curvature_rate(&self, s: T) -> T {
        match self.curvature_lambda(self.lambda_at(s)) {
            Some((_, kl, speed)) => kl / speed,
            None => {
                let total = self.total_length();
                let h = total * T::lit(1e-4);
                let lo = (s - h).max(T::zero());
                let hi = (s + h).min(total);
                (self.curvature(hi) - self.curvature(lo)) / (hi - lo)
            }
        }
    }

    pub fn to_path_spec(self) -> PathSpec<T> {
        PathSpec::Bezier(self)
    }
}

/// Arc-length parameterized planar path as seen by the constraint models.
#[derive(Debug, Clone)]
pub enum PathSpec<T> {
    /// Straight segment.
    Line { length: T },
    /// Circular arc of the given radius (counter-clockwise, positive curvature).
    Circle { radius: T, length: T },
    /// Curvature varying linearly with arc length, `κ(s) = k0 + k1·s`.
    Clothoid { length: T, k0: T, k1: T },
    Bezier(BezierPath<T>),
}

impl<T: Real> PathSpec<T> {
    pub fn line(length: T) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::ZeroLengthPath);
        }
        Ok(PathSpec::Line { length })
    }

    pub fn circle(radius: T, length: T) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::ZeroLengthPath);
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidPath(format!("circle radius must be positive, got {radius}")));
        }
        Ok(PathSpec::Circle { radius, length })
    }

    pub fn clothoid(length: T, k0: T, k1: T) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::ZeroLengthPath);
        }
        if !k0.is_finite() || !k1.is_finite() {
            return Err(Error::InvalidPath("non-finite clothoid coefficients".into()));
        }
        Ok(PathSpec::Clothoid { length, k0, k1 })
    }

    pub fn bezier(control_points: [Point2<T>; 4]) -> Result<Self> {
        BezierPath::new(control_points, DEFAULT_ARC_SAMPLES).map(PathSpec::Bezier)
    }

    pub fn total_length(&self) -> T {
        match self {
            PathSpec::Line { length }
            | PathSpec::Circle { length, .. }
            | PathSpec::Clothoid { length, .. } => *length,
            PathSpec::Bezier(b) => b.total_length(),
        }
    }

    /// Curvature at arc length `s` (clamped into the path).
    pub fn curvature(&self, s: T) -> T {
        let s = s.max(T::zero()).min(self.total_length());
        match self {
            PathSpec::Line { .. } => T::zero(),
            PathSpec::Circle { radius, .. } => T::one() / *radius,
            PathSpec::Clothoid { k0, k1, .. } => *k0 + *k1 * s,
            PathSpec::Bezier(b) => b.curvature(s),
        }
    }

    /// Derivative of curvature with respect to arc length.
    pub fn curvature_rate(&self, s: T) -> T {
        let s = s.max(T::zero()).min(self.total_length());
        match self {
            PathSpec::Line { .. } | PathSpec::Circle { .. } => T::zero(),
            PathSpec::Clothoid { k1, .. } => *k1,
            PathSpec::Bezier(b) => b.curvature_rate(s),
        }
    }
}

impl<T: Real> From<BezierPath<T>> for PathSpec<T> {
    fn from(b: BezierPath<T>) -> Self {
        PathSpec::Bezier(b)
    }
}
