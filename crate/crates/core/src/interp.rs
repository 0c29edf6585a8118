//! Small interpolation and quadrature helpers.

use crate::scalar::Real;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre5<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> T {
    let half = (b - a) * T::half();
    let mid = (a + b) * T::half();
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .fold(T::zero(), |acc, (&x, &w)| acc + T::lit(w) * f(mid + half * T::lit(x)))
        * half
}

/// Index `k` such that `xs[k] <= x <= xs[k + 1]`, clamped to the table.
pub fn bracket<T: Real>(xs: &[T], x: T) -> usize {
    debug_assert!(xs.len() >= 2);
    let n = xs.len();
    if x <= xs[0] {
        return 0;
    }
    if x >= xs[n - 1] {
        return n - 2;
    }
    let k = xs.partition_point(|&v| v <= x);
    k.saturating_sub(1).min(n - 2)
}

/// Piecewise-linear interpolation on an increasing abscissa table.
pub fn lerp_table<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let k = bracket(xs, x);
    let (x0, x1) = (xs[k], xs[k + 1]);
    let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { T::zero() };
    ys[k] + (ys[k + 1] - ys[k]) * t
}

/// Monotone piecewise cubic Hermite interpolant (Fritsch–Carlson).
#[derive(Debug, Clone)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    /// `xs` must be strictly increasing and `ys` monotone.
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Self {
        assert_eq!(xs.len(), ys.len());
        assert!(xs.len() >= 2);
        let n = xs.len();
        let secants: Vec<T> = (0..n - 1)
            .map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]))
            .collect();
        let mut slopes = vec![T::zero(); n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for k in 1..n - 1 {
            let (d0, d1) = (secants[k - 1], secants[k]);
            if d0 * d1 <= T::zero() {
                slopes[k] = T::zero();
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let h0 = xs[k] - xs[k - 1];
                let h1 = xs[k + 1] - xs[k];
                let w0 = T::two() * h1 + h0;
                let w1 = h1 + T::two() * h0;
                slopes[k] = (w0 + w1) / (w0 / d0 + w1 / d1);
            }
        }
        Self { xs, ys, slopes }
    }

    pub fn eval(&self, x: T) -> T {
        let k = bracket(&self.xs, x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::two();
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1]
    }
}
