//! Brute-force minimum-time oracle on a discretised phase plane.
//!
//! Value iteration runs backward over `N_s` stages of `s`. At each stage the
//! cost-to-go is stored on velocity nodes (evenly spaced in `ṡ`) inside the
//! band of states that can still reach the terminal node, plus the two band
//! edges carried exactly, and is interpolated linearly in `ṡ` in between. From `z` at
//! `s_i` the reachable interval at `s_{i+1}` is `[z + 2αΔs, z + 2βΔs]` with
//! `α`, `β` taken at the midpoint velocity; its endpoints and every stored
//! point inside it are tried as successors.

use crate::constraints::{AccelRow, ConstraintProfile};
use crate::error::{Error, Result};
use crate::limits::LimitCurves;
use crate::scalar::Real;

/// Floor on the average stage velocity.
pub const VELOCITY_FLOOR: f64 = 1e-4;

/// Cost-to-go sampled at increasing `z`.
struct Stage<T> {
    z: Vec<T>,
    cost: Vec<T>,
}

impl<T: Real> Stage<T> {
    fn lo(&self) -> T {
        self.z[0]
    }

    fn hi(&self) -> T {
        *self.z.last().expect("stages are never empty")
    }

    fn at(&self, z: T) -> T {
        let k = self.z.partition_point(|&v| v <= z);
        if k == 0 {
            return self.cost[0];
        }
        if k == self.z.len() {
            return *self.cost.last().expect("stages are never empty");
        }
        // linear in ṡ: the cost-to-go is far from linear in z near rest
        let (v0, v1) = (self.z[k - 1].sqrt(), self.z[k].sqrt());
        let t = if v1 > v0 { (z.max(T::zero()).sqrt() - v0) / (v1 - v0) } else { T::zero() };
        self.cost[k - 1] + (self.cost[k] - self.cost[k - 1]) * t
    }
}

/// `z` reached from `from` over `h` with the extremal acceleration taken at
/// the midpoint `(from + z) / 2`; `forward` solves for the far end,
/// otherwise for the near end.
///
/// Every row bound is affine in `z`, so the implicit midpoint equation is
/// solved exactly per row; the root whose row is actually active there and
/// that lies closest to the explicit Euler guess wins.
fn extremal_step<T: Real>(rows: &[AccelRow<T>], s: T, from: T, h: T, beta: bool, forward: bool) -> Result<T> {
    let pick = |z: T| -> Result<T> {
        let (a, b) = ConstraintProfile::extremes_from_rows(rows, s, z)?;
        Ok(if beta { b } else { a })
    };
    let dir = if forward { T::one() } else { -T::one() };
    let two_h = T::two() * h * dir;
    let guess = from + two_h * pick(from.max(T::zero()))?;
    let tol = ConstraintProfile::zero_inertia_threshold(rows);

    let mut best: Option<T> = None;
    for r in rows.iter().filter(|r| if beta { r.a > tol } else { r.a < -tol }) {
        // u(z) = p + q z
        let p = -r.c / r.a;
        let q = -r.b / r.a;
        let denom = T::one() - h * dir * q;
        if !(denom.abs() > T::epsilon()) {
            continue;
        }
        let to = (from * (T::one() + h * dir * q) + two_h * p) / denom;
        // affine bounds extend below z = 0, so no clamping here
        let mid = (from + to) * T::half();
        let active = pick(mid)?;
        let own = p + q * mid;
        if (active - own).abs() > T::lit(1e-9) * (T::one() + own.abs()) {
            continue;
        }
        if best.map_or(true, |b| (to - guess).abs() < (b - guess).abs()) {
            best = Some(to);
        }
    }
    match best {
        Some(to) => Ok(to),
        // explicit midpoint when no consistent root exists
        None => {
            let mid = (from + h * dir * pick(from.max(T::zero()))?).max(T::zero());
            Ok(from + two_h * pick(mid)?)
        }
    }
}

/// Minimum traversal time from `(0, ṡ₀)` to `(s_e, ṡ_e)` with `n_s` stages
/// and `n_z` velocity nodes, or `None` when the start cannot reach the end.
pub fn dp_min_time<T: Real>(
    cp: &ConstraintProfile<T>,
    limits: &LimitCurves<T>,
    sdot_start: T,
    sdot_end: T,
    n_s: usize,
    n_z: usize,
) -> Result<Option<T>> {
    if n_s < 32 || n_z < 32 {
        return Err(Error::InvalidArgument(format!("grid must be at least 32 x 32, got {n_s} x {n_z}")));
    }
    let total = limits.total_length();
    let ds = total / T::from_usize_lossy(n_s - 1);
    let s_at = |i: usize| if i == n_s - 1 { total } else { ds * T::from_usize_lossy(i) };

    let caps: Vec<Option<T>> = (0..n_s)
        .map(|i| cp.mvc_star_at(s_at(i)).map(|b| b.finite().map(|v| v * v)))
        .collect::<Result<_>>()?;
    let z0 = sdot_start * sdot_start;
    let ze = sdot_end * sdot_end;
    let mut z_max = limits
        .mvc_star
        .iter()
        .filter_map(|b| b.finite())
        .map(|v| v * v)
        .chain(caps.iter().flatten().copied())
        .fold(T::zero(), |m, v| m.max(v));
    if caps.iter().any(|c| c.is_none()) {
        // somewhere unbounded: cap by what full acceleration could reach
        let mut peak = T::zero();
        for i in 0..n_s {
            let (_, beta) = cp.extremes(s_at(i), T::zero())?;
            peak = peak.max(beta.abs());
        }
        z_max = z_max.max(z0.max(ze) + T::two() * peak * total);
    }
    z_max = z_max.max(z0).max(ze);
    let slack = T::lit(1e-9);
    let within = |i: usize, z: T| caps[i].map_or(true, |c| z <= c * (T::one() + slack));
    if !within(0, z0) || !within(n_s - 1, ze) || !(z_max > T::zero()) {
        return Ok(None);
    }
    // nodes evenly spaced in ṡ
    let dv = z_max.sqrt() / T::from_usize_lossy(n_z - 1);
    let tol = z_max * T::lit(1e-9);
    let floor = T::lit(VELOCITY_FLOOR);

    let mut next = Stage { z: vec![ze], cost: vec![T::zero()] };
    for i in (0..n_s - 1).rev() {
        let s_mid = (s_at(i) + s_at(i + 1)) * T::half();
        let rows: Vec<AccelRow<T>> = cp.accel_rows(s_mid);
        let h = s_at(i + 1) - s_at(i);
        let cap = caps[i].map_or(z_max, |c| c.min(z_max));

        let band_lo = extremal_step(&rows, s_mid, next.lo(), h, true, false)?.max(T::zero());
        let band_hi = extremal_step(&rows, s_mid, next.hi(), h, false, false)?.min(cap);
        if band_lo > band_hi + tol {
            return Ok(None);
        }
        let band_hi = band_hi.max(band_lo);

        let points: Vec<T> = if i == 0 {
            if z0 < band_lo - tol || z0 > band_hi + tol {
                return Ok(None);
            }
            vec![z0]
        } else {
            let j_lo = (band_lo.sqrt() / dv).ceil().to_usize().unwrap_or(0);
            let j_hi = (band_hi.sqrt() / dv).floor().to_usize().unwrap_or(0).min(n_z - 1);
            let node = |j: usize| {
                let v = dv * T::from_usize_lossy(j);
                v * v
            };
            let mut pts = vec![band_lo];
            pts.extend((j_lo..=j_hi).map(node).filter(|&z| z > band_lo && z < band_hi));
            if band_hi > band_lo {
                pts.push(band_hi);
            }
            pts
        };

        let mut z_out = Vec::with_capacity(points.len());
        let mut cost_out = Vec::with_capacity(points.len());
        for z in points {
            let lo = extremal_step(&rows, s_mid, z, h, false, true)?.max(next.lo());
            let hi = extremal_step(&rows, s_mid, z, h, true, true)?.min(next.hi());
            let (lo, hi) = if lo > hi && lo - hi <= tol { (hi, hi) } else { (lo, hi) };
            if lo > hi {
                continue;
            }
            let first = next.z.partition_point(|&v| v <= lo);
            let last = next.z.partition_point(|&v| v < hi);
            let inner = next.z[first..last.max(first)].iter().copied();
            let mut best = T::infinity();
            for zn in [lo, hi].into_iter().chain(inner) {
                let v = ((z.sqrt() + zn.max(T::zero()).sqrt()) * T::half()).max(floor);
                best = best.min(h / v + next.at(zn));
            }
            z_out.push(z);
            cost_out.push(best);
        }
        if z_out.is_empty() {
            return Ok(None);
        }
        next = Stage { z: z_out, cost: cost_out };
    }
    Ok(Some(next.cost[0]))
}
