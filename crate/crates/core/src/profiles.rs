//! Phase-plane integration of extremal acceleration profiles.
//!
//! Profiles are integrated in squared velocity `z = ṡ²`, where
//! `dz/ds = 2·s̈` stays finite at `ṡ = 0`. Steps land on the shared grid
//! `s = k·Δs` so that profiles started anywhere can be compared node by node.

use crate::constraints::ConstraintProfile;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of integration steps over the whole path.
pub const DEFAULT_STEPS: usize = 4000;

/// Relative tolerance in `z` before a profile counts as crossing MVC*.
pub const LIMIT_TOLERANCE: f64 = 1e-9;

/// Tolerance in `z` under which two profiles are considered touching.
pub const TOUCH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint<T> {
    pub s: T,
    pub sdot: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(s: T, sdot: T) -> Self {
        Self { s, sdot }
    }

    pub fn z(&self) -> T {
        self.sdot * self.sdot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// Minimum acceleration, integrated backward.
    Alpha,
    /// Maximum acceleration, integrated forward.
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    HitLimit,
    HitZeroVelocity,
    HitStart,
    HitEnd,
    IntersectedProfile,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::HitLimit => "hit-mvc-star",
            Termination::HitZeroVelocity => "hit-sdot-zero",
            Termination::HitStart => "hit-s0",
            Termination::HitEnd => "hit-se",
            Termination::IntersectedProfile => "intersected-profile",
        }
    }
}

/// A sampled α- or β-profile. Samples are stored in increasing `s`
/// whatever the integration direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile<T> {
    pub kind: ProfileKind,
    pub direction: Direction,
    pub samples: Vec<PhasePoint<T>>,
    pub termination: Termination,
}

impl<T: Real> PhaseProfile<T> {
    pub fn first(&self) -> PhasePoint<T> {
        self.samples[0]
    }

    pub fn last(&self) -> PhasePoint<T> {
        *self.samples.last().expect("profiles hold at least one sample")
    }

    /// Point the integration started from.
    pub fn origin(&self) -> PhasePoint<T> {
        match self.direction {
            Direction::Forward => self.first(),
            Direction::Backward => self.last(),
        }
    }

    /// Point where the integration stopped.
    pub fn terminal(&self) -> PhasePoint<T> {
        match self.direction {
            Direction::Forward => self.last(),
            Direction::Backward => self.first(),
        }
    }

    pub fn covers(&self, s: T) -> bool {
        s >= self.first().s && s <= self.last().s
    }

    /// `ṡ²` at `s`, linear in `z` between samples; `None` outside the profile.
    pub fn z_at(&self, s: T) -> Option<T> {
        if !self.covers(s) {
            return None;
        }
        let k = self.samples.partition_point(|p| p.s <= s);
        if k == 0 {
            return Some(self.samples[0].z());
        }
        if k >= self.samples.len() {
            return Some(self.last().z());
        }
        let (a, b) = (self.samples[k - 1], self.samples[k]);
        let span = b.s - a.s;
        if !(span > T::zero()) {
            return Some(b.z());
        }
        let t = (s - a.s) / span;
        Some(a.z() + (b.z() - a.z()) * t)
    }

    pub fn sdot_at(&self, s: T) -> Option<T> {
        self.z_at(s).map(|z| z.max(T::zero()).sqrt())
    }

    /// Keeps the part with `s <= at.s` and ends it exactly at `at`.
    pub fn truncate_after(&mut self, at: PhasePoint<T>) {
        self.samples.retain(|p| p.s < at.s);
        self.samples.push(at);
    }

    /// Keeps the part with `s >= at.s` and starts it exactly at `at`.
    pub fn truncate_before(&mut self, at: PhasePoint<T>) {
        self.samples.retain(|p| p.s > at.s);
        self.samples.insert(0, at);
    }

    /// Traversal time, exact for `z` linear in `s` between samples.
    pub fn duration(&self) -> T {
        self.samples.windows(2).fold(T::zero(), |acc, w| {
            let ds = w[1].s - w[0].s;
            let v = w[0].sdot + w[1].sdot;
            if ds > T::zero() {
                acc + T::two() * ds / v
            } else {
                acc
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions<T> {
    /// Grid step `Δs`.
    pub step: T,
    /// Relative tolerance in `z` before counting a crossing of MVC*.
    pub limit_tolerance: T,
}

impl<T: Real> IntegrationOptions<T> {
    pub fn for_length(total_length: T) -> Self {
        Self::with_steps(total_length, DEFAULT_STEPS)
    }

    pub fn with_steps(total_length: T, steps: usize) -> Self {
        Self {
            step: total_length / T::from_usize_lossy(steps.max(1)),
            limit_tolerance: T::lit(LIMIT_TOLERANCE),
        }
    }
}

struct Stepper<'a, T: Real> {
    cp: &'a ConstraintProfile<T>,
    kind: ProfileKind,
    opts: IntegrationOptions<T>,
    total: T,
}

impl<'a, T: Real> Stepper<'a, T> {
    fn rhs(&self, s: T, z: T) -> Result<T> {
        let (alpha, beta) = self.cp.extremes(s, z.max(T::zero()))?;
        Ok(T::two()
            * match self.kind {
                ProfileKind::Alpha => alpha,
                ProfileKind::Beta => beta,
            })
    }

    fn rk4(&self, s: T, z: T, ds: T) -> Result<T> {
        let half = ds * T::half();
        let k1 = self.rhs(s, z)?;
        let k2 = self.rhs(s + half, z + half * k1)?;
        let k3 = self.rhs(s + half, z + half * k2)?;
        let k4 = self.rhs(s + ds, z + ds * k3)?;
        Ok(z + ds / T::lit(6.0) * (k1 + T::two() * (k2 + k3) + k4))
    }

    fn limit_z(&self, s: T) -> Result<Option<T>> {
        Ok(self.cp.mvc_star_at(s)?.finite().map(|v| v * v))
    }

    fn above_limit(&self, s: T, z: T) -> Result<bool> {
        Ok(match self.limit_z(s)? {
            Some(l) => z > l * (T::one() + self.opts.limit_tolerance) + T::epsilon() * T::epsilon(),
            None => false,
        })
    }

    fn next_node(&self, s: T) -> T {
        let h = self.opts.step;
        let min_gap = h * T::lit(1e-3);
        match self.kind {
            ProfileKind::Beta => {
                let mut next = ((s / h).floor() + T::one()) * h;
                if next - s < min_gap {
                    next = next + h;
                }
                next.min(self.total)
            }
            ProfileKind::Alpha => {
                let mut next = ((s / h).ceil() - T::one()) * h;
                if s - next < min_gap {
                    next = next - h;
                }
                next.max(T::zero())
            }
        }
    }

    fn run(&self, start: PhasePoint<T>, bridge: T) -> Result<PhaseProfile<T>> {
        let total = self.total;
        if !(start.s >= T::zero() && start.s <= total && start.sdot >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "start point (s = {}, sdot = {}) outside the phase plane",
                start.s, start.sdot
            )));
        }
        let z0 = start.z();
        if self.above_limit(start.s, z0)? {
            return Err(Error::OutsideAdmissibleRegion {
                s: start.s.to_f64_lossy(),
                sdot: start.sdot.to_f64_lossy(),
            });
        }
        let forward = self.kind == ProfileKind::Beta;
        let mut pts: Vec<(T, T)> = vec![(start.s, z0)];
        let (mut s, mut z) = (start.s, z0);

        if bridge > T::zero() {
            let sb = if forward { (s + bridge).min(total) } else { (s - bridge).max(T::zero()) };
            if sb != s {
                if let Some(l) = self.limit_z(sb)? {
                    z = z.min(l);
                }
                s = sb;
                pts.push((s, z));
            }
        }

        let termination = loop {
            if forward && s >= total {
                break Termination::HitEnd;
            }
            if !forward && s <= T::zero() {
                break Termination::HitStart;
            }
            let s_next = self.next_node(s);
            let ds = s_next - s;
            let z_next = self.rk4(s, z, ds)?;

            if z_next <= T::zero() {
                let theta = if z > T::zero() { z / (z - z_next) } else { T::zero() };
                let s_zero = s + theta * ds;
                if s_zero != s {
                    pts.push((s_zero, T::zero()));
                } else if let Some(last) = pts.last_mut() {
                    last.1 = T::zero();
                }
                break Termination::HitZeroVelocity;
            }

            if self.above_limit(s_next, z_next)? {
                let (mut lo, mut hi) = (T::zero(), T::one());
                let resolution = T::lit(1e-10) * total;
                while (hi - lo) * ds.abs() > resolution {
                    let mid = (lo + hi) * T::half();
                    let zm = self.rk4(s, z, mid * ds)?;
                    if self.above_limit(s + mid * ds, zm)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let s_hit = s + hi * ds;
                let mut z_hit = self.rk4(s, z, hi * ds)?;
                if let Some(l) = self.limit_z(s_hit)? {
                    z_hit = z_hit.min(l);
                }
                if s_hit != s {
                    pts.push((s_hit, z_hit));
                }
                break Termination::HitLimit;
            }

            pts.push((s_next, z_next));
            s = s_next;
            z = z_next;
        };

        if !forward {
            pts.reverse();
        }
        Ok(PhaseProfile {
            kind: self.kind,
            direction: if forward { Direction::Forward } else { Direction::Backward },
            samples: pts
                .into_iter()
                .map(|(s, z)| PhasePoint::new(s, z.max(T::zero()).sqrt()))
                .collect(),
            termination,
        })
    }
}

/// Integrates a profile of the given kind from `start`. A positive `bridge`
/// first moves `bridge` along `s` at constant velocity, stepping over a
/// zero-inertia singularity.
pub fn integrate_profile<T: Real>(
    cp: &ConstraintProfile<T>,
    kind: ProfileKind,
    start: PhasePoint<T>,
    opts: &IntegrationOptions<T>,
    bridge: T,
) -> Result<PhaseProfile<T>> {
    Stepper { cp, kind, opts: *opts, total: cp.total_length() }.run(start, bridge)
}

/// Forward maximum-acceleration profile from `start` until it meets MVC*,
/// `ṡ = 0`, or `s = s_e`.
pub fn integrate_beta<T: Real>(
    cp: &ConstraintProfile<T>,
    start: PhasePoint<T>,
    opts: &IntegrationOptions<T>,
) -> Result<PhaseProfile<T>> {
    integrate_profile(cp, ProfileKind::Beta, start, opts, T::zero())
}

/// Backward minimum-acceleration profile from `start` until it meets MVC*,
/// `ṡ = 0`, or `s = 0`.
pub fn integrate_alpha<T: Real>(
    cp: &ConstraintProfile<T>,
    start: PhasePoint<T>,
    opts: &IntegrationOptions<T>,
) -> Result<PhaseProfile<T>> {
    integrate_profile(cp, ProfileKind::Alpha, start, opts, T::zero())
}

/// Earliest-`s` point where `z_a − z_b` changes sign (or vanishes) on the
/// common `s` range, located by linear interpolation in `z`.
pub fn intersect_profiles<T: Real>(a: &PhaseProfile<T>, b: &PhaseProfile<T>) -> Option<PhasePoint<T>> {
    let lo = a.first().s.max(b.first().s);
    let hi = a.last().s.min(b.last().s);
    if lo > hi {
        return None;
    }
    let mut xs: Vec<T> = a
        .samples
        .iter()
        .chain(b.samples.iter())
        .map(|p| p.s)
        .filter(|s| *s > lo && *s < hi)
        .collect();
    xs.push(lo);
    xs.push(hi);
    xs.sort_by(|x, y| x.partial_cmp(y).expect("sample abscissae are finite"));
    xs.dedup();

    let scale = a
        .samples
        .iter()
        .chain(b.samples.iter())
        .fold(T::one(), |m, p| m.max(p.z()));
    let eps = T::lit(TOUCH_TOLERANCE) * scale;
    let gap = |s: T| a.z_at(s).zip(b.z_at(s)).map(|(za, zb)| za - zb);
    let at = |s: T| PhasePoint::new(s, a.sdot_at(s).unwrap_or_else(T::zero));

    let mut prev: Option<(T, T)> = None;
    for s in xs {
        let d = gap(s)?;
        if d.abs() <= eps {
            return Some(at(s));
        }
        if let Some((s0, d0)) = prev {
            if d0 * d < T::zero() {
                let theta = d0 / (d0 - d);
                return Some(at(s0 + theta * (s - s0)));
            }
        }
        prev = Some((s, d));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::unicycle_constraints;
    use crate::path::PathSpec;

    fn straight(len: f64) -> ConstraintProfile<f64> {
        unicycle_constraints(PathSpec::line(len).unwrap(), [0.5, 1.3], [0.05, 0.1]).unwrap()
    }

    #[test]
    fn beta_on_straight_path_is_uniform_acceleration() {
        let cp = straight(5.0);
        let opts = IntegrationOptions::for_length(5.0);
        let beta = integrate_beta(&cp, PhasePoint::new(0.0, 0.0), &opts).unwrap();
        // peak sqrt(0.2 * 5) = 1 < 1.3, so the profile reaches the end
        assert_eq!(beta.termination, Termination::HitEnd);
        assert_eq!(beta.direction, Direction::Forward);
        for p in &beta.samples {
            assert!((p.sdot - (0.2 * p.s).sqrt()).abs() < 1e-12);
        }
        assert_eq!(beta.last().s, 5.0);
    }

    #[test]
    fn alpha_on_straight_path() {
        let cp = straight(5.0);
        let opts = IntegrationOptions::for_length(5.0);
        let alpha = integrate_alpha(&cp, PhasePoint::new(5.0, 0.0), &opts).unwrap();
        assert_eq!(alpha.termination, Termination::HitStart);
        assert_eq!(alpha.origin(), PhasePoint::new(5.0, 0.0));
        for p in &alpha.samples {
            assert!((p.sdot - (0.2 * (5.0 - p.s)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_stops_at_velocity_limit() {
        let cp = straight(20.0);
        let opts = IntegrationOptions::for_length(20.0);
        let beta = integrate_beta(&cp, PhasePoint::new(0.0, 0.0), &opts).unwrap();
        assert_eq!(beta.termination, Termination::HitLimit);
        let end = beta.last();
        // 0.2 s = 1.69
        assert!((end.s - 8.45).abs() < 1e-8);
        assert!((end.sdot - 1.3).abs() < 1e-12);
    }

    #[test]
    fn start_outside_region_is_rejected() {
        let cp = straight(5.0);
        let opts = IntegrationOptions::for_length(5.0);
        assert!(matches!(
            integrate_beta(&cp, PhasePoint::new(1.0, 1.5), &opts),
            Err(Error::OutsideAdmissibleRegion { .. })
        ));
        assert!(integrate_alpha(&cp, PhasePoint::new(6.0, 0.0), &opts).is_err());
    }

    #[test]
    fn samples_land_on_shared_grid() {
        let cp = straight(5.0);
        let opts = IntegrationOptions::with_steps(5.0, 100);
        let beta = integrate_beta(&cp, PhasePoint::new(0.123, 0.1), &opts).unwrap();
        assert_eq!(beta.samples[0].s, 0.123);
        for p in &beta.samples[1..] {
            let k = p.s / 0.05;
            assert!((k - k.round()).abs() < 1e-9);
        }
        assert!(beta.samples.windows(2).all(|w| w[1].s > w[0].s));
    }

    #[test]
    fn symmetric_triangle_intersection() {
        let cp = straight(5.0);
        let opts = IntegrationOptions::for_length(5.0);
        let beta = integrate_beta(&cp, PhasePoint::new(0.0, 0.0), &opts).unwrap();
        let alpha = integrate_alpha(&cp, PhasePoint::new(5.0, 0.0), &opts).unwrap();
        let x = intersect_profiles(&alpha, &beta).unwrap();
        assert!((x.s - 2.5).abs() < 1e-9);
        assert!((x.sdot - 0.5_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn disjoint_profiles_do_not_intersect() {
        let cp = straight(5.0);
        let opts = IntegrationOptions::for_length(5.0);
        let mut beta = integrate_beta(&cp, PhasePoint::new(0.0, 0.0), &opts).unwrap();
        beta.truncate_after(PhasePoint::new(1.0, 0.2_f64.sqrt()));
        let mut alpha = integrate_alpha(&cp, PhasePoint::new(5.0, 0.0), &opts).unwrap();
        alpha.truncate_before(PhasePoint::new(3.0, 0.4_f64.sqrt()));
        assert!(intersect_profiles(&alpha, &beta).is_none());
    }

    #[test]
    fn duration_of_uniform_acceleration() {
        let cp = straight(5.0);
        let opts = IntegrationOptions::for_length(5.0);
        let beta = integrate_beta(&cp, PhasePoint::new(0.0, 0.0), &opts).unwrap();
        // s = a t^2 / 2 with a = 0.1
        assert!((beta.duration() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn zero_velocity_termination() {
        // constant deceleration of 1 starting at sdot = 1 on a 2 m hill
        use crate::constraints::{AccelRow, TabulatedModel};
        let rows: Vec<AccelRow<f64>> = vec![AccelRow { a: 1.0, b: 0.0, c: 1.0 }, AccelRow { a: -1.0, b: 0.0, c: -3.0 }];
        let model = TabulatedModel::new(vec![0.0, 2.0], vec![rows.clone(), rows], Vec::new()).unwrap();
        let cp = ConstraintProfile::from_model(model);
        let opts = IntegrationOptions::for_length(2.0);
        let beta = integrate_beta(&cp, PhasePoint::new(0.0, 1.0), &opts).unwrap();
        assert_eq!(beta.termination, Termination::HitZeroVelocity);
        assert!((beta.last().s - 0.5).abs() < 1e-9);
        assert_eq!(beta.last().sdot, 0.0);
    }
}
