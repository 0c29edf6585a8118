//! The numerical-integration planner, the run-and-test failure detector and
//! the sufficient failure condition based on the velocity-free trajectory.

use crate::constraints::ConstraintProfile;
use crate::error::{Error, Result};
use crate::limits::{compute_limit_curves, DaggerSegment, LimitCurves};
use crate::profiles::{
    integrate_profile, intersect_profiles, IntegrationOptions, PhasePoint, PhaseProfile, ProfileKind, Termination,
};
use crate::scalar::Real;
use crate::switch::{next_switch_after, singular_points_on_dagger, switch_candidates, SwitchKind, SwitchPoint};

pub const DEFAULT_SWITCH_CAP: usize = 200;

/// Default number of limit-curve grid nodes.
pub const DEFAULT_GRID: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerOptions<T> {
    pub integration: IntegrationOptions<T>,
    /// Maximum number of α→β switch points visited before giving up.
    pub switch_cap: usize,
    /// Relative slack for `s_last` against `s_e`.
    pub end_tolerance: T,
}

impl<T: Real> PlannerOptions<T> {
    pub fn for_length(total_length: T) -> Self {
        Self {
            integration: IntegrationOptions::for_length(total_length),
            switch_cap: DEFAULT_SWITCH_CAP,
            end_tolerance: T::lit(1e-6),
        }
    }

    pub fn with_step(total_length: T, step: T) -> Self {
        let mut opts = Self::for_length(total_length);
        opts.integration.step = step;
        opts
    }

    /// Distance stepped over a zero-inertia point before integrating.
    pub fn bridge(&self) -> T {
        self.integration.step / T::lit(10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanEvent<T> {
    /// A forward profile stopped.
    Beta { origin: PhasePoint<T>, end: PhasePoint<T>, termination: Termination },
    /// A switch point was selected along MVC*.
    Switch(SwitchPoint<T>),
    /// A backward profile joined the chain at `at` on chain segment `segment`.
    Joined { origin: PhasePoint<T>, at: PhasePoint<T>, segment: usize },
    /// A previously recorded β→α switch was replaced by an earlier intersection.
    Superseded { previous: PhasePoint<T>, replacement: PhasePoint<T>, dropped_segments: usize },
    /// A backward profile left the admissible region without meeting the chain.
    Stranded { origin: PhasePoint<T>, exit: PhasePoint<T>, termination: Termination },
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    /// Alternating β/α segments in increasing `s`.
    pub segments: Vec<PhaseProfile<T>>,
    pub switch_ab: Vec<SwitchPoint<T>>,
    pub switch_ba: Vec<PhasePoint<T>>,
    pub traversal_time: T,
    pub events: Vec<PlanEvent<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn first_point(&self) -> Option<PhasePoint<T>> {
        self.segments.first().map(|p| p.first())
    }

    pub fn last_point(&self) -> Option<PhasePoint<T>> {
        self.segments.last().map(|p| p.last())
    }

    /// `ṡ²` at `s` from the first segment covering it.
    pub fn z_at(&self, s: T) -> Option<T> {
        self.segments.iter().find_map(|p| p.z_at(s))
    }

    pub fn sdot_at(&self, s: T) -> Option<T> {
        self.z_at(s).map(|z| z.max(T::zero()).sqrt())
    }

    /// `(s, ṡ, kind, segment index)` for every sample.
    pub fn samples(&self) -> impl Iterator<Item = (PhasePoint<T>, ProfileKind, usize)> + '_ {
        self.segments
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.samples.iter().map(move |q| (*q, p.kind, i)))
    }

    pub fn superseded(&self) -> impl Iterator<Item = &PlanEvent<T>> {
        self.events.iter().filter(|e| matches!(e, PlanEvent::Superseded { .. }))
    }
}

/// Accumulated profile chain shared by the planner and the detector.
struct Chain<T: Real> {
    segments: Vec<PhaseProfile<T>>,
    /// Switch point each segment was started from, if any.
    origins: Vec<Option<SwitchPoint<T>>>,
    events: Vec<PlanEvent<T>>,
}

impl<T: Real> Chain<T> {
    fn new() -> Self {
        Self { segments: Vec::new(), origins: Vec::new(), events: Vec::new() }
    }

    fn push(&mut self, profile: PhaseProfile<T>, origin: Option<SwitchPoint<T>>) {
        self.segments.push(profile);
        self.origins.push(origin);
    }

    /// Joins a backward profile to the earliest-`s` β segment it crosses,
    /// discarding everything after that crossing.
    fn attach(&mut self, mut alpha: PhaseProfile<T>, origin: Option<SwitchPoint<T>>) -> Option<PhasePoint<T>> {
        let hit = self
            .segments
            .iter()
            .enumerate()
            .filter(|(_, seg)| seg.kind == ProfileKind::Beta)
            .find_map(|(k, seg)| intersect_profiles(&alpha, seg).map(|x| (k, x)));
        let (k, x) = hit?;
        if k + 1 < self.segments.len() {
            self.events.push(PlanEvent::Superseded {
                previous: self.segments[k].last(),
                replacement: x,
                dropped_segments: self.segments.len() - k - 1,
            });
            self.segments.truncate(k + 1);
            self.origins.truncate(k + 1);
        }
        let seg = &mut self.segments[k];
        seg.truncate_after(x);
        seg.termination = Termination::IntersectedProfile;
        self.events.push(PlanEvent::Joined { origin: alpha.origin(), at: x, segment: k });
        alpha.truncate_before(x);
        alpha.termination = Termination::IntersectedProfile;
        self.push(alpha, origin);
        Some(x)
    }

    fn into_trajectory(self) -> Trajectory<T> {
        let mut switch_ab = Vec::new();
        let mut switch_ba = Vec::new();
        for (k, seg) in self.segments.iter().enumerate() {
            match seg.kind {
                ProfileKind::Beta if k > 0 => {
                    if let Some(sw) = self.origins[k] {
                        switch_ab.push(sw);
                    }
                }
                ProfileKind::Alpha if k > 0 => switch_ba.push(seg.first()),
                _ => {}
            }
        }
        let traversal_time = self.segments.iter().fold(T::zero(), |acc, p| acc + p.duration());
        Trajectory { segments: self.segments, switch_ab, switch_ba, traversal_time, events: self.events }
    }
}

struct Context<'a, T: Real> {
    cp: &'a ConstraintProfile<T>,
    limits: &'a LimitCurves<T>,
    opts: &'a PlannerOptions<T>,
    candidates: Vec<SwitchPoint<T>>,
    start: PhasePoint<T>,
    end: PhasePoint<T>,
}

impl<'a, T: Real> Context<'a, T> {
    fn new(
        cp: &'a ConstraintProfile<T>,
        limits: &'a LimitCurves<T>,
        sdot_start: T,
        sdot_end: T,
        opts: &'a PlannerOptions<T>,
    ) -> Result<Self> {
        let total = cp.total_length();
        let start = PhasePoint::new(T::zero(), sdot_start);
        let end = PhasePoint::new(total, sdot_end);
        for p in [start, end] {
            let ok = p.sdot >= T::zero()
                && cp
                    .mvc_star_at(p.s)?
                    .finite()
                    .map_or(true, |m| p.sdot <= m * (T::one() + opts.integration.limit_tolerance));
            if !ok {
                return Err(Error::OutsideAdmissibleRegion { s: p.s.to_f64_lossy(), sdot: p.sdot.to_f64_lossy() });
            }
        }
        let candidates = switch_candidates(cp, limits)?;
        Ok(Self { cp, limits, opts, candidates, start, end })
    }

    fn total(&self) -> T {
        self.limits.total_length()
    }

    fn bridge_for(&self, origin: Option<SwitchPoint<T>>) -> T {
        match origin {
            Some(sw) if sw.kind == SwitchKind::ZeroInertia => self.opts.bridge(),
            _ => T::zero(),
        }
    }

    fn beta_from(&self, p: PhasePoint<T>, origin: Option<SwitchPoint<T>>) -> Result<PhaseProfile<T>> {
        integrate_profile(self.cp, ProfileKind::Beta, p, &self.opts.integration, self.bridge_for(origin))
    }

    fn alpha_from(&self, p: PhasePoint<T>, origin: Option<SwitchPoint<T>>) -> Result<PhaseProfile<T>> {
        integrate_profile(self.cp, ProfileKind::Alpha, p, &self.opts.integration, self.bridge_for(origin))
    }

    fn next_switch(&self, from_s: T) -> Option<SwitchPoint<T>> {
        next_switch_after(&self.candidates, from_s, self.total())
    }
}

/// Plans the time-optimal trajectory from `(0, ṡ₀)` to `(s_e, ṡ_e)`.
///
/// Fails with [`Error::NotTraversable`] when a forward profile stalls at
/// `ṡ = 0`, and with [`Error::NiFailure`] when a backward profile leaves the
/// admissible region without meeting the accumulated chain.
pub fn ni_plan<T: Real>(
    cp: &ConstraintProfile<T>,
    limits: &LimitCurves<T>,
    sdot_start: T,
    sdot_end: T,
    opts: &PlannerOptions<T>,
) -> Result<Trajectory<T>> {
    let ctx = Context::new(cp, limits, sdot_start, sdot_end, opts)?;
    let mut chain = Chain::new();
    let mut p = ctx.start;
    let mut origin: Option<SwitchPoint<T>> = None;
    let mut visited = 0;
    loop {
        let beta = ctx.beta_from(p, origin)?;
        let end = beta.last();
        chain.events.push(PlanEvent::Beta { origin: p, end, termination: beta.termination });
        match beta.termination {
            Termination::HitZeroVelocity => return Err(Error::NotTraversable { s: end.s.to_f64_lossy() }),
            Termination::HitEnd => {
                chain.push(beta, origin);
                break;
            }
            _ => chain.push(beta, origin),
        }
        let Some(sw) = ctx.next_switch(end.s.max(p.s)) else { break };
        visited += 1;
        if visited > opts.switch_cap {
            return Err(Error::SwitchPointCap(opts.switch_cap));
        }
        chain.events.push(PlanEvent::Switch(sw));
        let alpha = ctx.alpha_from(sw.location, Some(sw))?;
        let exit = alpha.terminal();
        if chain.attach(alpha, Some(sw)).is_none() {
            return Err(Error::NiFailure { from_s: sw.location.s.to_f64_lossy(), exit_s: exit.s.to_f64_lossy() });
        }
        p = sw.location;
        origin = Some(sw);
    }
    let alpha = ctx.alpha_from(ctx.end, None)?;
    let exit = alpha.terminal();
    if chain.attach(alpha, None).is_none() {
        return Err(Error::NiFailure { from_s: ctx.end.s.to_f64_lossy(), exit_s: exit.s.to_f64_lossy() });
    }
    Ok(chain.into_trajectory())
}

#[derive(Debug, Clone)]
pub struct RtReport<T> {
    pub feasible: bool,
    pub s_last: T,
    /// Longest continuous trajectory from the start, covering `[0, s_last]`.
    pub trajectory: Trajectory<T>,
    /// `isContinuous` after each backward integration.
    pub continuity_log: Vec<bool>,
    /// Uncovered interval: from `s_last` to where the first stranded backward
    /// profile left the admissible region.
    pub gap: Option<(T, T)>,
    /// Velocity-bound stretches overlapping the gap.
    pub failure_segments: Vec<DaggerSegment<T>>,
}

/// Run-and-test detection: runs the planner loop to the terminal point while
/// tracking the longest continuous prefix, and reports infeasibility exactly
/// when that prefix falls short of `s_e`.
pub fn rt_detect<T: Real>(
    cp: &ConstraintProfile<T>,
    limits: &LimitCurves<T>,
    sdot_start: T,
    sdot_end: T,
    opts: &PlannerOptions<T>,
) -> Result<RtReport<T>> {
    let ctx = Context::new(cp, limits, sdot_start, sdot_end, opts)?;
    let total = ctx.total();
    let mut chain = Chain::new();
    let mut p = ctx.start;
    let mut origin: Option<SwitchPoint<T>> = None;
    let mut continuous = true;
    let mut s_last = T::zero();
    let mut continuity_log = Vec::new();
    let mut gap: Option<(T, T)> = None;
    let mut visited = 0;

    loop {
        let beta = ctx.beta_from(p, origin)?;
        let hit = beta.last();
        chain.events.push(PlanEvent::Beta { origin: p, end: hit, termination: beta.termination });
        let reached_end = beta.termination == Termination::HitEnd;
        if continuous {
            chain.push(beta, origin);
            // a profile running out at s_e still has to meet the terminal
            // velocity; only the backward profile from there certifies it
            if !reached_end {
                s_last = hit.s;
            }
        }

        let next = if reached_end { None } else { ctx.next_switch(hit.s.max(p.s)) };
        let (q, q_origin) = match next {
            Some(sw) => {
                visited += 1;
                if visited > opts.switch_cap {
                    return Err(Error::SwitchPointCap(opts.switch_cap));
                }
                chain.events.push(PlanEvent::Switch(sw));
                (sw.location, Some(sw))
            }
            None => (ctx.end, None),
        };

        let alpha = ctx.alpha_from(q, q_origin)?;
        let exit = alpha.terminal();
        let termination = alpha.termination;
        if chain.attach(alpha, q_origin).is_some() {
            continuous = true;
            s_last = q.s;
        } else {
            if continuous || gap.map_or(true, |(s, _)| s != s_last) {
                gap = Some((s_last, exit.s));
            }
            chain.events.push(PlanEvent::Stranded { origin: q, exit, termination });
            continuous = false;
        }
        continuity_log.push(continuous);

        if q_origin.is_none() {
            break;
        }
        p = q;
        origin = q_origin;
    }

    let feasible = s_last >= total - opts.end_tolerance * total;
    // keep T* to what is actually continuous from the start
    if !feasible {
        while chain.segments.last().map_or(false, |seg| seg.first().s > s_last) {
            chain.segments.pop();
            chain.origins.pop();
        }
    }
    let gap = if feasible { None } else { gap };
    let failure_segments = gap.map_or_else(Vec::new, |(a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        limits
            .dagger_segments
            .iter()
            .copied()
            .filter(|d| d.end >= lo && d.start <= hi)
            .collect()
    });
    Ok(RtReport { feasible, s_last, trajectory: chain.into_trajectory(), continuity_log, gap, failure_segments })
}

#[derive(Debug, Clone)]
pub struct Property6Report<T> {
    /// Some grid point has MVC* strictly below the velocity-free trajectory.
    pub c1: bool,
    pub witness: Option<T>,
    /// No discontinuity or zero-inertia point lies on a velocity-bound stretch.
    pub c2: bool,
    /// Velocity-bound stretches strictly below the velocity-free trajectory.
    pub mvc_ddagger: Vec<DaggerSegment<T>>,
    /// Discontinuity / zero-inertia points found on velocity-bound stretches.
    pub singular_points: Vec<SwitchPoint<T>>,
}

impl<T> Property6Report<T> {
    pub fn predicts_failure(&self) -> bool {
        self.c1 && self.c2
    }
}

/// Evaluates the two sufficient failure conditions against the trajectory
/// planned with the velocity rows removed.
pub fn check_property6<T: Real>(
    cp: &ConstraintProfile<T>,
    limits: &LimitCurves<T>,
    unbounded: &Trajectory<T>,
) -> Result<Property6Report<T>> {
    let peak = unbounded.samples().fold(T::zero(), |m, (p, _, _)| m.max(p.sdot));
    let eps = T::lit(1e-6) * (T::one() + peak);
    let below: Vec<bool> = limits
        .grid
        .iter()
        .zip(&limits.mvc_star)
        .map(|(&s, m)| match (m.finite(), unbounded.sdot_at(s)) {
            (Some(m), Some(t)) => m < t - eps,
            _ => false,
        })
        .collect();
    let witness = below.iter().position(|&b| b).map(|k| limits.grid[k]);

    let mut mvc_ddagger = Vec::new();
    let mut k = 0;
    while k < below.len() {
        if !(below[k] && limits.dagger[k]) {
            k += 1;
            continue;
        }
        let first = k;
        while k + 1 < below.len() && below[k + 1] && limits.dagger[k + 1] {
            k += 1;
        }
        mvc_ddagger.push(DaggerSegment { start: limits.grid[first], end: limits.grid[k] });
        k += 1;
    }

    let singular_points = singular_points_on_dagger(limits, cp)?;
    Ok(Property6Report { c1: witness.is_some(), witness, c2: singular_points.is_empty(), mvc_ddagger, singular_points })
}

/// Plans against the acceleration rows alone (no velocity limit).
pub fn plan_unbounded<T: Real>(
    cp: &ConstraintProfile<T>,
    grid_n: usize,
    sdot_start: T,
    sdot_end: T,
    opts: &PlannerOptions<T>,
) -> Result<Trajectory<T>> {
    let free = cp.without_velocity_rows();
    let limits = compute_limit_curves(&free, grid_n)?;
    ni_plan(&free, &limits, sdot_start, sdot_end, opts)
}
