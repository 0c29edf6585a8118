//! Detection of deceleration-to-acceleration switch points along MVC*.
//!
//! Three kinds are recognised: tangent points (the extremal profile slope
//! equals the limit-curve slope), discontinuities of the limit curve, and
//! zero-inertia points where some `A_i(s)` changes sign.

use crate::constraints::ConstraintProfile;
use crate::error::Result;
use crate::limits::LimitCurves;
use crate::profiles::PhasePoint;
use crate::scalar::{Bound, Real};

/// Relative tangency band `|k_limit − k| <= TANGENT_TOL·(1 + |k_limit|)`.
pub const TANGENT_TOL: f64 = 1e-6;

/// A jump must exceed this multiple of the local median jump.
pub const JUMP_FACTOR: f64 = 10.0;

const JUMP_WINDOW: usize = 8;
const BISECTIONS: usize = 60;

/// Ordered by priority: when candidates of several kinds coincide, the
/// smallest kind is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SwitchKind {
    Tangent,
    Discontinuity,
    ZeroInertia,
}

impl SwitchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchKind::Tangent => "tangent",
            SwitchKind::Discontinuity => "discontinuity",
            SwitchKind::ZeroInertia => "zero-inertia",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceCurve {
    Mvc,
    MvcStar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchPoint<T> {
    pub location: PhasePoint<T>,
    pub kind: SwitchKind,
    pub source: SourceCurve,
}

struct Scanner<'a, T: Real> {
    cp: &'a ConstraintProfile<T>,
    limits: &'a LimitCurves<T>,
    total: T,
    fd_step: T,
}

impl<'a, T: Real> Scanner<'a, T> {
    fn new(cp: &'a ConstraintProfile<T>, limits: &'a LimitCurves<T>) -> Self {
        let total = limits.total_length();
        Self { cp, limits, total, fd_step: T::lit(1e-6) * total }
    }

    fn limit(&self, s: T) -> Result<Option<T>> {
        Ok(self.cp.mvc_star_at(s)?.finite())
    }

    /// Slope of MVC* by central differences, one-sided at the path ends.
    fn limit_slope(&self, s: T) -> Result<Option<T>> {
        let lo = (s - self.fd_step).max(T::zero());
        let hi = (s + self.fd_step).min(self.total);
        match (self.limit(lo)?, self.limit(hi)?) {
            (Some(a), Some(b)) if hi > lo => Ok(Some((b - a) / (hi - lo))),
            _ => Ok(None),
        }
    }

    /// `(k_α − k_limit, k_β − k_limit, k_limit)` on the limit curve at `s`.
    fn slope_gaps(&self, s: T) -> Result<Option<(T, T, T)>> {
        let m = match self.limit(s)? {
            Some(m) if m > T::zero() => m,
            _ => return Ok(None),
        };
        let slope = match self.limit_slope(s)? {
            Some(k) => k,
            None => return Ok(None),
        };
        let (alpha, beta) = self.cp.extremes(s, m * m)?;
        Ok(Some((alpha / m - slope, beta / m - slope, slope)))
    }

    fn source_at(&self, s: T) -> SourceCurve {
        if self.limits.in_dagger(s) {
            SourceCurve::MvcStar
        } else {
            SourceCurve::Mvc
        }
    }

    fn point(&self, s: T, sdot: T, kind: SwitchKind) -> SwitchPoint<T> {
        SwitchPoint { location: PhasePoint::new(s, sdot), kind, source: self.source_at(s) }
    }

    fn tangents(&self) -> Result<Vec<SwitchPoint<T>>> {
        let grid = &self.limits.grid;
        let mut gaps = Vec::with_capacity(grid.len());
        for &s in grid {
            gaps.push(self.slope_gaps(s)?.map(|g| g.0));
        }
        let mut out = Vec::new();
        for k in 0..grid.len() - 1 {
            let (Some(f0), Some(f1)) = (gaps[k], gaps[k + 1]) else { continue };
            if !(f0 > T::zero() && f1 <= T::zero()) {
                continue;
            }
            let (mut lo, mut hi) = (grid[k], grid[k + 1]);
            let mut ok = true;
            for _ in 0..BISECTIONS {
                let mid = (lo + hi) * T::half();
                match self.slope_gaps(mid)? {
                    Some((f, _, _)) if f > T::zero() => lo = mid,
                    Some(_) => hi = mid,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let s = (lo + hi) * T::half();
            let Some((fa, fb, slope)) = self.slope_gaps(s)? else { continue };
            let tol = T::lit(TANGENT_TOL) * (T::one() + slope.abs());
            // a kink makes the gap jump instead of crossing zero; off MVC
            // proper k_β stays away from k_α
            if fa.abs() <= tol && fb.abs() <= tol {
                if let Some(m) = self.limit(s)? {
                    out.push(self.point(s, m, SwitchKind::Tangent));
                }
            }
        }
        Ok(out)
    }

    fn discontinuities(&self) -> Result<Vec<SwitchPoint<T>>> {
        let grid = &self.limits.grid;
        let values = &self.limits.mvc_star;
        let n = grid.len();
        let jumps: Vec<Option<T>> = (0..n - 1)
            .map(|k| match (values[k], values[k + 1]) {
                (Bound::Finite(a), Bound::Finite(b)) => Some((b - a).abs()),
                _ => None,
            })
            .collect();
        let floor = T::lit(1e-6) * self.limits.velocity_scale().max(T::one());
        let mut out = Vec::new();
        for k in 0..n - 1 {
            let Some(jump) = jumps[k] else { continue };
            if jump <= floor {
                continue;
            }
            let lo_k = k.saturating_sub(JUMP_WINDOW);
            let hi_k = (k + JUMP_WINDOW).min(n - 2);
            let mut window: Vec<T> = (lo_k..=hi_k).filter(|&j| j != k).filter_map(|j| jumps[j]).collect();
            if window.is_empty() {
                continue;
            }
            window.sort_by(|a, b| a.partial_cmp(b).expect("finite jumps"));
            let median = window[window.len() / 2];
            if jump <= T::lit(JUMP_FACTOR) * median {
                continue;
            }
            if let Some(p) = self.refine_jump(grid[k], grid[k + 1], jump)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Follows the jump into ever smaller cells. A genuine discontinuity keeps
    /// its size; a steep but continuous stretch shrinks, and an integrable
    /// spike grows without bound.
    fn refine_jump(&self, a: T, b: T, jump: T) -> Result<Option<SwitchPoint<T>>> {
        let (Some(mut va), Some(mut vb)) = (self.limit(a)?, self.limit(b)?) else { return Ok(None) };
        let ceiling = T::two() * va.max(vb);
        let (mut a, mut b) = (a, b);
        for _ in 0..BISECTIONS {
            let mid = (a + b) * T::half();
            let vm = match self.limit(mid)? {
                Some(v) if v <= ceiling => v,
                _ => return Ok(None),
            };
            if (vm - va).abs() >= (vb - vm).abs() {
                b = mid;
                vb = vm;
            } else {
                a = mid;
                va = vm;
            }
        }
        if (vb - va).abs() < T::half() * jump {
            return Ok(None);
        }
        Ok(Some(if va <= vb {
            self.point(a, va, SwitchKind::Discontinuity)
        } else {
            self.point(b, vb, SwitchKind::Discontinuity)
        }))
    }

    fn zero_inertia(&self) -> Result<Vec<SwitchPoint<T>>> {
        let grid = &self.limits.grid;
        let sign_of = |s: T| -> Vec<i8> {
            let rows = self.cp.accel_rows(s);
            let tol = ConstraintProfile::zero_inertia_threshold(&rows);
            rows.iter()
                .map(|r| if r.a > tol { 1 } else if r.a < -tol { -1 } else { 0 })
                .collect()
        };
        let signs: Vec<Vec<i8>> = grid.iter().map(|&s| sign_of(s)).collect();
        let mut roots: Vec<T> = Vec::new();
        for k in 0..grid.len() - 1 {
            let rows = signs[k].len().min(signs[k + 1].len());
            for i in 0..rows {
                let (s0, s1) = (signs[k][i], signs[k + 1][i]);
                if s0 != 0 && s0 == -s1 {
                    let (mut lo, mut hi) = (grid[k], grid[k + 1]);
                    for _ in 0..BISECTIONS {
                        let mid = (lo + hi) * T::half();
                        let a = self.cp.accel_rows(mid)[i].a;
                        if (a > T::zero()) == (s0 > 0) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    roots.push((lo + hi) * T::half());
                } else if s0 == 0 && k > 0 {
                    let before = signs[k - 1].get(i).copied().unwrap_or(0);
                    if before != 0 && before == -s1 {
                        roots.push(grid[k]);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for s in roots {
            if let Some(m) = self.limit(s)? {
                out.push(self.point(s, m, SwitchKind::ZeroInertia));
            }
        }
        Ok(out)
    }
}

/// All switch-point candidates along MVC*, sorted by `s`. Candidates closer
/// than `1e-9·s_e` are merged, keeping the highest-priority kind.
pub fn switch_candidates<T: Real>(cp: &ConstraintProfile<T>, limits: &LimitCurves<T>) -> Result<Vec<SwitchPoint<T>>> {
    let scanner = Scanner::new(cp, limits);
    let mut all = scanner.tangents()?;
    all.extend(scanner.discontinuities()?);
    all.extend(scanner.zero_inertia()?);
    all.sort_by(|a, b| {
        a.location
            .s
            .partial_cmp(&b.location.s)
            .expect("finite abscissae")
            .then(a.kind.cmp(&b.kind))
    });
    let merge = T::lit(1e-9) * scanner.total;
    let mut out: Vec<SwitchPoint<T>> = Vec::with_capacity(all.len());
    for p in all {
        match out.last_mut() {
            Some(last) if (p.location.s - last.location.s).abs() <= merge => {
                if p.kind < last.kind {
                    *last = p;
                }
            }
            _ => out.push(p),
        }
    }
    Ok(out)
}

/// First candidate strictly beyond `from_s` in a pre-computed candidate list.
pub fn next_switch_after<T: Real>(candidates: &[SwitchPoint<T>], from_s: T, total_length: T) -> Option<SwitchPoint<T>> {
    let gap = T::lit(1e-9) * total_length;
    candidates.iter().copied().find(|c| c.location.s > from_s + gap)
}

/// Smallest-`s` switch point of any kind beyond `from_s`, or `None` when the
/// search reaches `s_e`.
pub fn find_next_switch<T: Real>(
    cp: &ConstraintProfile<T>,
    limits: &LimitCurves<T>,
    from_s: T,
) -> Result<Option<SwitchPoint<T>>> {
    let candidates = switch_candidates(cp, limits)?;
    Ok(next_switch_after(&candidates, from_s, limits.total_length()))
}

/// Tangent candidates lying inside velocity-bound stretches. Where `V` is
/// strictly below MVC, `k_α < k_β`, so this is expected to be empty.
pub fn tangent_points_on_dagger<T: Real>(
    limits: &LimitCurves<T>,
    cp: &ConstraintProfile<T>,
) -> Result<Vec<SwitchPoint<T>>> {
    let scanner = Scanner::new(cp, limits);
    Ok(scanner
        .tangents()?
        .into_iter()
        .filter(|p| limits.in_dagger(p.location.s))
        .collect())
}

/// Discontinuity and zero-inertia candidates inside velocity-bound stretches.
pub fn singular_points_on_dagger<T: Real>(
    limits: &LimitCurves<T>,
    cp: &ConstraintProfile<T>,
) -> Result<Vec<SwitchPoint<T>>> {
    let scanner = Scanner::new(cp, limits);
    let mut out = scanner.discontinuities()?;
    out.extend(scanner.zero_inertia()?);
    out.retain(|p| limits.in_dagger(p.location.s));
    Ok(out)
}
