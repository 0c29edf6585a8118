//! CSV tables and the JSON report.

use std::fs::File;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use topp_ni::{
    Bound, DaggerSegment, LimitCurves, PhasePoint, PlanEvent, ProfileKind, Property6Report, RtReport, SwitchPoint,
    Trajectory,
};

const DIGITS: usize = 12;

/// `x` with 12 significant digits, shortest form; `inf` for infinities.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS as i32).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to 12 significant digits for the JSON report.
pub fn sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_num(x).parse().unwrap_or(x)
    } else {
        x
    }
}

fn bound(b: Bound<f64>) -> String {
    match b {
        Bound::Finite(v) => fmt_num(v),
        Bound::Unbounded => "inf".into(),
    }
}

fn writer(dir: &Path, name: &str) -> Result<csv::Writer<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

pub fn write_limits(dir: &Path, limits: &LimitCurves) -> Result<()> {
    let mut w = writer(dir, "limits.csv")?;
    w.write_record(["s", "mvc", "vlim", "mvc_star", "is_dagger"])?;
    for k in 0..limits.len() {
        w.write_record([
            fmt_num(limits.grid[k]),
            bound(limits.mvc[k]),
            bound(limits.vlim[k]),
            bound(limits.mvc_star[k]),
            limits.dagger[k].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn kind_name(kind: ProfileKind) -> &'static str {
    match kind {
        ProfileKind::Alpha => "alpha",
        ProfileKind::Beta => "beta",
    }
}

pub fn write_trajectory(dir: &Path, t: &Trajectory) -> Result<()> {
    let mut w = writer(dir, "trajectory.csv")?;
    w.write_record(["s", "sdot", "kind", "profile_id"])?;
    for (p, kind, id) in t.samples() {
        w.write_record([fmt_num(p.s), fmt_num(p.sdot), kind_name(kind).into(), id.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_switch_points(dir: &Path, t: &Trajectory) -> Result<()> {
    let mut rows: Vec<(f64, f64, &str, &str)> = t
        .switch_ab
        .iter()
        .map(|sp| (sp.location.s, sp.location.sdot, sp.kind.as_str(), "ab"))
        .chain(t.switch_ba.iter().map(|p| (p.s, p.sdot, "intersection", "ba")))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut w = writer(dir, "switchpoints.csv")?;
    w.write_record(["s", "sdot", "type", "transition"])?;
    for (s, sdot, kind, transition) in rows {
        w.write_record([fmt_num(s), fmt_num(sdot), kind.into(), transition.into()])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Report

type Pt = [f64; 2];

fn pt(p: PhasePoint<f64>) -> Pt {
    [sig(p.s), sig(p.sdot)]
}

fn interval(d: &DaggerSegment<f64>) -> Pt {
    [sig(d.start), sig(d.end)]
}

#[derive(Debug, Serialize)]
pub struct SegmentReport {
    pub id: usize,
    pub kind: &'static str,
    pub start: Pt,
    pub end: Pt,
    pub termination: &'static str,
    pub duration: f64,
}

#[derive(Debug, Serialize)]
pub struct SwitchReport {
    pub s: f64,
    pub sdot: f64,
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub transition: &'static str,
}

#[derive(Debug, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum LogEntry {
    Beta { origin: Pt, end: Pt, termination: &'static str },
    Switch { at: Pt, #[serde(rename = "type")] kind: &'static str },
    Joined { origin: Pt, at: Pt, segment: usize },
    Superseded { previous: Pt, replacement: Pt, dropped_segments: usize },
    Stranded { origin: Pt, exit: Pt, termination: &'static str },
}

impl From<&PlanEvent<f64>> for LogEntry {
    fn from(e: &PlanEvent<f64>) -> Self {
        match *e {
            PlanEvent::Beta { origin, end, termination } => {
                LogEntry::Beta { origin: pt(origin), end: pt(end), termination: termination.as_str() }
            }
            PlanEvent::Switch(sp) => LogEntry::Switch { at: pt(sp.location), kind: sp.kind.as_str() },
            PlanEvent::Joined { origin, at, segment } => LogEntry::Joined { origin: pt(origin), at: pt(at), segment },
            PlanEvent::Superseded { previous, replacement, dropped_segments } => {
                LogEntry::Superseded { previous: pt(previous), replacement: pt(replacement), dropped_segments }
            }
            PlanEvent::Stranded { origin, exit, termination } => {
                LogEntry::Stranded { origin: pt(origin), exit: pt(exit), termination: termination.as_str() }
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RtSection {
    pub feasible: bool,
    pub s_last: f64,
    pub continuity_log: Vec<bool>,
    pub gap: Option<Pt>,
    pub failure_segments: Vec<Pt>,
}

impl From<&RtReport<f64>> for RtSection {
    fn from(r: &RtReport<f64>) -> Self {
        Self {
            feasible: r.feasible,
            s_last: sig(r.s_last),
            continuity_log: r.continuity_log.clone(),
            gap: r.gap.map(|(a, b)| [sig(a), sig(b)]),
            failure_segments: r.failure_segments.iter().map(interval).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SingularReport {
    pub s: f64,
    pub sdot: f64,
    #[serde(rename = "type")]
    pub kind: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Property6Section {
    pub c1: bool,
    pub witness: Option<f64>,
    pub c2: bool,
    pub predicts_failure: bool,
    pub mvc_ddagger: Vec<Pt>,
    pub singular_points: Vec<SingularReport>,
}

impl From<&Property6Report<f64>> for Property6Section {
    fn from(r: &Property6Report<f64>) -> Self {
        Self {
            c1: r.c1,
            witness: r.witness.map(sig),
            c2: r.c2,
            predicts_failure: r.predicts_failure(),
            mvc_ddagger: r.mvc_ddagger.iter().map(interval).collect(),
            singular_points: r.singular_points.iter().map(singular).collect(),
        }
    }
}

fn singular(sp: &SwitchPoint<f64>) -> SingularReport {
    SingularReport { s: sig(sp.location.s), sdot: sig(sp.location.sdot), kind: sp.kind.as_str() }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub verdict: &'static str,
    pub cause: Option<&'static str>,
    pub message: Option<String>,
    pub path_length: f64,
    pub s_last: f64,
    /// Time of the full trajectory, or of the longest continuous prefix when infeasible.
    pub traversal_time: f64,
    pub segments: Vec<SegmentReport>,
    pub switch_points: Vec<SwitchReport>,
    pub log: Vec<LogEntry>,
    pub dagger_segments: Vec<Pt>,
    pub run_and_test: Option<RtSection>,
    /// Unavailable when the velocity-free plan itself fails.
    pub property6: Option<Property6Section>,
    pub property6_error: Option<String>,
    pub config: serde_json::Value,
}

impl Report {
    pub fn new(command: &'static str, total: f64, limits: &LimitCurves, config: serde_json::Value) -> Self {
        Self {
            command,
            verdict: "feasible",
            cause: None,
            message: None,
            path_length: sig(total),
            s_last: sig(total),
            traversal_time: 0.0,
            segments: Vec::new(),
            switch_points: Vec::new(),
            log: Vec::new(),
            dagger_segments: limits.dagger_segments.iter().map(interval).collect(),
            run_and_test: None,
            property6: None,
            property6_error: None,
            config,
        }
    }

    pub fn set_trajectory(&mut self, t: &Trajectory) {
        self.traversal_time = sig(t.traversal_time);
        self.segments = t
            .segments
            .iter()
            .enumerate()
            .map(|(id, p)| SegmentReport {
                id,
                kind: kind_name(p.kind),
                start: pt(p.first()),
                end: pt(p.last()),
                termination: p.termination.as_str(),
                duration: sig(p.duration()),
            })
            .collect();
        let mut sw: Vec<SwitchReport> = t
            .switch_ab
            .iter()
            .map(|sp| SwitchReport {
                s: sig(sp.location.s),
                sdot: sig(sp.location.sdot),
                kind: sp.kind.as_str(),
                transition: "ab",
            })
            .chain(t.switch_ba.iter().map(|p| SwitchReport {
                s: sig(p.s),
                sdot: sig(p.sdot),
                kind: "intersection",
                transition: "ba",
            }))
            .collect();
        sw.sort_by(|a, b| a.s.total_cmp(&b.s));
        self.switch_points = sw;
        self.log = t.events.iter().map(LogEntry::from).collect();
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("report.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
