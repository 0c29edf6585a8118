//! Instance configuration: one JSON document describing the path, the
//! constraints, the boundary velocities and numeric options.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use topp_ni::instances::{demo_v_max, DEMO_A_MAX, DEMO_CONTROL_POINTS};
use topp_ni::{
    unicycle_constraints, AccelRow, BezierPath, ConstraintProfile, PathSpec, TabulatedModel, VelocityRow,
    DEFAULT_GRID, DEFAULT_SWITCH_CAP,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    /// Absent only for purely tabulated constraints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathConfig>,
    pub constraints: ConstraintConfig,
    #[serde(default)]
    pub sdot_start: f64,
    #[serde(default)]
    pub sdot_end: f64,
    #[serde(default)]
    pub options: NumericOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PathConfig {
    Bezier { points: [[f64; 2]; 4] },
    Analytic(AnalyticPath),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum AnalyticPath {
    Line { length: f64 },
    Circle { radius: f64, length: f64 },
    Clothoid { length: f64, k0: f64, k1: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstraintConfig {
    Unicycle {
        v_max: [f64; 2],
        a_max: [f64; 2],
    },
    /// Rows `[A, B, C]` (and optionally `[A, D]`) given at every node of `s`.
    Tabulated {
        s: Vec<f64>,
        accel: Vec<Vec<[f64; 3]>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        velocity: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericOptions {
    /// Limit-curve grid nodes.
    pub grid: usize,
    /// Integration step; `s_e / 4000` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Arc-length table nodes for Bézier paths.
    pub arc_samples: usize,
    pub switch_cap: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self { grid: DEFAULT_GRID, step: None, arc_samples: 201, switch_cap: DEFAULT_SWITCH_CAP }
    }
}

impl InstanceConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The built-in unicycle demo for case 1 or 2.
    pub fn demo(case: u8) -> Option<Self> {
        Some(Self {
            path: Some(PathConfig::Bezier { points: DEMO_CONTROL_POINTS }),
            constraints: ConstraintConfig::Unicycle { v_max: demo_v_max(case)?, a_max: DEMO_A_MAX },
            sdot_start: 0.0,
            sdot_end: 0.0,
            options: NumericOptions::default(),
        })
    }

    fn validate(&self) -> Result<()> {
        let o = &self.options;
        if o.grid < 16 {
            bail!("options.grid must be at least 16, got {}", o.grid);
        }
        if let Some(step) = o.step {
            if !(step > 0.0) || !step.is_finite() {
                bail!("options.step must be positive, got {step}");
            }
        }
        if o.arc_samples < 2 {
            bail!("options.arc_samples must be at least 2");
        }
        for (name, v) in [("sdot_start", self.sdot_start), ("sdot_end", self.sdot_end)] {
            if !(v >= 0.0) || !v.is_finite() {
                bail!("{name} must be a non-negative number, got {v}");
            }
        }
        match (&self.path, &self.constraints) {
            (None, ConstraintConfig::Unicycle { .. }) => bail!("unicycle constraints need a path"),
            (Some(_), ConstraintConfig::Tabulated { .. }) => bail!("tabulated constraints carry their own s grid; drop the path"),
            _ => Ok(()),
        }
    }

    pub fn path_spec(&self) -> Result<Option<PathSpec>> {
        let Some(path) = &self.path else { return Ok(None) };
        Ok(Some(match path {
            PathConfig::Bezier { points } => BezierPath::new(*points, self.options.arc_samples)?.to_path_spec(),
            PathConfig::Analytic(AnalyticPath::Line { length }) => PathSpec::line(*length)?,
            PathConfig::Analytic(AnalyticPath::Circle { radius, length }) => PathSpec::circle(*radius, *length)?,
            PathConfig::Analytic(AnalyticPath::Clothoid { length, k0, k1 }) => PathSpec::clothoid(*length, *k0, *k1)?,
        }))
    }

    pub fn constraint_profile(&self) -> Result<ConstraintProfile> {
        match &self.constraints {
            ConstraintConfig::Unicycle { v_max, a_max } => {
                let path = self.path_spec()?.context("unicycle constraints need a path")?;
                Ok(unicycle_constraints(path, *v_max, *a_max)?)
            }
            ConstraintConfig::Tabulated { s, accel, velocity } => {
                let accel = accel
                    .iter()
                    .map(|rows| rows.iter().map(|&[a, b, c]| AccelRow { a, b, c }).collect())
                    .collect();
                let velocity = velocity
                    .iter()
                    .map(|rows| rows.iter().map(|&[a, d]| VelocityRow { a, d }).collect())
                    .collect();
                Ok(ConstraintProfile::from_model(TabulatedModel::new(s.clone(), accel, velocity)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_omitted_options() {
        let cfg = InstanceConfig::parse(
            r#"{"path":{"type":"analytic","kind":"line","params":{"length":5}},
                "constraints":{"v_max":[0.5,1.3],"a_max":[0.05,0.1]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.options, NumericOptions::default());
        assert_eq!((cfg.sdot_start, cfg.sdot_end), (0.0, 0.0));
        assert_eq!(cfg.path, Some(PathConfig::Analytic(AnalyticPath::Line { length: 5.0 })));
    }

    #[test]
    fn round_trips() {
        let mut cfgs = vec![InstanceConfig::demo(1).unwrap(), InstanceConfig::demo(2).unwrap()];
        cfgs.push(InstanceConfig {
            path: Some(PathConfig::Analytic(AnalyticPath::Circle { radius: 2.0, length: 3.0 })),
            constraints: ConstraintConfig::Unicycle { v_max: [0.2, 1.3], a_max: [0.05, 0.1] },
            sdot_start: 0.1,
            sdot_end: 0.0,
            options: NumericOptions { step: Some(1e-3), ..NumericOptions::default() },
        });
        cfgs.push(InstanceConfig {
            path: None,
            constraints: ConstraintConfig::Tabulated {
                s: vec![0.0, 1.0],
                accel: vec![vec![[1.0, 0.0, -0.1], [-1.0, 0.0, -0.1]]; 2],
                velocity: vec![vec![[1.0, -2.0]]; 2],
            },
            sdot_start: 0.0,
            sdot_end: 0.0,
            options: NumericOptions::default(),
        });
        for cfg in cfgs {
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(InstanceConfig::parse(&text).unwrap(), cfg, "{text}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(InstanceConfig::parse("{").is_err());
        assert!(InstanceConfig::parse(r#"{"constraints":{"v_max":[0.5,1.3],"a_max":[0.05,0.1]}}"#).is_err());
        let bad_grid = r#"{"path":{"type":"analytic","kind":"line","params":{"length":5}},
            "constraints":{"v_max":[0.5,1.3],"a_max":[0.05,0.1]},"options":{"grid":3}}"#;
        assert!(InstanceConfig::parse(bad_grid).is_err());
        let unknown = r#"{"path":{"type":"analytic","kind":"spiral","params":{"length":5}},
            "constraints":{"v_max":[0.5,1.3],"a_max":[0.05,0.1]}}"#;
        assert!(InstanceConfig::parse(unknown).is_err());
    }

    #[test]
    fn builds_profiles() {
        let cfg = InstanceConfig::demo(1).unwrap();
        let cp = cfg.constraint_profile().unwrap();
        assert!(cp.total_length() > 8.0);
        let bad = InstanceConfig {
            constraints: ConstraintConfig::Unicycle { v_max: [0.0, 1.3], a_max: [0.05, 0.1] },
            ..cfg
        };
        assert!(bad.constraint_profile().is_err());
    }
}
