//! `topp-ni`: time-optimal velocity profiles along a fixed path.
//!
//! Exit codes: 0 feasible, 2 infeasible, 1 error.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use topp_ni::{
    check_property6, compute_limit_curves, ni_plan, plan_unbounded, rt_detect, ConstraintProfile, Error, LimitCurves,
    PlannerOptions,
};

use config::InstanceConfig;
use output::Report;

#[derive(Debug, Parser)]
#[command(name = "topp-ni", version, about = "Time-optimal path parameterization by phase-plane integration")]
struct Cli {
    /// Instance configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Limit-curve grid nodes (overrides the config).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Integration step in meters (overrides the config).
    #[arg(long, global = true)]
    step: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan the time-optimal trajectory; diagnose the failure if there is none.
    Plan,
    /// Run-and-test feasibility check plus the sufficient failure conditions.
    DetectFailure,
    /// Write the limit curves.
    Mvc,
    /// Built-in unicycle demo.
    DemoUnicycle {
        /// 1: v_max = (0.5, 1.3); 2: v_max = (0.2, 1.3).
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        case: u8,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Feasible,
    Infeasible,
}

struct Instance {
    config: InstanceConfig,
    cp: ConstraintProfile,
    limits: LimitCurves,
    opts: PlannerOptions<f64>,
}

impl Instance {
    fn build(mut config: InstanceConfig, cli: &Cli) -> Result<Self> {
        if let Some(grid) = cli.grid {
            config.options.grid = grid;
        }
        if let Some(step) = cli.step {
            config.options.step = Some(step);
        }
        let config = InstanceConfig::parse(&serde_json::to_string(&config)?).context("invalid command-line override")?;
        let cp = config.constraint_profile()?;
        let limits = compute_limit_curves(&cp, config.options.grid)?;
        let total = cp.total_length();
        let mut opts = match config.options.step {
            Some(step) => PlannerOptions::with_step(total, step),
            None => PlannerOptions::for_length(total),
        };
        opts.switch_cap = config.options.switch_cap;
        Ok(Self { config, cp, limits, opts })
    }

    fn report(&self, command: &'static str) -> Result<Report> {
        Ok(Report::new(command, self.cp.total_length(), &self.limits, serde_json::to_value(&self.config)?))
    }

    fn attach_property6(&self, report: &mut Report) -> Result<()> {
        let c = &self.config;
        match plan_unbounded(&self.cp, c.options.grid, c.sdot_start, c.sdot_end, &self.opts) {
            Ok(free) => report.property6 = Some((&check_property6(&self.cp, &self.limits, &free)?).into()),
            Err(e) => report.property6_error = Some(e.to_string()),
        }
        Ok(())
    }

    /// Run-and-test diagnosis written into the report and the CSVs.
    fn diagnose(&self, report: &mut Report, out: &Path) -> Result<Verdict> {
        let c = &self.config;
        let rt = rt_detect(&self.cp, &self.limits, c.sdot_start, c.sdot_end, &self.opts)?;
        report.set_trajectory(&rt.trajectory);
        report.s_last = output::sig(rt.s_last);
        report.run_and_test = Some((&rt).into());
        if !rt.feasible {
            report.verdict = "infeasible";
        }
        self.attach_property6(report)?;
        output::write_trajectory(out, &rt.trajectory)?;
        output::write_switch_points(out, &rt.trajectory)?;
        Ok(if rt.feasible { Verdict::Feasible } else { Verdict::Infeasible })
    }

    fn plan(&self, command: &'static str, out: &Path) -> Result<Verdict> {
        let c = &self.config;
        let mut report = self.report(command)?;
        let verdict = match ni_plan(&self.cp, &self.limits, c.sdot_start, c.sdot_end, &self.opts) {
            Ok(t) => {
                report.set_trajectory(&t);
                output::write_trajectory(out, &t)?;
                output::write_switch_points(out, &t)?;
                if command == "demo-unicycle" {
                    self.attach_property6(&mut report)?;
                }
                println!("feasible: traversal time {} s", output::fmt_num(t.traversal_time));
                Verdict::Feasible
            }
            Err(e @ (Error::NiFailure { .. } | Error::NotTraversable { .. })) => {
                report.cause = Some(if matches!(e, Error::NotTraversable { .. }) { "not traversable" } else { "NI failure" });
                report.message = Some(e.to_string());
                self.diagnose(&mut report, out)?;
                // the planner already failed; the diagnosis only explains where
                report.verdict = "infeasible";
                println!("infeasible ({}): s_last = {}", e, output::fmt_num(report.s_last));
                Verdict::Infeasible
            }
            Err(e) => return Err(e.into()),
        };
        report.write(out)?;
        Ok(verdict)
    }
}

fn load(cli: &Cli) -> Result<InstanceConfig> {
    match &cli.config {
        Some(path) => InstanceConfig::load(path),
        None => bail!("--config <file> is required for this command"),
    }
}

fn run(cli: &Cli) -> Result<Verdict> {
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Mvc => {
            let inst = Instance::build(load(cli)?, cli)?;
            output::write_limits(out, &inst.limits)?;
            println!("{} velocity-bound stretches", inst.limits.dagger_segments.len());
            Ok(Verdict::Feasible)
        }
        Command::Plan => Instance::build(load(cli)?, cli)?.plan("plan", out),
        Command::DetectFailure => {
            let inst = Instance::build(load(cli)?, cli)?;
            let mut report = inst.report("detect-failure")?;
            let verdict = inst.diagnose(&mut report, out)?;
            report.write(out)?;
            println!("{}: s_last = {}", report.verdict, output::fmt_num(report.s_last));
            Ok(verdict)
        }
        Command::DemoUnicycle { case } => {
            let config = InstanceConfig::demo(*case).context("demo case must be 1 or 2")?;
            let inst = Instance::build(config, cli)?;
            output::write_limits(out, &inst.limits)?;
            inst.plan("demo-unicycle", out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Verdict::Feasible) => ExitCode::SUCCESS,
        Ok(Verdict::Infeasible) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
