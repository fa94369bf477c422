//! Scenario execution: prediction, integration, judgement and artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::asymptotics::{predict, AsymptoticPrediction, Rationale, RatioLimit};
use crate::config::ExperimentConfig;
use crate::dynamics::{integrate, refine_check, Problem, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::Moment;
use crate::nonlinearity::Nonlinearity;
use crate::report::{judge, Empirical, ExperimentReport, Verdict};

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: ExperimentReport,
    pub trajectory: Trajectory,
}

/// Prediction for a scenario; a bare ODE is its own reference.
pub fn predict_scenario(config: &ExperimentConfig) -> Result<AsymptoticPrediction> {
    let (n, kernel, problem) = config.build().map_err(|e| e.in_scenario(&config.name))?;
    predict_for(&n, kernel.as_ref(), &problem).map_err(|e| e.in_scenario(&config.name))
}

fn predict_for(
    n: &Nonlinearity,
    kernel: Option<&crate::measures::MeasureKernel>,
    problem: &Problem,
) -> Result<AsymptoticPrediction> {
    match (problem, kernel) {
        (Problem::Ode { mass, .. }, _) => Ok(AsymptoticPrediction {
            lambda_class: n.lambda()?,
            mass: *mass,
            moment: Moment::Finite(0.0),
            limit: RatioLimit::Unit,
            rationale: Rationale::ReferenceEquation,
            conditions: None,
        }),
        (_, Some(k)) => predict(n, k),
        (_, None) => Err(Error::Config("kernel missing".into())),
    }
}

/// Runs one scenario and, when `out` is given, writes `<name>.csv` and
/// `<name>.report.txt` there.
pub fn run_scenario(config: &ExperimentConfig, out: Option<&Path>, exec: Execution) -> Result<ScenarioOutcome> {
    let ctx = |e: Error| e.in_scenario(&config.name);
    let (n, kernel, problem) = config.build().map_err(ctx)?;
    let prediction = predict_for(&n, kernel.as_ref(), &problem).map_err(ctx)?;
    let opts = config.options(exec);
    let (trajectory, refine_sup_diff) = if config.refine {
        let rc = refine_check(&n, &problem, &opts).map_err(ctx)?;
        (rc.coarse, Some(rc.sup_diff))
    } else {
        (integrate(&n, &problem, &opts).map_err(ctx)?, None)
    };
    let empirical = Empirical::from_trajectory(&trajectory, config.extrapolation_window);
    let judged_limit = config.expect.unwrap_or(prediction.limit);
    let verdict = judge(judged_limit, &empirical, &config.tolerances);
    let report = ExperimentReport {
        scenario: config.name.clone(),
        equation: config.equation.name().to_string(),
        nonlinearity: n.describe(),
        kernel: kernel.as_ref().map_or_else(|| format!("mass {}", problem.mass()), |k| k.describe()),
        prediction,
        judged_limit,
        t_end: config.t_end,
        h: config.h,
        scheme: trajectory.meta.scheme.name().to_string(),
        points: trajectory.len(),
        truncated_mass: trajectory.meta.truncated_mass,
        empirical,
        refine_sup_diff,
        verdict,
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let csv = fs::File::create(dir.join(format!("{}.csv", config.name)))?;
        trajectory.write_csv(std::io::BufWriter::new(csv))?;
        fs::write(dir.join(format!("{}.report.txt", config.name)), report.render())?;
    }
    Ok(ScenarioOutcome { report, trajectory })
}

#[derive(Debug, Clone)]
pub struct SuiteRow {
    pub path: PathBuf,
    pub outcome: std::result::Result<ScenarioOutcome, Error>,
}

impl SuiteRow {
    pub fn name(&self) -> String {
        match &self.outcome {
            Ok(o) => o.report.scenario.clone(),
            Err(_) => self.path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteSummary {
    pub rows: Vec<SuiteRow>,
}

impl SuiteSummary {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(&r.outcome, Ok(o) if o.report.verdict == verdict))
            .count()
    }

    pub fn errors(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// No inconsistent verdicts and no errors.
    pub fn passed(&self) -> bool {
        self.count(Verdict::Inconsistent) == 0 && self.errors() == 0
    }

    pub fn render(&self) -> String {
        let mut out = format!("{:<36} {:<14} {:<18} {:>14}\n", "scenario", "verdict", "predicted", "r_extrapolated");
        for row in &self.rows {
            match &row.outcome {
                Ok(o) => out.push_str(&format!(
                    "{:<36} {:<14} {:<18} {:>14.6}\n",
                    o.report.scenario,
                    o.report.verdict.to_string(),
                    o.report.judged_limit.to_string(),
                    o.report.empirical.r_extrapolated
                )),
                Err(e) => out.push_str(&format!("{:<36} {:<14} {}\n", row.name(), "error", e)),
            }
        }
        out.push_str(&format!(
            "total {} | confirmed {} | inconclusive {} | inconsistent {} | errors {}\n",
            self.rows.len(),
            self.count(Verdict::Confirmed),
            self.count(Verdict::Inconclusive),
            self.count(Verdict::Inconsistent),
            self.errors()
        ));
        out
    }
}

/// `*.cfg` files of a directory in name order.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every scenario of `dir`, scenarios in parallel, each one sequential
/// inside. Per-scenario failures are recorded, not propagated.
pub fn run_suite(dir: &Path, out: Option<&Path>, exec: Execution) -> Result<SuiteSummary> {
    let files = scenario_files(dir)?;
    let rows = exec.map(&files, |path| {
        let outcome = ExperimentConfig::load(path)
            .and_then(|c| run_scenario(&c, out, Execution::Sequential));
        SuiteRow { path: path.clone(), outcome }
    });
    Ok(SuiteSummary { rows })
}
