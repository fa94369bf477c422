//! Experiment reports and the verdict rule.
//!
//! Rendered reports are plain `key: value` lines in a fixed order:
//!
//! ```text
//! scenario, equation, nonlinearity, kernel, lambda_class, mass, first_moment,
//! predicted_limit, rationale, [conditions], t_end, h, scheme, points,
//! truncated_mass, r_final, r_extrapolated, r_fit_exponent, r_fit_degenerate,
//! d_final, d_extrapolated, c_final, c_extrapolated, r_window_spearman,
//! r_max, refine_sup_diff, verdict
//! ```

use std::fmt;

use crate::asymptotics::{AsymptoticPrediction, RatioLimit};
use crate::config::Tolerances;
use crate::dynamics::Trajectory;
use crate::trend::{extrapolate, spearman, tail_window};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    /// Whether a run with this verdict exits successfully.
    pub fn is_success(self) -> bool {
        !matches!(self, Verdict::Inconsistent)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// What the trajectory showed.
#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    pub r_final: f64,
    pub r_extrapolated: f64,
    pub r_fit_exponent: f64,
    pub r_fit_degenerate: bool,
    pub d_final: f64,
    pub d_extrapolated: f64,
    pub c_final: f64,
    pub c_extrapolated: f64,
    /// Spearman correlation of `r` with `t` over the extrapolation window.
    pub r_window_spearman: f64,
    pub r_max: f64,
    /// `t` and `r` over the whole trajectory, for the trend rule.
    pub times: Vec<f64>,
    pub ratio: Vec<f64>,
    pub window_start: usize,
}

impl Empirical {
    pub fn from_trajectory(tr: &Trajectory, window: f64) -> Self {
        let fit = extrapolate(&tr.times, &tr.ratio, window);
        let d = extrapolate(&tr.times, &tr.lag_diagnostic, window);
        let c = extrapolate(&tr.times, &tr.correction, window);
        let w = tail_window(tr.len(), window);
        let last = |v: &[f64]| *v.last().unwrap_or(&f64::NAN);
        Empirical {
            r_final: tr.final_ratio(),
            r_extrapolated: fit.limit,
            r_fit_exponent: fit.exponent,
            r_fit_degenerate: fit.degenerate,
            d_final: last(&tr.lag_diagnostic),
            d_extrapolated: d.limit,
            c_final: last(&tr.correction),
            c_extrapolated: c.limit,
            r_window_spearman: spearman(&tr.times[w.clone()], &tr.ratio[w.clone()]),
            r_max: tr.ratio.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            times: tr.times.clone(),
            ratio: tr.ratio.clone(),
            window_start: w.start,
        }
    }
}

/// Trend toward a `Zero` or `Unit` target: the distance `|r - target|` must
/// fall over the extrapolation window (Spearman sign) and end at most
/// `1/trend_factor` of its largest value along the trajectory.
pub fn trend_verdict(emp: &Empirical, target: f64, trend_factor: f64) -> Verdict {
    let dist: Vec<f64> = emp.ratio.iter().map(|r| (r - target).abs()).collect();
    if dist.is_empty() || dist.iter().any(|d| !d.is_finite()) {
        return Verdict::Inconclusive;
    }
    let max = dist.iter().cloned().fold(0.0, f64::max);
    if max <= 1e-9 {
        return Verdict::Confirmed;
    }
    let w = emp.window_start..dist.len();
    let rho = spearman(&emp.times[w.clone()], &dist[w]);
    if rho > 0.0 {
        return Verdict::Inconsistent;
    }
    if rho < 0.0 && *dist.last().unwrap() * trend_factor <= max {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    }
}

/// The verdict rule: a pure function of prediction, observation and tolerances.
pub fn judge(limit: RatioLimit, emp: &Empirical, tol: &Tolerances) -> Verdict {
    match limit {
        RatioLimit::Value(v) => {
            if !emp.r_extrapolated.is_finite() {
                Verdict::Inconclusive
            } else if (emp.r_extrapolated - v).abs() <= tol.value_rel * v {
                Verdict::Confirmed
            } else {
                Verdict::Inconsistent
            }
        }
        RatioLimit::Zero => trend_verdict(emp, 0.0, tol.trend_factor),
        RatioLimit::Unit => trend_verdict(emp, 1.0, tol.trend_factor),
        RatioLimit::Indeterminate => Verdict::Inconclusive,
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub scenario: String,
    pub equation: String,
    pub nonlinearity: String,
    pub kernel: String,
    pub prediction: AsymptoticPrediction,
    /// Limit actually judged against (the prediction unless overridden).
    pub judged_limit: RatioLimit,
    pub t_end: f64,
    pub h: f64,
    pub scheme: String,
    pub points: usize,
    pub truncated_mass: f64,
    pub empirical: Empirical,
    pub refine_sup_diff: Option<f64>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&v);
            out.push('\n');
        };
        let p = &self.prediction;
        let e = &self.empirical;
        line("scenario", self.scenario.clone());
        line("equation", self.equation.clone());
        line("nonlinearity", self.nonlinearity.clone());
        line("kernel", self.kernel.clone());
        line("lambda_class", p.lambda_class.to_string());
        line("mass", format!("{}", p.mass));
        line("first_moment", p.moment.to_string());
        if self.judged_limit != p.limit {
            line("predicted_limit", format!("{} (overridden: {})", p.limit, self.judged_limit));
        } else {
            line("predicted_limit", p.limit.to_string());
        }
        line("rationale", p.rationale.label().to_string());
        if let Some(c) = &p.conditions {
            line(
                "conditions",
                format!(
                    "truncated_moment={} integrated_tail_vanishes={} integrated_tail_diverges={}",
                    c.truncated_moment.verdict,
                    c.integrated_tail_vanishes.verdict,
                    c.integrated_tail_diverges.verdict
                ),
            );
        }
        line("t_end", format!("{}", self.t_end));
        line("h", format!("{}", self.h));
        line("scheme", self.scheme.clone());
        line("points", self.points.to_string());
        line("truncated_mass", format!("{:e}", self.truncated_mass));
        line("r_final", format!("{:.8}", e.r_final));
        line("r_extrapolated", format!("{:.8}", e.r_extrapolated));
        line("r_fit_exponent", format!("{:.6}", e.r_fit_exponent));
        line("r_fit_degenerate", e.r_fit_degenerate.to_string());
        line("d_final", format!("{:.8}", e.d_final));
        line("d_extrapolated", format!("{:.8}", e.d_extrapolated));
        line("c_final", format!("{:.8}", e.c_final));
        line("c_extrapolated", format!("{:.8}", e.c_extrapolated));
        line("r_window_spearman", format!("{:.6}", e.r_window_spearman));
        line("r_max", format!("{:.10}", e.r_max));
        line(
            "refine_sup_diff",
            self.refine_sup_diff.map_or("n/a".to_string(), |d| format!("{d:e}")),
        );
        line("verdict", self.verdict.to_string());
        out
    }
}
