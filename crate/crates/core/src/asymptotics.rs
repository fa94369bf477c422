//! Theoretical predictions for `x(t) / F⁻¹(M t)`.
//!
//! With finite memory the ratio tends to `e^{-λC}`. A half-line kernel
//! with infinite first moment sends it to zero when `λ > 0`; when `λ = 0`
//! the answer depends on how slowly the kernel tail decays, and is read off
//! from the growth of two kernel functionals evaluated along `s = F(x)/M`.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::{MeasureKernel, Moment, PowerLaw, Support};
use crate::nonlinearity::{LambdaClass, Nonlinearity};
use crate::quadrature::simpson_rule;
use crate::trend::{tail_trend, TailTrend};

/// Grid points needed at the end of a monotone run.
pub const TREND_MIN_STEPS: usize = 4;
/// Total change a monotone run must show.
pub const TREND_MIN_FACTOR: f64 = 10.0;

/// Predicted value of `lim x(t) / F⁻¹(M t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioLimit {
    Value(f64),
    Zero,
    Unit,
    Indeterminate,
}

impl RatioLimit {
    /// Numeric target, if any.
    pub fn target(&self) -> Option<f64> {
        match self {
            RatioLimit::Value(v) => Some(*v),
            RatioLimit::Zero => Some(0.0),
            RatioLimit::Unit => Some(1.0),
            RatioLimit::Indeterminate => None,
        }
    }
}

impl fmt::Display for RatioLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioLimit::Value(v) => write!(f, "value({v:.6})"),
            RatioLimit::Zero => write!(f, "zero"),
            RatioLimit::Unit => write!(f, "unit"),
            RatioLimit::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// Which rule produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rationale {
    /// The scenario integrates the reference equation itself.
    ReferenceEquation,
    /// Bounded delay: `e^{-λC}`.
    BoundedDelay,
    /// Half-line kernel with finite first moment: `e^{-λC}`.
    FiniteMoment,
    /// Infinite first moment with `λ > 0`.
    InfiniteMomentPositiveLambda,
    /// Infinite moment, `λ = 0`: both tail functionals vanish.
    TailFunctionalsVanish,
    /// Infinite moment, `λ = 0`: the integrated tail functional diverges.
    TailFunctionalDiverges,
    /// Infinite moment, `λ = 0`: neither rule applies on the sampled grid.
    NoRuleApplies,
}

impl Rationale {
    pub fn label(self) -> &'static str {
        match self {
            Rationale::ReferenceEquation => "reference-equation",
            Rationale::BoundedDelay => "bounded-delay",
            Rationale::FiniteMoment => "volterra-finite-moment",
            Rationale::InfiniteMomentPositiveLambda => "volterra-infinite-moment-positive-lambda",
            Rationale::TailFunctionalsVanish => "infinite-moment-tail-functionals-vanish",
            Rationale::TailFunctionalDiverges => "infinite-moment-tail-functional-diverges",
            Rationale::NoRuleApplies => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticPrediction {
    pub lambda_class: LambdaClass,
    pub mass: f64,
    pub moment: Moment,
    pub limit: RatioLimit,
    pub rationale: Rationale,
    /// Present when the infinite-moment classification ran.
    pub conditions: Option<ConditionReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionVerdict {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for ConditionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionVerdict::Holds => "holds",
            ConditionVerdict::Fails => "fails",
            ConditionVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Samples `(x, value)` of one limit expression and its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionTrend {
    pub samples: Vec<(f64, f64)>,
    pub verdict: ConditionVerdict,
}

impl ConditionTrend {
    fn to_zero(samples: Vec<(f64, f64)>) -> Self {
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let verdict = match tail_trend(&values, TREND_MIN_STEPS, TREND_MIN_FACTOR) {
            TailTrend::ToZero => ConditionVerdict::Holds,
            TailTrend::ToInfinity => ConditionVerdict::Fails,
            TailTrend::Inconclusive => ConditionVerdict::Inconclusive,
        };
        ConditionTrend { samples, verdict }
    }

    fn to_infinity(samples: Vec<(f64, f64)>) -> Self {
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let verdict = match tail_trend(&values, TREND_MIN_STEPS, TREND_MIN_FACTOR) {
            TailTrend::ToInfinity => ConditionVerdict::Holds,
            TailTrend::ToZero => ConditionVerdict::Fails,
            TailTrend::Inconclusive => ConditionVerdict::Inconclusive,
        };
        ConditionTrend { samples, verdict }
    }
}

/// The three limit expressions of the infinite-moment classification, each
/// evaluated at `s = F(x)/M` along [`classification_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// `f(x)/(x/log x) · ∫_{[0,s]} u μ(du) → 0`.
    pub truncated_moment: ConditionTrend,
    /// `f(x)/x · T(s) → 0`.
    pub integrated_tail_vanishes: ConditionTrend,
    /// `f(x)/x · T(s) → ∞`.
    pub integrated_tail_diverges: ConditionTrend,
}

/// `log x` at the classification points: 16 points geometric between
/// `log 10^3` and `log 10^300`.
pub fn classification_grid() -> Vec<f64> {
    (0..16)
        .map(|j| 3.0 * 100f64.powf(j as f64 / 15.0) * std::f64::consts::LN_10)
        .collect()
}

/// Prediction for a nonlinearity and kernel.
pub fn predict(n: &Nonlinearity, mu: &MeasureKernel) -> Result<AsymptoticPrediction> {
    let lambda = n.lambda()?;
    let moment = mu.first_moment()?;
    let mass = mu.total_mass();
    let finite_rule = |rationale| {
        let limit = match (lambda, moment) {
            (LambdaClass::Zero, _) => RatioLimit::Unit,
            (_, Moment::Finite(0.0)) => RatioLimit::Unit,
            (LambdaClass::Infinite, _) => RatioLimit::Zero,
            (LambdaClass::Finite(l), Moment::Finite(c)) => RatioLimit::Value((-l * c).exp()),
            (LambdaClass::Finite(_), Moment::Infinite) => RatioLimit::Zero,
        };
        AsymptoticPrediction { lambda_class: lambda, mass, moment, limit, rationale, conditions: None }
    };
    match (mu.support(), moment) {
        (Support::DelayInterval { .. }, _) => Ok(finite_rule(Rationale::BoundedDelay)),
        (Support::HalfLine, Moment::Finite(_)) => Ok(finite_rule(Rationale::FiniteMoment)),
        (Support::HalfLine, Moment::Infinite) => match lambda {
            LambdaClass::Zero => {
                let (report, limit) = classify_infinite_moment(n, mu)?;
                let rationale = match limit {
                    RatioLimit::Unit => Rationale::TailFunctionalsVanish,
                    RatioLimit::Zero => Rationale::TailFunctionalDiverges,
                    _ => Rationale::NoRuleApplies,
                };
                Ok(AsymptoticPrediction {
                    lambda_class: lambda,
                    mass,
                    moment,
                    limit,
                    rationale,
                    conditions: Some(report),
                })
            }
            _ => Ok(AsymptoticPrediction {
                lambda_class: lambda,
                mass,
                moment,
                limit: RatioLimit::Zero,
                rationale: Rationale::InfiniteMomentPositiveLambda,
                conditions: None,
            }),
        },
    }
}

/// Classification for `λ = 0` and a half-line kernel of infinite first
/// moment: `Unit` when both tail functionals vanish, `Zero` when the
/// integrated tail functional diverges, `Indeterminate` otherwise.
pub fn classify_infinite_moment(
    n: &Nonlinearity,
    mu: &MeasureKernel,
) -> Result<(ConditionReport, RatioLimit)> {
    if !mu.is_half_line() {
        return Err(Error::WrongRegime("kernel is not on [0, inf)".into()));
    }
    if !matches!(n.lambda()?, LambdaClass::Zero) {
        return Err(Error::WrongRegime("lambda is not zero".into()));
    }
    if !mu.first_moment()?.is_infinite() {
        return Err(Error::WrongRegime("first moment is finite".into()));
    }
    let mass = mu.total_mass();
    let mut moment_samples = Vec::new();
    let mut tail_samples = Vec::new();
    for w in classification_grid() {
        let x = w.exp();
        let s = n.transform_log(w) / mass;
        // f(x)/x in the log domain
        let f_over_x = (n.log_f(w) - w).exp();
        moment_samples.push((x, f_over_x * w * mu.partial_moment(s)?));
        tail_samples.push((x, f_over_x * mu.integrated_tail(s)?));
    }
    let report = ConditionReport {
        truncated_moment: ConditionTrend::to_zero(moment_samples),
        integrated_tail_vanishes: ConditionTrend::to_zero(tail_samples.clone()),
        integrated_tail_diverges: ConditionTrend::to_infinity(tail_samples),
    };
    let limit = if report.truncated_moment.verdict == ConditionVerdict::Holds
        && report.integrated_tail_vanishes.verdict == ConditionVerdict::Holds
    {
        RatioLimit::Unit
    } else if report.integrated_tail_diverges.verdict == ConditionVerdict::Holds {
        RatioLimit::Zero
    } else {
        RatioLimit::Indeterminate
    };
    Ok((report, limit))
}

/// `(α_unit_lo, α_zero_hi)` for `f` from the example family and
/// `k ∈ RV(-α)`: the ratio tends to one for `α ∈ (α_unit_lo, 2]` and to zero
/// for `α ∈ [1, α_zero_hi)`.
pub fn rv_thresholds(theta: f64) -> Result<(f64, f64)> {
    if !(theta.is_finite() && theta > 1.0) {
        return Err(Error::BadTheta(theta));
    }
    Ok((1.0 + 2.0 / (1.0 + theta), 1.0 + 1.0 / (1.0 + theta)))
}

/// Regular-variation indices (in `log x`) of the truncated-moment and
/// integrated-tail functionals for the example family and `k ∈ RV(-α)`.
pub fn rv_indices(theta: f64, alpha: f64) -> (f64, f64) {
    let moment = (1.0 - theta) / (1.0 + theta) + 2.0 - alpha;
    let tail = 1.0 / (1.0 + theta) - alpha + 1.0;
    (moment, tail)
}

/// Verdict implied by the signs of [`rv_indices`].
pub fn symbolic_verdict(theta: f64, alpha: f64) -> RatioLimit {
    let (moment, tail) = rv_indices(theta, alpha);
    if moment < 0.0 && tail < 0.0 {
        RatioLimit::Unit
    } else if tail > 0.0 {
        RatioLimit::Zero
    } else {
        RatioLimit::Indeterminate
    }
}

/// One point of an `(θ, α)` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub alpha: f64,
    pub numeric: RatioLimit,
    pub symbolic: RatioLimit,
}

impl SweepRow {
    /// Numeric `Unit`/`Zero` verdicts must agree with the symbolic one;
    /// a numeric `Indeterminate` is always acceptable.
    pub fn consistent(&self) -> bool {
        match self.numeric {
            RatioLimit::Unit | RatioLimit::Zero => self.numeric == self.symbolic,
            _ => true,
        }
    }
}

/// Classifies `example(θ)` against unit-mass `powerlaw(α)` for every pair.
pub fn sweep_rv_grid(thetas: &[f64], alphas: &[f64], exec: Execution) -> Result<Vec<SweepRow>> {
    let pairs: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| alphas.iter().map(move |&a| (t, a)))
        .collect();
    exec.map(&pairs, |&(theta, alpha)| -> Result<SweepRow> {
        let n = Nonlinearity::example(theta)?;
        let mu = MeasureKernel::new(
            Support::HalfLine,
            &[],
            Some(std::sync::Arc::new(PowerLaw::normalized(alpha, 1.0)?)),
        )?;
        let (_, numeric) = classify_infinite_moment(&n, &mu)?;
        Ok(SweepRow { theta, alpha, numeric, symbolic: symbolic_verdict(theta, alpha) })
    })
    .into_iter()
    .collect()
}

/// Mass of `μ([a, b])` excluding an atom at lag zero when `a = 0`: the
/// left limit used at the upper end of the outer `K` integral.
fn window_left_limit(mu: &MeasureKernel, a: f64, b: f64) -> Result<f64> {
    let m = mu.window_mass(a, b)?;
    if a <= 0.0 {
        let at_zero: f64 = mu.atoms().iter().filter(|at| at.lag == 0.0).map(|at| at.weight).sum();
        return Ok(m - at_zero);
    }
    Ok(m)
}

/// `K(e^w) · e^{-log f(e^w)}`, where
/// `K(x) = ∫_1^x (f(v)/v) μ([F(x)/M - F(v)/M, F(x)/M]) dv`.
///
/// The outer integral runs over the window's lower end `a = (F(x) - F(v))/M`,
/// where `(f(v)/v) dv = M f(v)²/v da`, mapped by `a = e^z - 1` and summed by
/// composite Simpson in `z`. Both the kernel near lag zero and the
/// concentration of `f(v)/v` at `v = x` are then smooth on the panel scale.
fn scaled_k(n: &Nonlinearity, mu: &MeasureKernel, w: f64, panels: usize) -> Result<f64> {
    if w <= 0.0 {
        return Ok(0.0);
    }
    let mass = mu.total_mass();
    let big_f = n.transform_log(w);
    let b = big_f / mass;
    let lfw = n.log_f(w);
    let mut acc = 0.0;
    for (z, weight) in simpson_rule(0.0, b.ln_1p(), panels) {
        let a = z.exp_m1().min(b);
        let (s, win) = if a <= 0.0 {
            (w, window_left_limit(mu, 0.0, b)?)
        } else {
            let s = if a >= b { 0.0 } else { n.inverse_log(big_f - mass * a)? };
            (s, mu.window_mass(a, b)?)
        };
        if win > 0.0 {
            acc += weight * mass * (2.0 * n.log_f(s) - s - lfw + z).exp() * win;
        }
    }
    Ok(acc)
}

/// `K(x)` with `panels` Simpson panels.
pub fn compute_k_with(n: &Nonlinearity, mu: &MeasureKernel, x: f64, panels: usize) -> Result<f64> {
    if !mu.is_half_line() {
        return Err(Error::WrongSupport);
    }
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::DomainError(x));
    }
    let w = x.ln();
    Ok(scaled_k(n, mu, w, panels)? * n.log_f(w).exp())
}

/// `K(x)` with the default 64 panels.
pub fn compute_k(n: &Nonlinearity, mu: &MeasureKernel, x: f64) -> Result<f64> {
    compute_k_with(n, mu, x, 64)
}

/// Trend of `f(x)/x · ∫_1^x K(u)/f²(u) du → 0` on [`classification_grid`].
pub fn check_k_functional(n: &Nonlinearity, mu: &MeasureKernel) -> Result<ConditionTrend> {
    if !mu.is_half_line() {
        return Err(Error::WrongSupport);
    }
    let mut samples = Vec::new();
    for w in classification_grid() {
        // ∫_1^x K/f² du = ∫_0^w scaled_k(s) · e^{s - log f(e^s)} ds
        let mut inner = 0.0;
        for (s, weight) in simpson_rule(0.0, w, 64) {
            let sk = scaled_k(n, mu, s, 32)?;
            if sk > 0.0 {
                inner += weight * sk * n.transform_density(s);
            }
        }
        samples.push((w.exp(), (n.log_f(w) - w).exp() * inner));
    }
    Ok(ConditionTrend::to_zero(samples))
}

/// Samples of `x f'(x) / f(x)` at `x = 10^k`, `k = 2..12`.
pub fn log_derivative_samples(n: &Nonlinearity) -> Vec<(f64, f64)> {
    (2..=12)
        .map(|k| {
            let x = 10f64.powi(k);
            let w = x.ln();
            (x, x * n.f_prime(x) / n.log_f(w).exp())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn delay1() -> MeasureKernel {
        MeasureKernel::new(Support::DelayInterval { tau: 1.0 }, &[(-1.0, 1.0)], None).unwrap()
    }

    fn unit_powerlaw(alpha: f64) -> MeasureKernel {
        MeasureKernel::new(
            Support::HalfLine,
            &[],
            Some(Arc::new(PowerLaw::normalized(alpha, 1.0).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn finite_memory_predictions() {
        let p = predict(&Nonlinearity::example(1.0).unwrap(), &delay1()).unwrap();
        assert_eq!(p.limit, RatioLimit::Value((-1f64).exp()));
        assert_eq!(p.rationale, Rationale::BoundedDelay);
        let p = predict(&Nonlinearity::example(2.0).unwrap(), &delay1()).unwrap();
        assert_eq!(p.limit, RatioLimit::Unit);
        let p = predict(&Nonlinearity::example(0.5).unwrap(), &delay1()).unwrap();
        assert_eq!(p.limit, RatioLimit::Zero);
        let p = predict(&Nonlinearity::example(1.0).unwrap(), &MeasureKernel::powerlaw(3.0, 2.0).unwrap())
            .unwrap();
        assert!((p.limit.target().unwrap() - (-1f64).exp()).abs() < 1e-8);
        assert_eq!(p.rationale, Rationale::FiniteMoment);
    }

    #[test]
    fn infinite_moment_with_positive_lambda_is_zero() {
        let p = predict(&Nonlinearity::example(1.0).unwrap(), &unit_powerlaw(1.5)).unwrap();
        assert_eq!(p.limit, RatioLimit::Zero);
        assert_eq!(p.rationale, Rationale::InfiniteMomentPositiveLambda);
    }

    #[test]
    fn thresholds() {
        assert_eq!(rv_thresholds(3.0).unwrap(), (1.5, 1.25));
        let (u, z) = rv_thresholds(2.0).unwrap();
        assert!((u - 5.0 / 3.0).abs() < 1e-15 && (z - 4.0 / 3.0).abs() < 1e-15);
        let (u, z) = rv_thresholds(1e12).unwrap();
        assert!((u - 1.0).abs() < 1e-11 && (z - 1.0).abs() < 1e-11);
        assert!(matches!(rv_thresholds(1.0), Err(Error::BadTheta(_))));
    }

    #[test]
    fn classification_of_the_three_regimes() {
        let n = Nonlinearity::example(3.0).unwrap();
        let (_, unit) = classify_infinite_moment(&n, &unit_powerlaw(1.9)).unwrap();
        let (_, zero) = classify_infinite_moment(&n, &unit_powerlaw(1.1)).unwrap();
        let (_, gap) = classify_infinite_moment(&n, &unit_powerlaw(1.35)).unwrap();
        assert_eq!(unit, RatioLimit::Unit);
        assert_eq!(zero, RatioLimit::Zero);
        assert_eq!(gap, RatioLimit::Indeterminate);
    }

    #[test]
    fn classification_rejects_other_regimes() {
        let n = Nonlinearity::example(1.0).unwrap();
        assert!(matches!(
            classify_infinite_moment(&n, &unit_powerlaw(1.5)),
            Err(Error::WrongRegime(_))
        ));
        let n3 = Nonlinearity::example(3.0).unwrap();
        assert!(classify_infinite_moment(&n3, &delay1()).is_err());
        assert!(classify_infinite_moment(&n3, &MeasureKernel::powerlaw(3.0, 2.0).unwrap()).is_err());
    }

    #[test]
    fn k_is_zero_at_one_and_when_window_misses_support() {
        let n = Nonlinearity::example(1.0).unwrap();
        let mu = unit_powerlaw(1.5);
        assert_eq!(compute_k(&n, &mu, 1.0).unwrap(), 0.0);
        assert!(compute_k(&n, &mu, 0.5).is_err());
        let far = MeasureKernel::new(Support::HalfLine, &[(1e9, 1.0)], None).unwrap();
        assert_eq!(compute_k(&n, &far, 1e3).unwrap(), 0.0);
        let k1 = compute_k(&n, &mu, 1e2).unwrap();
        let k2 = compute_k(&n, &mu, 1e4).unwrap();
        assert!(k1 > 0.0 && k2 >= k1);
    }

    #[test]
    fn k_agrees_with_tenfold_refinement() {
        let n = Nonlinearity::example(1.0).unwrap();
        let mu = unit_powerlaw(1.5);
        let x = 20f64.exp();
        let coarse = compute_k_with(&n, &mu, x, 64).unwrap();
        let fine = compute_k_with(&n, &mu, x, 640).unwrap();
        assert!(((coarse - fine) / fine).abs() < 1e-4);
    }

    #[test]
    fn k_functional_vanishes_for_slow_tails_and_point_mass() {
        let n = Nonlinearity::example(3.0).unwrap();
        assert_eq!(check_k_functional(&n, &unit_powerlaw(1.9)).unwrap().verdict, ConditionVerdict::Holds);
        let dirac = MeasureKernel::volterra_dirac(1.0).unwrap();
        assert_eq!(check_k_functional(&n, &dirac).unwrap().verdict, ConditionVerdict::Holds);
    }

    #[test]
    fn symbolic_signs() {
        assert_eq!(symbolic_verdict(3.0, 1.9), RatioLimit::Unit);
        assert_eq!(symbolic_verdict(3.0, 1.1), RatioLimit::Zero);
        assert_eq!(symbolic_verdict(3.0, 1.35), RatioLimit::Indeterminate);
    }
}
