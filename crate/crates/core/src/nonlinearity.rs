//! Sublinear nonlinearities `f`, the transform `F(x) = ∫_1^x du / f(u)` and
//! its inverse, all evaluated through `w = log x` so that states far beyond
//! the range of `f64` stay representable.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::{gk15, integrate};

/// Spacing of the cached knots of `F` in the log variable.
const KNOT_STEP: f64 = 0.25;
/// Lowest and highest cached knots (in `w = log x`).
const KNOT_LO: f64 = -40.0;
const KNOT_HI: f64 = 1000.0;
/// Below this log-argument `F` is not evaluated (`x ≈ 1e-304`).
const W_MIN: f64 = -700.0;

/// Growth class of `f(x) / (x / log x)` as `x → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaClass {
    Zero,
    Finite(f64),
    Infinite,
}

impl LambdaClass {
    /// `λ` as an extended real.
    pub fn value(&self) -> f64 {
        match self {
            LambdaClass::Zero => 0.0,
            LambdaClass::Finite(l) => *l,
            LambdaClass::Infinite => f64::INFINITY,
        }
    }

    fn agrees_with(&self, other: &LambdaClass) -> bool {
        match (self, other) {
            (LambdaClass::Zero, LambdaClass::Zero) => true,
            (LambdaClass::Infinite, LambdaClass::Infinite) => true,
            (LambdaClass::Finite(a), LambdaClass::Finite(b)) => {
                (a - b).abs() <= 0.05 * a.abs().max(1.0)
            }
            _ => false,
        }
    }
}

impl fmt::Display for LambdaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaClass::Zero => write!(f, "zero"),
            LambdaClass::Finite(l) => write!(f, "finite({l})"),
            LambdaClass::Infinite => write!(f, "infinite"),
        }
    }
}

/// Verdict on `limsup f(x) F(x) / x < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvhwCondition {
    Bounded,
    Unbounded,
}

/// Thresholds for [`Nonlinearity::estimate_lambda_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaThresholds {
    /// `q(1e12)` below this (and decreasing) means `λ = 0`.
    pub zero_level: f64,
    /// `q(1e12)` above this (and increasing) means `λ = ∞`.
    pub infinite_level: f64,
    /// Largest `|d log q / d log log x|` still read as a finite limit.
    pub slope_tol: f64,
}

impl Default for LambdaThresholds {
    fn default() -> Self {
        LambdaThresholds {
            zero_level: 1e-3,
            infinite_level: 1e3,
            slope_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
enum Family {
    /// `f(x) = g(x + s(θ))`, `g(y) = (y + 1) / log^θ(2 + y)`, `s(θ) = e^{θ+1} - 2`.
    Example { theta: f64, ln_a1: f64, a1: f64, a2: f64 },
    Sqrt,
    Custom { f: Expr, f_prime: Expr, log_f: Expr },
}

/// Cached values of `F` at equally spaced knots in `w = log x`.
#[derive(Debug, Clone)]
struct TransformTable {
    /// Knot `i` sits at `w = lo + i * KNOT_STEP`.
    lo: f64,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    family: Family,
    declared_lambda: Option<LambdaClass>,
    monotone_from: f64,
    concave_from: Option<f64>,
    table: TransformTable,
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl Nonlinearity {
    /// The shifted family `f(x) = g(x + e^{θ+1} - 2)`, `g(y) = (y+1)/log^θ(2+y)`.
    pub fn example(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::BadTheta(theta));
        }
        let a2 = (theta + 1.0).exp();
        let a1 = a2 - 1.0;
        let declared = if theta > 1.0 {
            LambdaClass::Zero
        } else if theta == 1.0 {
            LambdaClass::Finite(1.0)
        } else {
            LambdaClass::Infinite
        };
        Ok(Self::build(
            Family::Example { theta, ln_a1: a1.ln(), a1, a2 },
            Some(declared),
            0.0,
            Some(0.0),
        ))
    }

    /// `f(x) = √x`.
    pub fn sqrt() -> Self {
        Self::build(Family::Sqrt, Some(LambdaClass::Zero), 0.0, Some(0.0))
    }

    /// User-supplied `f`, `f'` (in the variable `x`) and `log f(e^w)` (in `w`).
    pub fn custom(
        f: &str,
        f_prime: &str,
        log_f: &str,
        declared_lambda: Option<LambdaClass>,
        monotone_from: f64,
        concave_from: Option<f64>,
    ) -> Result<Self> {
        let family = Family::Custom {
            f: Expr::parse(f, "x")?,
            f_prime: Expr::parse(f_prime, "x")?,
            log_f: Expr::parse(log_f, "w")?,
        };
        if !(monotone_from.is_finite() && monotone_from >= 0.0) {
            return Err(Error::InvalidNonlinearity(format!(
                "monotone_from must be a non-negative number, got {monotone_from}"
            )));
        }
        let n = Self::build(family, declared_lambda, monotone_from, concave_from);
        n.validate()?;
        Ok(n)
    }

    fn build(
        family: Family,
        declared_lambda: Option<LambdaClass>,
        monotone_from: f64,
        concave_from: Option<f64>,
    ) -> Self {
        let mut n = Nonlinearity {
            family,
            declared_lambda,
            monotone_from,
            concave_from,
            table: TransformTable { lo: 0.0, values: vec![0.0] },
        };
        n.table = n.build_table();
        n
    }

    fn build_table(&self) -> TransformTable {
        let h = |v: f64| (v - self.log_f(v)).exp();
        let panel = |a: f64, b: f64| {
            let r = integrate(h, a, b, 1e-14, 0.0, 64);
            r.value
        };
        let up_count = (KNOT_HI / KNOT_STEP).round() as usize;
        let down_count = (-KNOT_LO / KNOT_STEP).round() as usize;

        let mut up = vec![0.0];
        let mut acc = 0.0;
        for i in 0..up_count {
            let a = i as f64 * KNOT_STEP;
            acc += panel(a, a + KNOT_STEP);
            if !acc.is_finite() {
                break;
            }
            up.push(acc);
        }
        let mut down = Vec::new();
        let mut acc = 0.0;
        for i in 0..down_count {
            let b = -(i as f64) * KNOT_STEP;
            acc -= panel(b - KNOT_STEP, b);
            if !acc.is_finite() {
                break;
            }
            down.push(acc);
        }
        let origin = down.len();
        let lo = -(origin as f64) * KNOT_STEP;
        let mut values: Vec<f64> = down.into_iter().rev().collect();
        values.extend(up);
        TransformTable { lo, values }
    }

    pub fn declared_lambda(&self) -> Option<LambdaClass> {
        self.declared_lambda
    }

    pub fn monotone_from(&self) -> f64 {
        self.monotone_from
    }

    pub fn concave_from(&self) -> Option<f64> {
        self.concave_from
    }

    /// `θ` for the built-in example family.
    pub fn theta(&self) -> Option<f64> {
        match self.family {
            Family::Example { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.family {
            Family::Example { theta, .. } => format!("example({theta})"),
            Family::Sqrt => "sqrt".to_string(),
            Family::Custom { f, .. } => format!("custom({})", f.source()),
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        match &self.family {
            Family::Example { theta, a1, a2, .. } => (x + a1) / (x + a2).ln().powf(*theta),
            Family::Sqrt => x.sqrt(),
            Family::Custom { f, .. } => f.eval(x),
        }
    }

    pub fn f_prime(&self, x: f64) -> f64 {
        match &self.family {
            Family::Example { theta, a1, a2, .. } => {
                let l = (x + a2).ln();
                (1.0 - (x + a1) * theta / ((x + a2) * l)) / l.powf(*theta)
            }
            Family::Sqrt => 0.5 / x.sqrt(),
            Family::Custom { f_prime, .. } => f_prime.eval(x),
        }
    }

    /// `log f(e^w)`, finite for every `w` where the family is defined.
    pub fn log_f(&self, w: f64) -> f64 {
        match &self.family {
            Family::Example { theta, ln_a1, a2, .. } => {
                let ln_a2 = a2.ln();
                log_add_exp(w, *ln_a1) - theta * log_add_exp(w, ln_a2).ln()
            }
            Family::Sqrt => 0.5 * w,
            Family::Custom { log_f, .. } => log_f.eval(w),
        }
    }

    /// `d log f(e^w) / dw = x f'(x) / f(x)` at `x = e^w`.
    pub fn log_f_slope(&self, w: f64) -> f64 {
        match &self.family {
            Family::Example { theta, ln_a1, a2, .. } => {
                let ln_a2 = a2.ln();
                let s1 = 1.0 / (1.0 + (ln_a1 - w).exp());
                let s2 = 1.0 / (1.0 + (ln_a2 - w).exp());
                s1 - theta * s2 / log_add_exp(w, ln_a2)
            }
            Family::Sqrt => 0.5,
            Family::Custom { log_f, .. } => {
                let d = 1e-5 * w.abs().max(1.0);
                (log_f.eval(w + d) - log_f.eval(w - d)) / (2.0 * d)
            }
        }
    }

    /// Integrand of `F` in the log variable: `d F(e^w) / dw = e^{w - log f(e^w)}`.
    pub fn transform_density(&self, w: f64) -> f64 {
        (w - self.log_f(w)).exp()
    }

    /// `F(e^w)`.
    pub fn transform_log(&self, w: f64) -> f64 {
        let t = &self.table;
        if w.is_nan() {
            return f64::NAN;
        }
        let h = |v: f64| self.transform_density(v);
        let last = t.lo + (t.values.len() - 1) as f64 * KNOT_STEP;
        if w > last {
            let r = integrate(h, last, w, 1e-13, 0.0, 2000);
            return t.values[t.values.len() - 1] + r.value;
        }
        if w < t.lo {
            if w < W_MIN {
                return f64::NAN;
            }
            let r = integrate(h, w, t.lo, 1e-13, 0.0, 2000);
            return t.values[0] - r.value;
        }
        // integrate from the knot nearer the origin so that F keeps full
        // relative accuracy close to x = 1
        let pos = (w - t.lo) / KNOT_STEP;
        let k = if w >= 0.0 { pos.floor() } else { pos.ceil() } as usize;
        let k = k.min(t.values.len() - 1);
        let knot = t.lo + k as f64 * KNOT_STEP;
        if knot == w {
            return t.values[k];
        }
        let (piece, _) = if w > knot { gk15(&h, knot, w) } else { gk15(&h, w, knot) };
        if w > knot {
            t.values[k] + piece
        } else {
            t.values[k] - piece
        }
    }

    /// `F(x)` for `x > 0`.
    pub fn eval_f_transform(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::DomainError(x));
        }
        Ok(self.transform_log(x.ln()))
    }

    /// `log F⁻¹(y)`: the `w` with `F(e^w) = y`.
    pub fn inverse_log(&self, y: f64) -> Result<f64> {
        if y.is_nan() {
            return Err(Error::DomainError(y));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let t = &self.table;
        let (mut a, mut b);
        if y >= t.values[0] && y <= t.values[t.values.len() - 1] {
            // values are increasing in the knot index
            let k = t.values.partition_point(|&v| v <= y).saturating_sub(1);
            let k = k.min(t.values.len() - 2);
            a = t.lo + k as f64 * KNOT_STEP;
            b = a + KNOT_STEP;
        } else if y > t.values[t.values.len() - 1] {
            a = t.lo + (t.values.len() - 1) as f64 * KNOT_STEP;
            b = a + 1.0;
            let mut width = 1.0;
            while self.transform_log(b) < y {
                a = b;
                width *= 2.0;
                b += width;
                if b > 1e6 {
                    return Err(Error::DomainError(y));
                }
            }
        } else {
            if y < self.transform_log(W_MIN) {
                return Err(Error::DomainError(y));
            }
            b = t.lo;
            a = (b - 1.0).max(W_MIN);
            let mut width = 1.0;
            while self.transform_log(a) > y {
                b = a;
                width *= 2.0;
                a = (a - width).max(W_MIN);
            }
        }
        let fa = self.transform_log(a);
        let fb = self.transform_log(b);
        let mut w = if fb > fa { a + (y - fa) / (fb - fa) * (b - a) } else { 0.5 * (a + b) };
        let scale = y.abs().max(1.0);
        for _ in 0..200 {
            let g = self.transform_log(w) - y;
            if g.abs() <= 1e-14 * scale {
                return Ok(w);
            }
            if g > 0.0 {
                b = w;
            } else {
                a = w;
            }
            let slope = self.transform_density(w);
            let mut next = w - g / slope;
            if !(next > a && next < b) || !next.is_finite() {
                next = 0.5 * (a + b);
            }
            if (next - w).abs() <= 1e-15 * w.abs().max(1.0) {
                return Ok(next);
            }
            w = next;
        }
        Ok(w)
    }

    /// Checks the sampled invariants of the class of admissible `f`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNonlinearity(msg));
        for i in 0..=140 {
            let x = 10f64.powf(-2.0 + i as f64 / 10.0);
            let fx = self.f(x);
            if !(fx.is_finite() && fx > 0.0) {
                return bad(format!("f({x:e}) = {fx} is not positive"));
            }
            if x > self.monotone_from {
                let d = self.f_prime(x);
                if !(d.is_finite() && d > 0.0) {
                    return bad(format!("f'({x:e}) = {d} is not positive"));
                }
            }
            let lf = self.log_f(x.ln());
            if (lf - fx.ln()).abs() > 1e-10 * fx.ln().abs().max(1.0) {
                return bad(format!("log f disagrees with f at x = {x:e}: {lf} vs {}", fx.ln()));
            }
        }
        // f' must be heading to zero: compare the largest representable sample
        // against the start of the monotone range
        let x_ref = (2.0 * self.monotone_from).max(1.0);
        let d_ref = self.f_prime(x_ref);
        let d_far = (0..=30)
            .rev()
            .map(|k| self.f_prime(10f64.powi(10 * k)))
            .find(|d| d.is_finite() && *d > 0.0);
        match d_far {
            Some(d) if d < 0.5 * d_ref => Ok(()),
            Some(d) => bad(format!("f' does not decay: f'(far) = {d}, f'({x_ref}) = {d_ref}")),
            None => bad("f' is not finite at large arguments".to_string()),
        }
    }

    /// `q(x) = f(x) / (x / log x)` on `x = 10^2 .. 10^12`.
    pub fn lambda_samples(&self) -> Vec<(f64, f64)> {
        (2..=12)
            .map(|k| {
                let w = k as f64 * std::f64::consts::LN_10;
                (w, (self.log_f(w) + w.ln() - w).exp())
            })
            .collect()
    }

    pub fn estimate_lambda(&self) -> Result<LambdaClass> {
        self.estimate_lambda_with(&LambdaThresholds::default())
    }

    /// Classifies `λ` from the tail of `q(x) = f(x) log x / x`.
    ///
    /// Absolute levels at `x = 1e12` decide clear cases. Otherwise the
    /// log-log slope `d log q / d log log x` over the last four decades
    /// separates polylogarithmic decay or growth from a finite limit, which
    /// is then Richardson-extrapolated assuming a `1 / log x` correction.
    pub fn estimate_lambda_with(&self, th: &LambdaThresholds) -> Result<LambdaClass> {
        let samples = self.lambda_samples();
        let tail = &samples[samples.len() - 5..];
        let increasing = tail.windows(2).all(|p| p[1].1 >= p[0].1);
        let decreasing = tail.windows(2).all(|p| p[1].1 <= p[0].1);
        let (w0, q0) = tail[0];
        let (w1, q1) = tail[tail.len() - 2];
        let (w2, q2) = tail[tail.len() - 1];
        if !q2.is_finite() || q2 <= 0.0 {
            return Err(Error::NonMonotoneTail(format!("q(1e12) = {q2}")));
        }
        let slope = (q2.ln() - q0.ln()) / (w2.ln() - w0.ln());
        let estimate = if q2 < th.zero_level && decreasing {
            LambdaClass::Zero
        } else if q2 > th.infinite_level && increasing {
            LambdaClass::Infinite
        } else if slope < -th.slope_tol && decreasing {
            LambdaClass::Zero
        } else if slope > th.slope_tol && increasing {
            LambdaClass::Infinite
        } else if slope.abs() <= th.slope_tol {
            LambdaClass::Finite((w2 * q2 - w1 * q1) / (w2 - w1))
        } else {
            return Err(Error::NonMonotoneTail(format!(
                "q oscillates with log-log slope {slope:.3}"
            )));
        };
        if let Some(declared) = self.declared_lambda {
            if !declared.agrees_with(&estimate) {
                return Err(Error::LambdaMismatch {
                    declared: declared.to_string(),
                    estimated: estimate.to_string(),
                });
            }
        }
        Ok(estimate)
    }

    /// `λ`, taken from the declaration when present, else estimated.
    pub fn lambda(&self) -> Result<LambdaClass> {
        match self.declared_lambda {
            Some(l) => Ok(l),
            None => self.estimate_lambda(),
        }
    }

    /// `f(x) F(x) / x` on `x = 10^2 .. 10^12`.
    pub fn rvhw_samples(&self) -> Vec<(f64, f64)> {
        (2..=12)
            .map(|k| {
                let w = k as f64 * std::f64::consts::LN_10;
                (w, (self.log_f(w) + self.transform_log(w).ln() - w).exp())
            })
            .collect()
    }

    /// Decides whether `f(x) F(x) / x` stays bounded.
    ///
    /// Non-increasing tails are bounded. An increasing tail is unbounded
    /// when it passes `1e3`, or when its per-decade increments have not
    /// shrunk by half across the last six decades (growth at least like a
    /// multiple of `log x`); geometrically shrinking increments converge.
    pub fn check_rvhw_condition(&self) -> Result<RvhwCondition> {
        let samples = self.rvhw_samples();
        let tail: Vec<f64> = samples[4..].iter().map(|s| s.1).collect();
        if tail.iter().any(|v| !v.is_finite()) {
            return Err(Error::Inconclusive("f F / x is not finite on the grid".into()));
        }
        let steps: Vec<f64> = tail.windows(2).map(|p| p[1] - p[0]).collect();
        if steps.iter().all(|d| *d <= 0.0) {
            return Ok(RvhwCondition::Bounded);
        }
        if !steps.iter().all(|d| *d > 0.0) {
            return Err(Error::Inconclusive("f F / x is not monotone on the tail".into()));
        }
        let last = tail[tail.len() - 1];
        if last > 1e3 {
            return Ok(RvhwCondition::Unbounded);
        }
        if steps[steps.len() - 1] >= 0.5 * steps[0] {
            Ok(RvhwCondition::Unbounded)
        } else {
            Ok(RvhwCondition::Bounded)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn example_family_lambda_declarations() {
        assert_eq!(Nonlinearity::example(1.0).unwrap().declared_lambda(), Some(LambdaClass::Finite(1.0)));
        assert_eq!(Nonlinearity::example(2.0).unwrap().declared_lambda(), Some(LambdaClass::Zero));
        assert_eq!(Nonlinearity::example(0.5).unwrap().declared_lambda(), Some(LambdaClass::Infinite));
        assert_eq!(Nonlinearity::example(0.0).unwrap_err(), Error::BadTheta(0.0));
        assert!(Nonlinearity::example(-1.0).is_err());
    }

    #[test]
    fn log_slope_matches_f_prime() {
        for theta in [0.5, 1.0, 3.0] {
            let n = Nonlinearity::example(theta).unwrap();
            for w in [-2.0, 0.0, 1.5, 6.0, 30.0] {
                let x = f64::exp(w);
                assert_relative_eq!(n.log_f_slope(w), x * n.f_prime(x) / n.f(x), max_relative = 1e-10);
            }
        }
        assert_eq!(Nonlinearity::sqrt().log_f_slope(3.0), 0.5);
    }

    #[test]
    fn builtins_satisfy_class_invariants() {
        Nonlinearity::sqrt().validate().unwrap();
        for theta in [0.5, 1.0, 2.0, 3.0, 5.0] {
            Nonlinearity::example(theta).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn example_family_matches_unshifted_formula() {
        let theta = 1.5;
        let n = Nonlinearity::example(theta).unwrap();
        let s = (theta + 1.0f64).exp() - 2.0;
        let g = |y: f64| (y + 1.0) / (2.0 + y).ln().powf(theta);
        for x in [0.0, 0.3, 7.0, 1e5] {
            assert_relative_eq!(n.f(x), g(x + s), max_relative = 1e-14);
            let h = 1e-6 * (1.0 + x);
            let fd = (g(x + s + h) - g(x + s - h)) / (2.0 * h);
            assert_relative_eq!(n.f_prime(x), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn sqrt_transform_closed_form() {
        let n = Nonlinearity::sqrt();
        assert_relative_eq!(n.eval_f_transform(4.0).unwrap(), 2.0, max_relative = 1e-12);
        assert_eq!(n.eval_f_transform(1.0).unwrap(), 0.0);
        assert_relative_eq!(n.eval_f_transform(0.25).unwrap(), -1.0, max_relative = 1e-12);
        assert_relative_eq!(n.inverse_log(2.0).unwrap(), 4f64.ln(), max_relative = 1e-12);
        assert_eq!(n.inverse_log(0.0).unwrap(), 0.0);
        assert_eq!(n.eval_f_transform(0.0), Err(Error::DomainError(0.0)));
        assert!(n.inverse_log(-2.5).is_err());
    }

    #[test]
    fn transform_sign_follows_log() {
        let n = Nonlinearity::example(1.0).unwrap();
        for w in [-30.0, -1.0, -1e-3, 1e-3, 0.7, 50.0] {
            assert_eq!(n.transform_log(w).signum(), f64::signum(w));
        }
    }

    #[test]
    fn example_transform_asymptotics() {
        for theta in [0.5, 1.0, 2.0, 3.0] {
            let n = Nonlinearity::example(theta).unwrap();
            let ratio = n.transform_log(50.0) * (1.0 + theta) / 50f64.powf(1.0 + theta);
            assert!((0.95..=1.05).contains(&ratio), "theta {theta}: {ratio}");
        }
        let n = Nonlinearity::example(1.0).unwrap();
        let w = n.inverse_log(5000.0).unwrap();
        assert!((w / (2.0f64 * 5000.0).sqrt() - 1.0).abs() < 0.01);
    }

    #[test]
    fn lambda_estimates() {
        let one = Nonlinearity::example(1.0).unwrap().estimate_lambda().unwrap();
        match one {
            LambdaClass::Finite(l) => assert!((l - 1.0).abs() <= 0.05, "{l}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(Nonlinearity::sqrt().estimate_lambda().unwrap(), LambdaClass::Zero);
        assert_eq!(Nonlinearity::example(2.0).unwrap().estimate_lambda().unwrap(), LambdaClass::Zero);
        assert_eq!(Nonlinearity::example(0.5).unwrap().estimate_lambda().unwrap(), LambdaClass::Infinite);
        let loglog = Nonlinearity::custom(
            "x / log(log(x + exp(e)))",
            "1/log(log(x + exp(e))) - x/((x + exp(e)) * log(x + exp(e)) * log(log(x + exp(e)))^2)",
            "w - log(log(log(exp(w) + exp(e))))",
            None,
            0.0,
            None,
        )
        .unwrap();
        assert_eq!(loglog.estimate_lambda().unwrap(), LambdaClass::Infinite);
    }

    #[test]
    fn lambda_mismatch_is_reported() {
        let n = Nonlinearity::custom("sqrt(x)", "0.5/sqrt(x)", "0.5*w", Some(LambdaClass::Infinite), 0.0, None)
            .unwrap();
        assert!(matches!(n.estimate_lambda(), Err(Error::LambdaMismatch { .. })));
    }

    #[test]
    fn rvhw_condition() {
        assert_eq!(Nonlinearity::sqrt().check_rvhw_condition().unwrap(), RvhwCondition::Bounded);
        for theta in [1.0, 3.0] {
            let n = Nonlinearity::example(theta).unwrap();
            assert_eq!(n.check_rvhw_condition().unwrap(), RvhwCondition::Unbounded);
        }
        let power = Nonlinearity::custom("x^0.5 + x^0.25", "0.5*x^(-0.5) + 0.25*x^(-0.75)",
            "0.5*w + log(1 + exp(-0.25*w))", None, 0.0, None).unwrap();
        assert_eq!(power.check_rvhw_condition().unwrap(), RvhwCondition::Bounded);
    }

    #[test]
    fn custom_validation_rejects_inconsistent_log_form() {
        let err = Nonlinearity::custom("sqrt(x)", "0.5/sqrt(x)", "0.6*w", None, 0.0, None).unwrap_err();
        assert!(matches!(err, Error::InvalidNonlinearity(_)));
        let err = Nonlinearity::custom("x", "1", "w", None, 0.0, None).unwrap_err();
        assert!(matches!(err, Error::InvalidNonlinearity(_)));
    }
}
