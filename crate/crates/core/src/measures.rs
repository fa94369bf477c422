//! Positive finite Borel measures used as memory kernels.
//!
//! Every kernel is stored in *lag* coordinates `ℓ ≥ 0`: an atom at location
//! `s ∈ [-τ, 0]` of a delay kernel has lag `ℓ = -s`, and a Volterra kernel on
//! `[0, ∞)` is already written in lags. Densities are functions of the lag.
//!
//! Interval conventions: [`MeasureKernel::window_mass`] counts atoms sitting
//! on either endpoint, [`MeasureKernel::tail_mass`] excludes an atom at `t`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{self, integrate, integrate_log1p, QuadResult, ABS_FLOOR, REL_TOL};

/// Default truncation horizon for densities without a closed-form tail.
pub const DEFAULT_S_MAX: f64 = 1e6;

/// Upper limit of the `ln(1 + s)` variable when integrating tails to infinity.
const LOG_HORIZON: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// `[-τ, 0]`, the memory of a functional differential equation.
    DelayInterval { tau: f64 },
    /// `[0, ∞)`, the memory of a Volterra equation.
    HalfLine,
}

/// Absolutely continuous part of a kernel, `μ(dℓ) = k(ℓ) dℓ`.
pub trait Density: Send + Sync + fmt::Debug {
    /// `k(ℓ) ≥ 0`.
    fn value(&self, lag: f64) -> f64;

    /// `∫_ℓ^∞ k`, when known in closed form.
    fn tail(&self, _lag: f64) -> Option<f64> {
        None
    }

    /// Index `α` with `k ∈ RV(-α)`, when declared.
    fn rv_index(&self) -> Option<f64> {
        None
    }

    fn describe(&self) -> String;
}

/// `k(ℓ) = scale · (1 + ℓ)^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub alpha: f64,
    pub scale: f64,
}

impl PowerLaw {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha.is_finite() && scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "powerlaw({alpha}, {scale}) needs finite alpha and positive scale"
            )));
        }
        Ok(PowerLaw { alpha, scale })
    }

    /// Scale making the half-line mass equal to `mass`.
    pub fn normalized(alpha: f64, mass: f64) -> Result<Self> {
        if alpha <= 1.0 {
            return Err(Error::InvalidKernel(format!(
                "powerlaw with alpha = {alpha} has infinite mass on [0, inf)"
            )));
        }
        PowerLaw::new(alpha, mass * (alpha - 1.0))
    }
}

impl Density for PowerLaw {
    fn value(&self, lag: f64) -> f64 {
        self.scale * (-self.alpha * lag.ln_1p()).exp()
    }

    fn tail(&self, lag: f64) -> Option<f64> {
        if self.alpha > 1.0 {
            Some(self.scale * ((1.0 - self.alpha) * lag.ln_1p()).exp() / (self.alpha - 1.0))
        } else {
            None
        }
    }

    fn rv_index(&self) -> Option<f64> {
        Some(self.alpha)
    }

    fn describe(&self) -> String {
        format!("powerlaw({}, {})", self.alpha, self.scale)
    }
}

type LagFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Density given by closures, for kernels outside the named families.
#[derive(Clone)]
pub struct FnDensity {
    pub label: String,
    value: LagFn,
    tail: Option<LagFn>,
    rv_index: Option<f64>,
}

impl FnDensity {
    pub fn new(label: impl Into<String>, value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FnDensity {
            label: label.into(),
            value: Arc::new(value),
            tail: None,
            rv_index: None,
        }
    }

    pub fn with_tail(mut self, tail: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.tail = Some(Arc::new(tail));
        self
    }

    pub fn with_rv_index(mut self, alpha: f64) -> Self {
        self.rv_index = Some(alpha);
        self
    }
}

impl fmt::Debug for FnDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnDensity")
            .field("label", &self.label)
            .field("has_tail", &self.tail.is_some())
            .field("rv_index", &self.rv_index)
            .finish()
    }
}

impl Density for FnDensity {
    fn value(&self, lag: f64) -> f64 {
        (self.value)(lag)
    }
    fn tail(&self, lag: f64) -> Option<f64> {
        self.tail.as_ref().map(|t| t(lag))
    }
    fn rv_index(&self) -> Option<f64> {
        self.rv_index
    }
    fn describe(&self) -> String {
        self.label.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub lag: f64,
    pub weight: f64,
}

/// First absolute moment `C`, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Moment::Infinite)
    }

    pub fn value(&self) -> f64 {
        match self {
            Moment::Finite(c) => *c,
            Moment::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite(c) => write!(f, "{c}"),
            Moment::Infinite => write!(f, "inf"),
        }
    }
}

/// Where and how a density without closed-form tail was truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub s_max: f64,
    pub tolerance: f64,
}

#[derive(Clone)]
pub struct MeasureKernel {
    support: Support,
    atoms: Vec<Atom>,
    density: Option<Arc<dyn Density>>,
    s_max: f64,
    mass: f64,
}

impl fmt::Debug for MeasureKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureKernel")
            .field("support", &self.support)
            .field("atoms", &self.atoms)
            .field("density", &self.density)
            .field("mass", &self.mass)
            .finish()
    }
}

impl MeasureKernel {
    /// Builds and validates a kernel. Atom positions are *locations*:
    /// in `[-τ, 0]` for delay kernels and in `[0, ∞)` for half-line kernels.
    pub fn new(
        support: Support,
        atoms: &[(f64, f64)],
        density: Option<Arc<dyn Density>>,
    ) -> Result<Self> {
        Self::with_truncation(support, atoms, density, DEFAULT_S_MAX)
    }

    pub fn with_truncation(
        support: Support,
        atoms: &[(f64, f64)],
        density: Option<Arc<dyn Density>>,
        s_max: f64,
    ) -> Result<Self> {
        if let Support::DelayInterval { tau } = support {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(Error::InvalidKernel(format!("tau must be positive, got {tau}")));
            }
        }
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::InvalidKernel(format!("S_max must be positive, got {s_max}")));
        }
        let mut parsed = Vec::with_capacity(atoms.len());
        for &(location, weight) in atoms {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidKernel(format!("atom weight {weight} must be positive")));
            }
            let lag = match support {
                Support::DelayInterval { tau } => {
                    if !(-tau..=0.0).contains(&location) {
                        return Err(Error::InvalidKernel(format!(
                            "atom at {location} outside [-{tau}, 0]"
                        )));
                    }
                    -location
                }
                Support::HalfLine => {
                    if !(location.is_finite() && location >= 0.0) {
                        return Err(Error::InvalidKernel(format!(
                            "atom at {location} outside [0, inf)"
                        )));
                    }
                    location
                }
            };
            parsed.push(Atom { lag: lag.abs(), weight });
        }
        parsed.sort_by(|a, b| a.lag.total_cmp(&b.lag));

        let mut kernel = MeasureKernel {
            support,
            atoms: parsed,
            density,
            s_max,
            mass: 0.0,
        };
        kernel.check_density_sign()?;
        let mass = kernel.compute_mass()?;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NonPositiveMass(mass));
        }
        kernel.mass = mass;
        Ok(kernel)
    }

    /// Single atom of weight `mass` at lag zero on `[-1, 0]`.
    pub fn delay_dirac(mass: f64) -> Result<Self> {
        Self::new(Support::DelayInterval { tau: 1.0 }, &[(0.0, mass)], None)
    }

    /// Single atom of weight `mass` at lag zero on `[0, ∞)`.
    pub fn volterra_dirac(mass: f64) -> Result<Self> {
        Self::new(Support::HalfLine, &[(0.0, mass)], None)
    }

    /// Half-line kernel with a power-law density.
    pub fn powerlaw(alpha: f64, scale: f64) -> Result<Self> {
        Self::new(Support::HalfLine, &[], Some(Arc::new(PowerLaw::new(alpha, scale)?)))
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&dyn Density> {
        self.density.as_deref()
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn is_half_line(&self) -> bool {
        matches!(self.support, Support::HalfLine)
    }

    /// Largest lag in the support (`τ` or `∞`).
    pub fn max_lag(&self) -> f64 {
        match self.support {
            Support::DelayInterval { tau } => tau,
            Support::HalfLine => f64::INFINITY,
        }
    }

    /// Present when a half-line density lacks a closed-form tail.
    pub fn truncation(&self) -> Option<TruncationReport> {
        match (&self.support, &self.density) {
            (Support::HalfLine, Some(d)) if d.tail(0.0).is_none() => Some(TruncationReport {
                s_max: self.s_max,
                tolerance: 1e-8,
            }),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        let support = match self.support {
            Support::DelayInterval { tau } => format!("[-{tau},0]"),
            Support::HalfLine => "[0,inf)".to_string(),
        };
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|a| {
                let loc = match self.support {
                    Support::DelayInterval { .. } => -a.lag,
                    Support::HalfLine => a.lag,
                };
                format!("({loc}, {})", a.weight)
            })
            .collect();
        let mut out = format!("support={support}");
        if !atoms.is_empty() {
            out.push_str(&format!(" atoms={}", atoms.join(" ")));
        }
        if let Some(d) = &self.density {
            out.push_str(&format!(" density={}", d.describe()));
        }
        out
    }

    fn check_density_sign(&self) -> Result<()> {
        let Some(d) = &self.density else { return Ok(()) };
        let upper = match self.support {
            Support::DelayInterval { tau } => tau,
            Support::HalfLine => self.s_max,
        };
        for i in 0..=256 {
            // log-spaced samples plus the origin
            let lag = if i == 0 { 0.0 } else { upper * (1e-6f64).powf(1.0 - i as f64 / 256.0) };
            let k = d.value(lag);
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::InvalidKernel(format!("density is {k} at lag {lag}")));
            }
        }
        Ok(())
    }

    fn compute_mass(&self) -> Result<f64> {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight).sum();
        Ok(atoms + self.density_window(0.0, self.max_lag())?)
    }

    /// Density mass on `[a, b]` (lags), clipped to the support.
    fn density_window(&self, a: f64, b: f64) -> Result<f64> {
        let Some(d) = &self.density else { return Ok(0.0) };
        let b = b.min(self.max_lag());
        if a >= b {
            return Ok(0.0);
        }
        match self.support {
            Support::DelayInterval { .. } => Ok(quad(|s| d.value(s), a, b)?.value),
            Support::HalfLine => {
                if let (Some(ta), Some(tb)) = (d.tail(a), d.tail(b.min(f64::MAX))) {
                    let tb = if b.is_infinite() { 0.0 } else { tb };
                    return Ok((ta - tb).max(0.0));
                }
                let b = b.min(self.s_max);
                if a >= b {
                    return Ok(0.0);
                }
                let r = integrate_log1p(|u| d.value(a + u), b - a, REL_TOL);
                Ok(r.value)
            }
        }
    }

    /// Density mass strictly beyond lag `t` on the half line.
    fn density_tail(&self, d: &dyn Density, t: f64) -> f64 {
        match d.tail(t) {
            Some(v) => v,
            None => {
                if t >= self.s_max {
                    0.0
                } else {
                    integrate_log1p(|u| d.value(t + u), self.s_max - t, 1e-10).value
                }
            }
        }
    }

    /// Total mass `M`.
    pub fn total_mass(&self) -> f64 {
        self.mass
    }

    /// First absolute moment `C = ∫ |s| μ(ds)`.
    pub fn first_moment(&self) -> Result<Moment> {
        let atoms: f64 = self.atoms.iter().map(|a| a.lag * a.weight).sum();
        let Some(d) = &self.density else { return Ok(Moment::Finite(atoms)) };
        match self.support {
            Support::DelayInterval { tau } => {
                Ok(Moment::Finite(atoms + quad(|s| s * d.value(s), 0.0, tau)?.value))
            }
            Support::HalfLine => {
                if let Some(alpha) = d.rv_index() {
                    if alpha <= 2.0 {
                        return Ok(Moment::Infinite);
                    }
                }
                if d.tail(0.0).is_some() {
                    // C = ∫_0^∞ tail(s) ds, integrated in v = ln(1+s)
                    let r = integrate(
                        |v: f64| {
                            let ev = v.exp();
                            d.tail(ev - 1.0).unwrap_or(0.0) * ev
                        },
                        0.0,
                        LOG_HORIZON,
                        REL_TOL,
                        ABS_FLOOR,
                        4000,
                    );
                    let edge = d.tail(LOG_HORIZON.exp() - 1.0).unwrap_or(0.0) * LOG_HORIZON.exp();
                    if r.converged && r.value.is_finite() && edge <= 1e-10 * r.value.max(1e-300) {
                        return Ok(Moment::Finite(atoms + r.value));
                    }
                    if d.rv_index().is_none() {
                        return Err(Error::MomentUndecidable(
                            "declared tail does not decay fast enough to certify a finite moment"
                                .into(),
                        ));
                    }
                    return Ok(Moment::Infinite);
                }
                let full = integrate_log1p(|s| s * d.value(s), self.s_max, REL_TOL);
                let tenth = integrate_log1p(|s| s * d.value(s), 0.1 * self.s_max, REL_TOL);
                if full.converged
                    && (full.value - tenth.value).abs() <= 1e-8 * full.value.abs().max(1e-300)
                {
                    Ok(Moment::Finite(atoms + full.value))
                } else {
                    Err(Error::MomentUndecidable(format!(
                        "moment quadrature has not settled by S_max = {}",
                        self.s_max
                    )))
                }
            }
        }
    }

    /// `ε₁(t) = μ((t, ∞))`.
    pub fn tail_mass(&self, t: f64) -> Result<f64> {
        if !self.is_half_line() {
            return Err(Error::WrongSupport);
        }
        let t = t.max(0.0);
        let atoms: f64 = self.atoms.iter().filter(|a| a.lag > t).map(|a| a.weight).sum();
        let dens = match &self.density {
            Some(d) => self.density_tail(d.as_ref(), t),
            None => 0.0,
        };
        Ok(atoms + dens)
    }

    /// `μ([a, b])` in lag coordinates; `b` may be `+∞`.
    pub fn window_mass(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(Error::BadWindow { a, b });
        }
        let a = a.max(0.0);
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|at| at.lag >= a && at.lag <= b)
            .map(|at| at.weight)
            .sum();
        Ok(atoms + self.density_window(a, b)?)
    }

    /// `∫_{[0,t]} u μ(du)`, computed directly from atoms and `u·k(u)`.
    pub fn partial_moment(&self, t: f64) -> Result<f64> {
        let t = t.max(0.0).min(self.max_lag());
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.lag <= t)
            .map(|a| a.lag * a.weight)
            .sum();
        let dens = match &self.density {
            None => 0.0,
            Some(d) => match self.support {
                Support::DelayInterval { .. } => quad(|s| s * d.value(s), 0.0, t)?.value,
                Support::HalfLine => {
                    let upper = if d.tail(0.0).is_some() { t } else { t.min(self.s_max) };
                    integrate_log1p(|s| s * d.value(s), upper, 1e-12).value
                }
            },
        };
        Ok(atoms + dens)
    }

    /// `T(t) = ∫_0^t ε₁(s) ds`.
    ///
    /// The atomic part of `ε₁` is a step function whose integral is
    /// `Σ w·min(ℓ, t)`; the density part is integrated adaptively.
    pub fn integrated_tail(&self, t: f64) -> Result<f64> {
        if !self.is_half_line() {
            return Err(Error::WrongSupport);
        }
        if t <= 0.0 {
            return Ok(0.0);
        }
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * a.lag.min(t)).sum();
        let dens = match &self.density {
            None => 0.0,
            Some(d) => {
                if t.is_infinite() {
                    return match self.first_moment()? {
                        Moment::Finite(c) => Ok(c),
                        Moment::Infinite => Ok(f64::INFINITY),
                    };
                }
                let rel = if d.tail(0.0).is_some() { 1e-12 } else { 1e-9 };
                integrate_log1p(|s| self.density_tail(d.as_ref(), s), t, rel).value
            }
        };
        Ok(atoms + dens)
    }
}

fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<QuadResult> {
    let r = quadrature::integrate_default(f, a, b);
    if !r.value.is_finite() {
        return Err(Error::InvalidKernel(format!("density integral on [{a}, {b}] diverges")));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cubic() -> MeasureKernel {
        MeasureKernel::powerlaw(3.0, 2.0).unwrap()
    }

    #[test]
    fn masses() {
        let single = MeasureKernel::new(Support::DelayInterval { tau: 1.0 }, &[(-1.0, 1.0)], None)
            .unwrap();
        assert_eq!(single.total_mass(), 1.0);
        assert_relative_eq!(cubic().total_mass(), 1.0, max_relative = 1e-10);
        let pair = MeasureKernel::new(
            Support::DelayInterval { tau: 0.5 },
            &[(-0.5, 0.3), (0.0, 0.7)],
            None,
        )
        .unwrap();
        assert_relative_eq!(pair.total_mass(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn moments() {
        let single = MeasureKernel::new(Support::DelayInterval { tau: 1.0 }, &[(-1.0, 1.0)], None)
            .unwrap();
        assert_eq!(single.first_moment().unwrap(), Moment::Finite(1.0));
        match cubic().first_moment().unwrap() {
            Moment::Finite(c) => assert_relative_eq!(c, 1.0, max_relative = 1e-10),
            Moment::Infinite => panic!("finite moment expected"),
        }
        let heavy = MeasureKernel::powerlaw(1.5, 1.0).unwrap();
        assert_eq!(heavy.first_moment().unwrap(), Moment::Infinite);
    }

    #[test]
    fn moment_without_tail_info_is_undecidable_for_heavy_density() {
        let d = FnDensity::new("heavy", |s: f64| 0.5 * (1.0 + s).powf(-1.5));
        let k = MeasureKernel::new(Support::HalfLine, &[], Some(Arc::new(d))).unwrap();
        assert!(matches!(k.first_moment(), Err(Error::MomentUndecidable(_))));
        // declaring the index resolves it
        let d = FnDensity::new("heavy", |s: f64| 0.5 * (1.0 + s).powf(-1.5)).with_rv_index(1.5);
        let k = MeasureKernel::new(Support::HalfLine, &[], Some(Arc::new(d))).unwrap();
        assert_eq!(k.first_moment().unwrap(), Moment::Infinite);
    }

    #[test]
    fn numeric_moment_for_light_density() {
        let d = FnDensity::new("exp", |s: f64| (-s).exp());
        let k = MeasureKernel::new(Support::HalfLine, &[], Some(Arc::new(d))).unwrap();
        assert_relative_eq!(k.total_mass(), 1.0, max_relative = 1e-9);
        match k.first_moment().unwrap() {
            Moment::Finite(c) => assert_relative_eq!(c, 1.0, max_relative = 1e-8),
            Moment::Infinite => panic!(),
        }
        assert!(k.truncation().is_some());
    }

    #[test]
    fn tails_and_windows() {
        let k = cubic();
        assert_relative_eq!(k.tail_mass(0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(k.tail_mass(1.0).unwrap(), 0.25, max_relative = 1e-14);
        assert_relative_eq!(k.window_mass(0.0, 1.0).unwrap(), 0.75, max_relative = 1e-14);
        assert_eq!(k.window_mass(5.0, 5.0).unwrap(), 0.0);
        assert_relative_eq!(k.window_mass(0.0, f64::INFINITY).unwrap(), 1.0, max_relative = 1e-14);

        let atom = MeasureKernel::new(Support::HalfLine, &[(3.0, 0.5)], None).unwrap();
        assert_eq!(atom.tail_mass(4.0).unwrap(), 0.0);
        assert_eq!(atom.window_mass(2.0, 4.0).unwrap(), 0.5);
        // closed window keeps endpoint atoms, open tail drops them
        assert_eq!(atom.window_mass(3.0, 3.0).unwrap(), 0.5);
        assert_eq!(atom.tail_mass(3.0).unwrap(), 0.0);
    }

    #[test]
    fn window_errors() {
        let k = cubic();
        assert_eq!(k.window_mass(2.0, 1.0), Err(Error::BadWindow { a: 2.0, b: 1.0 }));
        let delay = MeasureKernel::delay_dirac(1.0).unwrap();
        assert_eq!(delay.tail_mass(0.5), Err(Error::WrongSupport));
        assert_eq!(delay.integrated_tail(0.5), Err(Error::WrongSupport));
    }

    #[test]
    fn integrated_tail_examples() {
        let k = cubic();
        assert_relative_eq!(k.integrated_tail(f64::INFINITY).unwrap(), 1.0, max_relative = 1e-10);
        // T(t) = 1 - 1/(1+t) for the cubic kernel
        assert_relative_eq!(k.integrated_tail(1e6).unwrap(), 1.0 - 1.0 / (1.0 + 1e6), max_relative = 1e-10);
        let atom = MeasureKernel::new(Support::HalfLine, &[(2.0, 1.0)], None).unwrap();
        assert_eq!(atom.integrated_tail(1.0).unwrap(), 1.0);
        assert_eq!(k.integrated_tail(0.0).unwrap(), 0.0);
    }

    #[test]
    fn invalid_kernels_are_rejected() {
        let tau = Support::DelayInterval { tau: 1.0 };
        assert!(MeasureKernel::new(tau, &[(-2.0, 1.0)], None).is_err());
        assert!(MeasureKernel::new(tau, &[(-0.5, 0.0)], None).is_err());
        assert!(matches!(MeasureKernel::new(tau, &[], None), Err(Error::NonPositiveMass(_))));
        let neg = FnDensity::new("neg", |s: f64| s - 0.5);
        assert!(MeasureKernel::new(tau, &[], Some(Arc::new(neg))).is_err());
    }

    #[test]
    fn delay_density_moments() {
        // uniform density 1 on [-2, 0]: M = 2, C = 2
        let d = FnDensity::new("uniform", |_| 1.0);
        let k = MeasureKernel::new(Support::DelayInterval { tau: 2.0 }, &[], Some(Arc::new(d)))
            .unwrap();
        assert_relative_eq!(k.total_mass(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(k.first_moment().unwrap().value(), 2.0, max_relative = 1e-12);
    }
}
