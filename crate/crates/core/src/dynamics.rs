//! Integrators for the delay equation, the Volterra equation and the
//! reference ODE, all advanced in the log-state `u = log x`.
//!
//! The FDE and VDE use classical RK4 with cubic Hermite dense output built
//! from the stored `u` and `u'` at grid nodes. Stage values that fall inside
//! the current step (lags shorter than `h`) come from a quadratic through
//! `u_n`, `u'_n` and the stage estimate itself. The Volterra memory term is a
//! trapezoidal convolution over the stored grid with cached kernel weights;
//! the memory sum is kept relative to a running exponent so that nothing
//! overflows however large `x` becomes.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::{Density, MeasureKernel, Support, TruncationReport};
use crate::nonlinearity::Nonlinearity;
use crate::quadrature::simpson_rule;

/// Log-state beyond which integration stops with [`Error::OverflowGuard`].
pub const U_GUARD: f64 = 1e6;

/// Memory-sum entries are rescaled once the running exponent drifts this far.
const RESCALE_GAP: f64 = 50.0;

/// Initial function on `[-τ, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum HistoryFunction {
    Constant(f64),
    /// Values on an increasing grid covering `[-τ, 0]`, interpolated by a
    /// cubic in `log ψ` with Catmull-Rom slopes.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl Default for HistoryFunction {
    fn default() -> Self {
        HistoryFunction::Constant(1.0)
    }
}

impl HistoryFunction {
    fn validate(&self, tau: f64) -> Result<()> {
        match self {
            HistoryFunction::Constant(v) => {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(Error::NonPositiveHistory);
                }
            }
            HistoryFunction::Sampled { grid, values } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return Err(Error::BadParameter(
                        "sampled history needs matching grid and values (at least two)".into(),
                    ));
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::NonPositiveHistory);
                }
                if grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::BadParameter("history grid must increase".into()));
                }
                let tol = 1e-12 * tau.max(1.0);
                if grid[0] > -tau + tol || grid[grid.len() - 1].abs() > tol {
                    return Err(Error::BadParameter(format!(
                        "history grid must span [-{tau}, 0]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `log ψ(σ)`; sampled histories clamp outside their grid.
    pub fn log_value(&self, sigma: f64) -> f64 {
        match self {
            HistoryFunction::Constant(v) => v.ln(),
            HistoryFunction::Sampled { grid, values } => {
                let n = grid.len();
                if sigma <= grid[0] {
                    return values[0].ln();
                }
                if sigma >= grid[n - 1] {
                    return values[n - 1].ln();
                }
                let j = grid.partition_point(|&g| g <= sigma) - 1;
                let lv = |i: usize| values[i].ln();
                let slope = |i: usize| {
                    let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                    (lv(b) - lv(a)) / (grid[b] - grid[a])
                };
                let dx = grid[j + 1] - grid[j];
                hermite((sigma - grid[j]) / dx, dx, lv(j), slope(j), lv(j + 1), slope(j + 1))
            }
        }
    }
}

fn hermite(s: f64, dx: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * dx * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * dx * d1
}

/// One of the three equations.
#[derive(Debug, Clone)]
pub enum Problem {
    /// `y' = M f(y)`, `y(0) = y0`.
    Ode { mass: f64, y0: f64 },
    /// Delay equation with memory on `[-τ, 0]`.
    Fde { kernel: MeasureKernel, history: HistoryFunction },
    /// Volterra equation with memory on `[0, t]`.
    Vde { kernel: MeasureKernel, x0: f64 },
}

impl Problem {
    pub fn mass(&self) -> f64 {
        match self {
            Problem::Ode { mass, .. } => *mass,
            Problem::Fde { kernel, .. } | Problem::Vde { kernel, .. } => kernel.total_mass(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Ode { .. } => "ode",
            Problem::Fde { .. } => "fde",
            Problem::Vde { .. } => "vde",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub t_end: f64,
    pub h: f64,
    /// Keep every `thin`-th grid point (the final point is always kept).
    pub thin: usize,
    /// Composite Simpson panels for delay densities.
    pub simpson_panels: usize,
    pub exec: Execution,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            t_end: 100.0,
            h: 1.0 / 32.0,
            thin: 1,
            simpson_panels: 64,
            exec: Execution::default(),
        }
    }
}

impl IntegrationOptions {
    fn steps(&self) -> Result<usize> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::BadParameter(format!("step h = {} must be positive", self.h)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::BadParameter(format!("t_end = {} must be positive", self.t_end)));
        }
        if self.thin == 0 {
            return Err(Error::BadParameter("thin must be at least 1".into()));
        }
        let n = (self.t_end / self.h - 1e-9).ceil();
        if n > 5e7 {
            return Err(Error::BadParameter(format!("{n} steps is beyond the supported size")));
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Exact transform solution, no stepping.
    Transform,
    /// RK4 with Hermite history over a bounded delay.
    Rk4Delay,
    /// RK4 with trapezoidal convolution memory.
    Rk4Volterra,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Transform => "transform",
            Scheme::Rk4Delay => "rk4-hermite",
            Scheme::Rk4Volterra => "rk4-trapezoid-memory",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub step: f64,
    pub thin: usize,
    pub scheme: Scheme,
    pub simpson_panels: usize,
    pub truncation: Option<TruncationReport>,
    /// Kernel mass beyond the truncation horizon that the memory sum ignored.
    pub truncated_mass: f64,
    /// Time after which the trajectory is free of start-up effects.
    pub transient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mass: f64,
    pub times: Vec<f64>,
    pub log_state: Vec<f64>,
    /// `log F⁻¹(M t)`.
    pub log_ref: Vec<f64>,
    /// `x(t) / F⁻¹(M t)`.
    pub ratio: Vec<f64>,
    /// `(F(x) - M t) / log f(x)`.
    pub lag_diagnostic: Vec<f64>,
    /// `-(F(x) - M t) / log F⁻¹(M t)`.
    pub correction: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    fn assemble(
        n: &Nonlinearity,
        mass: f64,
        h: f64,
        u: &[f64],
        meta: TrajectoryMeta,
    ) -> Result<Trajectory> {
        let last = u.len() - 1;
        let mut idx: Vec<usize> = (0..=last).step_by(meta.thin).collect();
        if *idx.last().unwrap() != last {
            idx.push(last);
        }
        let cap = idx.len();
        let mut tr = Trajectory {
            mass,
            times: Vec::with_capacity(cap),
            log_state: Vec::with_capacity(cap),
            log_ref: Vec::with_capacity(cap),
            ratio: Vec::with_capacity(cap),
            lag_diagnostic: Vec::with_capacity(cap),
            correction: Vec::with_capacity(cap),
            meta,
        };
        for i in idx {
            let t = i as f64 * h;
            let ui = u[i];
            let lr = n.inverse_log(mass * t)?;
            let gap = n.transform_log(ui) - mass * t;
            tr.times.push(t);
            tr.log_state.push(ui);
            tr.log_ref.push(lr);
            tr.ratio.push((ui - lr).exp());
            tr.lag_diagnostic.push(ratio_or_nan(gap, n.log_f(ui)));
            tr.correction.push(ratio_or_nan(-gap, lr));
        }
        Ok(tr)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_ratio(&self) -> f64 {
        *self.ratio.last().unwrap_or(&f64::NAN)
    }

    /// CSV with header `t,u,log_ref,r,d,c` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,u,log_ref,r,d,c")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[i],
                self.log_state[i],
                self.log_ref[i],
                self.ratio[i],
                self.lag_diagnostic[i],
                self.correction[i]
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

fn ratio_or_nan(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::NAN
    } else {
        num / den
    }
}

/// Integrates `problem` on `[0, t_end]`.
pub fn integrate(n: &Nonlinearity, problem: &Problem, opts: &IntegrationOptions) -> Result<Trajectory> {
    match problem {
        Problem::Ode { mass, y0 } => integrate_ode(n, *mass, *y0, opts),
        Problem::Fde { kernel, history } => integrate_fde(n, kernel, history, opts),
        Problem::Vde { kernel, x0 } => integrate_vde(n, kernel, *x0, opts),
    }
}

/// `y(t) = F⁻¹(F(y0) + M t)`, evaluated on the output grid.
pub fn integrate_ode(n: &Nonlinearity, mass: f64, y0: f64, opts: &IntegrationOptions) -> Result<Trajectory> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    if !(y0.is_finite() && y0 > 0.0) {
        return Err(Error::DomainError(y0));
    }
    let steps = opts.steps()?;
    let f0 = n.transform_log(y0.ln());
    let mut u = vec![f64::NAN; steps + 1];
    // only output nodes are needed; the rest stay NaN and are never read
    let mut fill = |i: usize| -> Result<()> {
        u[i] = if i == 0 { y0.ln() } else { n.inverse_log(f0 + mass * i as f64 * opts.h)? };
        Ok(())
    };
    for i in (0..=steps).step_by(opts.thin) {
        fill(i)?;
    }
    fill(steps)?;
    let meta = TrajectoryMeta {
        step: opts.h,
        thin: opts.thin,
        scheme: Scheme::Transform,
        simpson_panels: 0,
        truncation: None,
        truncated_mass: 0.0,
        transient: 0.0,
    };
    Trajectory::assemble(n, mass, opts.h, &u, meta)
}

/// Dense reader of the solved log-state.
struct Dense<'a> {
    h: f64,
    u: &'a [f64],
    du: &'a [f64],
    /// Index of the last solved node.
    n: usize,
    /// Time and value of the current RK stage.
    stage: Option<(f64, f64)>,
    history: Option<&'a HistoryFunction>,
}

impl Dense<'_> {
    fn at(&self, sigma: f64) -> f64 {
        if sigma < 0.0 {
            return match self.history {
                Some(hist) => hist.log_value(sigma),
                None => self.u[0],
            };
        }
        let h = self.h;
        let tn = self.n as f64 * h;
        if sigma <= tn {
            if self.n == 0 {
                return self.u[0];
            }
            let j = ((sigma / h).floor() as usize).min(self.n - 1);
            let s = (sigma - j as f64 * h) / h;
            return hermite(s, h, self.u[j], self.du[j], self.u[j + 1], self.du[j + 1]);
        }
        match self.stage {
            Some((ts, y)) => {
                if sigma >= ts {
                    return y;
                }
                let (un, dn) = (self.u[self.n], self.du[self.n]);
                let span = ts - tn;
                let q = (y - un - dn * span) / (span * span);
                let d = sigma - tn;
                un + dn * d + q * d * d
            }
            None => self.u[self.n],
        }
    }
}

/// Quadrature nodes `(lag, weight)` for a delay kernel.
fn delay_nodes(kernel: &MeasureKernel, tau: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut nodes: Vec<(f64, f64)> = kernel.atoms().iter().map(|a| (a.lag, a.weight)).collect();
    if let Some(d) = kernel.density() {
        for (lag, w) in simpson_rule(0.0, tau, panels) {
            let k = d.value(lag);
            if k != 0.0 {
                nodes.push((lag, w * k));
            }
        }
    }
    nodes
}

fn check_state(t: f64, u: f64) -> Result<()> {
    if !u.is_finite() || u > U_GUARD {
        return Err(Error::OverflowGuard { t, u });
    }
    Ok(())
}

/// RK4 method of steps for `x'(t) = ∫_{[-τ,0]} μ(ds) f(x(t+s))`.
pub fn integrate_fde(
    n: &Nonlinearity,
    kernel: &MeasureKernel,
    history: &HistoryFunction,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    let Support::DelayInterval { tau } = kernel.support() else {
        return Err(Error::InvalidKernel("the delay equation needs a kernel on [-tau, 0]".into()));
    };
    let steps = opts.steps()?;
    if opts.h > tau / 16.0 {
        return Err(Error::StepTooLarge { h: opts.h, limit: tau / 16.0 });
    }
    if opts.simpson_panels == 0 {
        return Err(Error::BadParameter("simpson_panels must be positive".into()));
    }
    history.validate(tau)?;
    let nodes = delay_nodes(kernel, tau, opts.simpson_panels);
    let h = opts.h;

    let mut u = Vec::with_capacity(steps + 1);
    let mut du = Vec::with_capacity(steps + 1);
    u.push(history.log_value(0.0));

    let rhs = |u: &[f64], du: &[f64], m: usize, t: f64, stage: Option<(f64, f64)>| -> f64 {
        let dense = Dense { h, u, du, n: m, stage, history: Some(history) };
        let y = stage.map_or(u[m], |s| s.1);
        nodes
            .iter()
            .map(|&(lag, w)| {
                let v = if lag == 0.0 { y } else { dense.at(t - lag) };
                w * (n.log_f(v) - y).exp()
            })
            .sum()
    };

    du.push(rhs(&u, &[0.0], 0, 0.0, None));
    for m in 0..steps {
        let tn = m as f64 * h;
        let un = u[m];
        let k1 = du[m];
        let th = tn + 0.5 * h;
        let y2 = un + 0.5 * h * k1;
        let k2 = rhs(&u, &du, m, th, Some((th, y2)));
        let y3 = un + 0.5 * h * k2;
        let k3 = rhs(&u, &du, m, th, Some((th, y3)));
        let t1 = tn + h;
        let y4 = un + h * k3;
        let k4 = rhs(&u, &du, m, t1, Some((t1, y4)));
        let next = un + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_state(t1, next)?;
        u.push(next);
        // provisional slope so that lags inside the last step can be read
        du.push(k4);
        let d = rhs(&u, &du, m + 1, t1, None);
        du[m + 1] = d;
    }
    let meta = TrajectoryMeta {
        step: h,
        thin: opts.thin,
        scheme: Scheme::Rk4Delay,
        simpson_panels: if kernel.density().is_some() { opts.simpson_panels } else { 0 },
        truncation: None,
        truncated_mass: 0.0,
        transient: tau,
    };
    Trajectory::assemble(n, kernel.total_mass(), h, &u, meta)
}

/// Which point of the step an RK stage sits at.
#[derive(Clone, Copy)]
enum StagePoint {
    Start,
    Mid,
    End,
}

struct VolterraMemory<'a> {
    h: f64,
    /// `k(m h)`.
    k0: Vec<f64>,
    /// `k((m + 1/2) h)`.
    kh: Vec<f64>,
    /// `k'` at `0`, `h/2` and `h`, for the end corrections.
    kp: [f64; 3],
    density: Option<&'a dyn Density>,
    atoms: Vec<(f64, f64)>,
    /// Truncation horizon for densities without closed-form tail.
    s_max: f64,
    exec: Execution,
    n: &'a Nonlinearity,
}

impl VolterraMemory<'_> {
    /// `d/ds [k(s) G(t - s)]` given `k`, `k'` and the state at `t - s`.
    fn panel_slope(&self, k: f64, kp: f64, g: f64, u: f64, du: f64) -> f64 {
        g * (kp - k * self.n.log_f_slope(u) * du)
    }

    /// `u'` at stage `point` of step `m`, with `g[j] = exp(lf(u_j) - r)`.
    /// `y` is the stage value and `slope` an estimate of `u'` there.
    /// The memory integral is the trapezoid rule with Euler-Maclaurin end
    /// corrections on each uniform segment.
    #[allow(clippy::too_many_arguments)]
    fn rhs(
        &self,
        u: &[f64],
        du: &[f64],
        g: &[f64],
        r: f64,
        m: usize,
        point: StagePoint,
        y: f64,
        slope: f64,
    ) -> f64 {
        let h = self.h;
        let (c, kc, kpc): (f64, &[f64], f64) = match point {
            StagePoint::Start => (0.0, &self.k0, self.kp[0]),
            StagePoint::Mid => (0.5, &self.kh, self.kp[1]),
            StagePoint::End => (1.0, &self.k0[1.min(self.k0.len())..], self.kp[2]),
        };
        let t = (m as f64 + c) * h;
        let stage = if c > 0.0 { Some((t, y)) } else { None };
        let dense = Dense { h, u, du, n: m, stage, history: None };

        let mut total = 0.0;
        for &(lag, w) in &self.atoms {
            if lag > t {
                break;
            }
            let v = if lag == 0.0 { y } else { dense.at(t - lag) };
            total += w * (self.n.log_f(v) - r).exp();
        }
        if let Some(density) = self.density {
            let jlo = if t > self.s_max { ((t - self.s_max) / h).ceil() as usize } else { 0 };
            let jlo = jlo.min(m);
            let mut conv = 0.0;
            if m > jlo {
                let len = m - jlo;
                conv += 0.5 * kc[len] * g[jlo] + 0.5 * kc[0] * g[m];
                conv += self.exec.reversed_dot(&kc[1..len], &g[jlo + 1..m]);
                conv *= h;
                let s_far = t - jlo as f64 * h;
                let near = self.panel_slope(kc[0], kpc, g[m], u[m], du[m]);
                let far = self.panel_slope(kc[len], density_slope(density, s_far), g[jlo], u[jlo], du[jlo]);
                conv -= h * h / 12.0 * (far - near);
            }
            if c > 0.0 {
                let gy = (self.n.log_f(y) - r).exp();
                let w = c * h;
                conv += 0.5 * w * (kc[0] * g[m] + self.k0[0] * gy);
                let near = self.panel_slope(self.k0[0], self.kp[0], gy, y, slope);
                let far = self.panel_slope(kc[0], kpc, g[m], u[m], du[m]);
                conv -= w * w / 12.0 * (far - near);
            }
            total += conv;
        }
        total * (r - y).exp()
    }
}

/// `k'(s)` by a second-order one-sided difference (kernels live on `s >= 0`).
fn density_slope(d: &dyn Density, s: f64) -> f64 {
    let e = 1e-5 * s.max(1.0);
    (-3.0 * d.value(s) + 4.0 * d.value(s + e) - d.value(s + 2.0 * e)) / (2.0 * e)
}

/// RK4 for `x'(t) = ∫_{[0,t]} μ(ds) f(x(t-s))`.
pub fn integrate_vde(
    n: &Nonlinearity,
    kernel: &MeasureKernel,
    x0: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    if !kernel.is_half_line() {
        return Err(Error::InvalidKernel("the Volterra equation needs a kernel on [0, inf)".into()));
    }
    if !(x0.is_finite() && x0 > 0.0) {
        return Err(Error::NonPositiveHistory);
    }
    let steps = opts.steps()?;
    let h = opts.h;
    let truncation = kernel.truncation();
    let s_max = truncation.map_or(f64::INFINITY, |t| t.s_max);
    let (k0, kh) = match kernel.density() {
        Some(d) => (
            (0..steps + 2).map(|i| d.value(i as f64 * h)).collect(),
            (0..steps + 1).map(|i| d.value((i as f64 + 0.5) * h)).collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    let memory = VolterraMemory {
        h,
        k0,
        kh,
        kp: match kernel.density() {
            Some(d) => [density_slope(d, 0.0), density_slope(d, 0.5 * h), density_slope(d, h)],
            None => [0.0; 3],
        },
        density: kernel.density(),
        atoms: kernel.atoms().iter().map(|a| (a.lag, a.weight)).collect(),
        s_max,
        exec: opts.exec,
        n,
    };
    let u0 = x0.ln();
    let mut r = n.log_f(u0);
    let mut u = Vec::with_capacity(steps + 1);
    let mut du = Vec::with_capacity(steps + 1);
    let mut g = Vec::with_capacity(steps + 1);
    u.push(u0);
    g.push(1.0);
    du.push(memory.rhs(&u, &[0.0], &g, r, 0, StagePoint::Start, u0, 0.0));
    for m in 0..steps {
        let un = u[m];
        let k1 = du[m];
        let y2 = un + 0.5 * h * k1;
        let k2 = memory.rhs(&u, &du, &g, r, m, StagePoint::Mid, y2, k1);
        let y3 = un + 0.5 * h * k2;
        let k3 = memory.rhs(&u, &du, &g, r, m, StagePoint::Mid, y3, k2);
        let y4 = un + h * k3;
        let k4 = memory.rhs(&u, &du, &g, r, m, StagePoint::End, y4, k3);
        let next = un + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t1 = (m + 1) as f64 * h;
        check_state(t1, next)?;
        let lf = n.log_f(next);
        if lf - r > RESCALE_GAP {
            let scale = (r - lf).exp();
            for v in g.iter_mut() {
                *v *= scale;
                if *v < 1e-300 {
                    *v = 0.0;
                }
            }
            r = lf;
        }
        u.push(next);
        g.push((lf - r).exp());
        du.push(k4);
        let d = memory.rhs(&u, &du, &g, r, m + 1, StagePoint::Start, next, k4);
        du[m + 1] = d;
    }
    let truncated_mass = match truncation {
        Some(tr) if opts.t_end > tr.s_max => kernel.tail_mass(tr.s_max)?,
        _ => 0.0,
    };
    let meta = TrajectoryMeta {
        step: h,
        thin: opts.thin,
        scheme: Scheme::Rk4Volterra,
        simpson_panels: 0,
        truncation,
        truncated_mass,
        transient: 0.0,
    };
    Trajectory::assemble(n, kernel.total_mass(), h, &u, meta)
}

/// Runs at `h` and `h/2` and compares on the common output grid.
#[derive(Debug, Clone)]
pub struct RefineCheck {
    pub coarse: Trajectory,
    pub fine: Trajectory,
    pub sup_diff: f64,
}

pub fn refine_check(n: &Nonlinearity, problem: &Problem, opts: &IntegrationOptions) -> Result<RefineCheck> {
    let fine_opts = IntegrationOptions { h: opts.h / 2.0, thin: opts.thin * 2, ..*opts };
    let (coarse, fine) = opts.exec.join(
        || integrate(n, problem, opts),
        || integrate(n, problem, &fine_opts),
    );
    let (coarse, fine) = (coarse?, fine?);
    let sup_diff = sup_common_diff(&coarse, &fine);
    Ok(RefineCheck { coarse, fine, sup_diff })
}

/// `sup |u_a - u_b|` over output times present in both trajectories.
pub fn sup_common_diff(a: &Trajectory, b: &Trajectory) -> f64 {
    let mut j = 0;
    let mut sup: f64 = 0.0;
    for (i, &t) in a.times.iter().enumerate() {
        let tol = 1e-9 * t.max(1.0);
        while j < b.times.len() && b.times[j] < t - tol {
            j += 1;
        }
        if j < b.times.len() && (b.times[j] - t).abs() <= tol {
            sup = sup.max((a.log_state[i] - b.log_state[j]).abs());
        }
    }
    sup
}

/// `sup|u_h - u_{h/2}| / sup|u_{h/2} - u_{h/4}|`, about 16 for a fourth-order scheme.
pub fn self_convergence_ratio(n: &Nonlinearity, problem: &Problem, opts: &IntegrationOptions) -> Result<f64> {
    let first = refine_check(n, problem, opts)?;
    let half = IntegrationOptions { h: opts.h / 4.0, thin: opts.thin * 4, ..*opts };
    let quarter = integrate(n, problem, &half)?;
    let d2 = sup_common_diff(&first.fine, &quarter);
    Ok(first.sup_diff / d2)
}
