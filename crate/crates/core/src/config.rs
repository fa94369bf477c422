//! Scenario files.
//!
//! Line-oriented `key = value` pairs grouped under `[section]` headers.
//! `#` starts a comment. Unknown sections and keys are errors.
//!
//! ```text
//! [scenario]
//! name = fde-example1-delay1
//! equation = fde              # fde | vde | ode
//! t_end = 2000
//! h = 0.03125
//! thin = 32                   # keep every 32nd grid point
//! extrapolation_window = 0.3  # trailing fraction used by the limit fit
//! refine = false              # also run at h/2 and report sup |Δu|
//! mass = 1                    # ode only, when no [kernel] is given
//!
//! [nonlinearity]
//! family = example            # example | sqrt | custom
//! theta = 1
//! # custom: f, f_prime (in x), log_f (in w = log x), lambda, monotone_from, concave_from
//!
//! [kernel]
//! support = delay             # delay | halfline
//! tau = 1
//! atoms = -1:1                # location:weight, comma separated
//! density = powerlaw          # powerlaw | none
//! alpha = 3
//! scale = 2                   # or `normalize = <mass>`
//! s_max = 1e6
//!
//! [initial]
//! value = 1                   # ψ ≡ value (fde), x0 (vde), y0 (ode)
//!
//! [tolerance]
//! value_rel = 0.1
//! trend_factor = 2
//!
//! [expect]
//! limit = zero                # overrides the prediction: zero | unit | indeterminate | <number>
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::asymptotics::RatioLimit;
use crate::dynamics::{HistoryFunction, IntegrationOptions, Problem};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::{MeasureKernel, PowerLaw, Support, DEFAULT_S_MAX};
use crate::nonlinearity::{LambdaClass, Nonlinearity};

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "scenario",
        &["name", "equation", "t_end", "h", "thin", "extrapolation_window", "refine", "mass", "simpson_panels"],
    ),
    (
        "nonlinearity",
        &["family", "theta", "f", "f_prime", "log_f", "lambda", "monotone_from", "concave_from"],
    ),
    ("kernel", &["support", "tau", "atoms", "density", "alpha", "scale", "normalize", "s_max"]),
    ("initial", &["value"]),
    ("tolerance", &["value_rel", "trend_factor"]),
    ("expect", &["limit"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    Fde,
    Vde,
    Ode,
}

impl EquationKind {
    pub fn name(self) -> &'static str {
        match self {
            EquationKind::Fde => "fde",
            EquationKind::Vde => "vde",
            EquationKind::Ode => "ode",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearitySpec {
    Example { theta: f64 },
    Sqrt,
    Custom {
        f: String,
        f_prime: String,
        log_f: String,
        lambda: Option<LambdaClass>,
        monotone_from: f64,
        concave_from: Option<f64>,
    },
}

impl NonlinearitySpec {
    pub fn build(&self) -> Result<Nonlinearity> {
        match self {
            NonlinearitySpec::Example { theta } => Nonlinearity::example(*theta),
            NonlinearitySpec::Sqrt => Ok(Nonlinearity::sqrt()),
            NonlinearitySpec::Custom { f, f_prime, log_f, lambda, monotone_from, concave_from } => {
                Nonlinearity::custom(f, f_prime, log_f, *lambda, *monotone_from, *concave_from)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensitySpec {
    PowerLaw { alpha: f64, scale: f64 },
    /// Power law rescaled to the given density mass.
    PowerLawNormalized { alpha: f64, mass: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub support: Support,
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<DensitySpec>,
    pub s_max: f64,
}

impl KernelSpec {
    pub fn build(&self) -> Result<MeasureKernel> {
        let density = match self.density {
            None => None,
            Some(DensitySpec::PowerLaw { alpha, scale }) => {
                Some(Arc::new(PowerLaw::new(alpha, scale)?) as Arc<dyn crate::measures::Density>)
            }
            Some(DensitySpec::PowerLawNormalized { alpha, mass }) => {
                Some(Arc::new(PowerLaw::normalized(alpha, mass)?) as Arc<dyn crate::measures::Density>)
            }
        };
        MeasureKernel::with_truncation(self.support, &self.atoms, density, self.s_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance on the extrapolated ratio for `Value` targets.
    pub value_rel: f64,
    /// Required shrink factor of the distance to a `Zero`/`Unit` target.
    pub trend_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { value_rel: 0.1, trend_factor: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub equation: EquationKind,
    pub nonlinearity: NonlinearitySpec,
    pub kernel: Option<KernelSpec>,
    /// `ψ ≡ value`, `x0` or `y0`.
    pub initial: f64,
    /// ODE mass when no kernel is given.
    pub mass: f64,
    pub t_end: f64,
    pub h: f64,
    pub thin: usize,
    pub simpson_panels: usize,
    pub extrapolation_window: f64,
    pub refine: bool,
    pub tolerances: Tolerances,
    pub expect: Option<RatioLimit>,
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {lineno}: malformed section header")))?
                .trim()
                .to_string();
            if !SCHEMA.iter().any(|(s, _)| *s == name) {
                return Err(Error::Config(format!("line {lineno}: unknown section [{name}]")));
            }
            if sections.contains_key(&name) {
                return Err(Error::Config(format!("line {lineno}: duplicate section [{name}]")));
            }
            sections.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {lineno}: expected `key = value`")));
        };
        let Some(section) = &current else {
            return Err(Error::Config(format!("line {lineno}: key outside of a section")));
        };
        let key = key.trim().to_string();
        let allowed = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!("line {lineno}: unknown key `{key}` in [{section}]")));
        }
        let entries = sections.get_mut(section).expect("section was inserted");
        if entries.insert(key.clone(), (lineno, value.trim().to_string())).is_some() {
            return Err(Error::Config(format!("line {lineno}: duplicate key `{key}`")));
        }
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    entries: Option<&'a BTreeMap<String, (usize, String)>>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.and_then(|e| e.get(key)).map(|(l, v)| (*l, v.as_str()))
    }

    fn string(&self, key: &str) -> Result<String> {
        self.raw(key)
            .map(|(_, v)| v.to_string())
            .ok_or_else(|| Error::Config(format!("missing `{key}` in [{}]", self.name)))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("line {line}: `{key}` is not a number: `{v}`"))),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.number(key)? {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                Err(Error::Config(format!("`{key}` in [{}] must be positive, got {v}", self.name)))
            }
            other => Ok(other),
        }
    }

    fn required_positive(&self, key: &str) -> Result<f64> {
        self.positive(key)?
            .ok_or_else(|| Error::Config(format!("missing `{key}` in [{}]", self.name)))
    }
}

fn parse_lambda(v: &str) -> Result<LambdaClass> {
    match v {
        "0" | "zero" => Ok(LambdaClass::Zero),
        "inf" | "infinite" => Ok(LambdaClass::Infinite),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|l| l.is_finite() && *l > 0.0)
            .map(LambdaClass::Finite)
            .ok_or_else(|| Error::Config(format!("bad lambda `{other}`"))),
    }
}

fn parse_limit(v: &str) -> Result<RatioLimit> {
    match v {
        "zero" => Ok(RatioLimit::Zero),
        "unit" => Ok(RatioLimit::Unit),
        "indeterminate" => Ok(RatioLimit::Indeterminate),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x > 0.0 && *x <= 1.0)
            .map(RatioLimit::Value)
            .ok_or_else(|| Error::Config(format!("bad expected limit `{other}`"))),
    }
}

fn parse_atoms(v: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (loc, w) = item
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("atom `{item}` is not `location:weight`")))?;
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number in atom `{item}`")))
        };
        out.push((parse(loc)?, parse(w)?));
    }
    Ok(out)
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("bad boolean `{other}`"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let sections = parse_sections(text)?;
        let sec = |name: &'static str| Section { name, entries: sections.get(name) };
        let scenario = sec("scenario");
        if scenario.entries.is_none() {
            return Err(Error::Config("missing [scenario] section".into()));
        }
        let name = scenario.string("name")?;
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(Error::Config(format!("scenario name `{name}` must be [A-Za-z0-9-_.]+")));
        }
        let equation = match scenario.string("equation")?.as_str() {
            "fde" => EquationKind::Fde,
            "vde" => EquationKind::Vde,
            "ode" => EquationKind::Ode,
            other => return Err(Error::Config(format!("unknown equation `{other}`"))),
        };
        let t_end = scenario.required_positive("t_end")?;
        let h = scenario.positive("h")?.unwrap_or(1.0 / 32.0);
        let thin = scenario.positive("thin")?.unwrap_or(1.0);
        let panels = scenario.positive("simpson_panels")?.unwrap_or(64.0);
        for (key, v) in [("thin", thin), ("simpson_panels", panels)] {
            if v.fract() != 0.0 {
                return Err(Error::Config(format!("`{key}` must be an integer")));
            }
        }
        let window = scenario.positive("extrapolation_window")?.unwrap_or(0.3);
        if window > 1.0 {
            return Err(Error::Config("extrapolation_window must lie in (0, 1]".into()));
        }
        let refine = match scenario.raw("refine") {
            Some((_, v)) => parse_bool(v)?,
            None => false,
        };
        let mass = scenario.positive("mass")?.unwrap_or(1.0);

        let nl = sec("nonlinearity");
        if nl.entries.is_none() {
            return Err(Error::Config("missing [nonlinearity] section".into()));
        }
        let nonlinearity = match nl.string("family")?.as_str() {
            "example" => NonlinearitySpec::Example { theta: nl.required_positive("theta")? },
            "sqrt" => NonlinearitySpec::Sqrt,
            "custom" => NonlinearitySpec::Custom {
                f: nl.string("f")?,
                f_prime: nl.string("f_prime")?,
                log_f: nl.string("log_f")?,
                lambda: nl.raw("lambda").map(|(_, v)| parse_lambda(v)).transpose()?,
                monotone_from: nl.number("monotone_from")?.unwrap_or(0.0),
                concave_from: nl.number("concave_from")?,
            },
            other => return Err(Error::Config(format!("unknown nonlinearity family `{other}`"))),
        };

        let k = sec("kernel");
        let kernel = match k.entries {
            None => None,
            Some(_) => {
                let support = match k.string("support")?.as_str() {
                    "delay" => Support::DelayInterval { tau: k.required_positive("tau")? },
                    "halfline" => Support::HalfLine,
                    other => return Err(Error::Config(format!("unknown support `{other}`"))),
                };
                let atoms = match k.raw("atoms") {
                    Some((_, v)) => parse_atoms(v)?,
                    None => Vec::new(),
                };
                let density = match k.raw("density").map(|(_, v)| v).unwrap_or("none") {
                    "none" => None,
                    "powerlaw" => {
                        let alpha = k
                            .number("alpha")?
                            .ok_or_else(|| Error::Config("powerlaw needs `alpha`".into()))?;
                        match (k.positive("scale")?, k.positive("normalize")?) {
                            (Some(scale), None) => Some(DensitySpec::PowerLaw { alpha, scale }),
                            (None, Some(mass)) => Some(DensitySpec::PowerLawNormalized { alpha, mass }),
                            _ => {
                                return Err(Error::Config(
                                    "powerlaw needs exactly one of `scale` and `normalize`".into(),
                                ))
                            }
                        }
                    }
                    other => return Err(Error::Config(format!("unknown density `{other}`"))),
                };
                let s_max = k.positive("s_max")?.unwrap_or(DEFAULT_S_MAX);
                Some(KernelSpec { support, atoms, density, s_max })
            }
        };
        match (equation, &kernel) {
            (EquationKind::Fde | EquationKind::Vde, None) => {
                return Err(Error::Config(format!("{} needs a [kernel] section", equation.name())));
            }
            (EquationKind::Fde, Some(KernelSpec { support: Support::DelayInterval { tau }, .. })) => {
                if h > tau / 16.0 {
                    return Err(Error::Config(format!("h = {h} exceeds tau/16 = {}", tau / 16.0)));
                }
            }
            (EquationKind::Fde, Some(_)) => {
                return Err(Error::Config("fde needs support = delay".into()));
            }
            (EquationKind::Vde, Some(spec)) if spec.support != Support::HalfLine => {
                return Err(Error::Config("vde needs support = halfline".into()));
            }
            _ => {}
        }

        let initial = sec("initial").positive("value")?.unwrap_or(1.0);
        let tol = sec("tolerance");
        let defaults = Tolerances::default();
        let tolerances = Tolerances {
            value_rel: tol.positive("value_rel")?.unwrap_or(defaults.value_rel),
            trend_factor: tol.positive("trend_factor")?.unwrap_or(defaults.trend_factor),
        };
        let expect = sec("expect").raw("limit").map(|(_, v)| parse_limit(v)).transpose()?;

        Ok(ExperimentConfig {
            name,
            equation,
            nonlinearity,
            kernel,
            initial,
            mass,
            t_end,
            h,
            thin: thin as usize,
            simpson_panels: panels as usize,
            extrapolation_window: window,
            refine,
            tolerances,
            expect,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn options(&self, exec: Execution) -> IntegrationOptions {
        IntegrationOptions {
            t_end: self.t_end,
            h: self.h,
            thin: self.thin,
            simpson_panels: self.simpson_panels,
            exec,
        }
    }

    /// Builds the nonlinearity, the kernel (absent for a bare ODE) and the problem.
    pub fn build(&self) -> Result<(Nonlinearity, Option<MeasureKernel>, Problem)> {
        let n = self.nonlinearity.build()?;
        let kernel = self.kernel.as_ref().map(KernelSpec::build).transpose()?;
        let problem = match self.equation {
            EquationKind::Ode => Problem::Ode {
                mass: kernel.as_ref().map_or(self.mass, MeasureKernel::total_mass),
                y0: self.initial,
            },
            EquationKind::Fde => Problem::Fde {
                kernel: kernel.clone().expect("checked at parse time"),
                history: HistoryFunction::Constant(self.initial),
            },
            EquationKind::Vde => Problem::Vde {
                kernel: kernel.clone().expect("checked at parse time"),
                x0: self.initial,
            },
        };
        Ok((n, kernel, problem))
    }
}
