use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("total mass {0} is not positive")]
    NonPositiveMass(f64),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("first moment undecidable: {0}")]
    MomentUndecidable(String),
    #[error("operation requires a half-line kernel")]
    WrongSupport,
    #[error("bad window [{a}, {b}]")]
    BadWindow { a: f64, b: f64 },

    #[error("theta must be positive (got {0})")]
    BadTheta(f64),
    #[error("argument {0} outside the domain")]
    DomainError(f64),
    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),
    #[error("declared lambda {declared} disagrees with estimate {estimated}")]
    LambdaMismatch { declared: String, estimated: String },
    #[error("lambda ratio does not settle: {0}")]
    NonMonotoneTail(String),
    #[error("sampled trend is inconclusive: {0}")]
    Inconclusive(String),
    #[error("expression error: {0}")]
    Expression(String),

    #[error("step {h} exceeds tau/16 = {limit}")]
    StepTooLarge { h: f64, limit: f64 },
    #[error("history must be positive")]
    NonPositiveHistory,
    #[error("log-state {u} exceeded the overflow guard at t = {t}")]
    OverflowGuard { t: f64, u: f64 },
    #[error("invalid integration parameter: {0}")]
    BadParameter(String),

    #[error("classification outside its regime: {0}")]
    WrongRegime(String),

    #[error("config error: {0}")]
    Config(String),
    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub fn in_scenario(self, scenario: &str) -> Error {
        Error::Scenario {
            scenario: scenario.to_string(),
            source: Box::new(self),
        }
    }
}
