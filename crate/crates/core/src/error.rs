use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("interval order: r1 = {r1} exceeds r2 = {r2}")]
    IntervalOrder { r1: String, r2: String },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("slope collision: cut {0} is a slope of the Newton polygon")]
    SlopeCollision(String),
    #[error("normalization: {0}")]
    Normalization(String),
    #[error("field mode: {0}")]
    Mode(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("singular gauge: {0}")]
    SingularGauge(String),
    #[error("incompatible modules: {0}")]
    Incompatible(String),
    #[error("no cyclic vector found among {} candidates: {}", tried.len(), tried.join(", "))]
    CyclicSearchFailure { tried: Vec<String> },
    #[error("parameter: {0}")]
    Parameter(String),
    #[error("interval/pole conflict: {0}")]
    PoleConflict(String),
    #[error("r = {0} is outside the module interval")]
    OutsideInterval(String),
    #[error("ambiguous inversion at irlog {entry}")]
    AmbiguousInversion { entry: String },
    #[error("inversion infeasible: {0}")]
    InversionInfeasible(String),
    #[error("containment: {0}")]
    Containment(String),
    #[error("no arithmetic is defined at irrational-radius markers")]
    IrrationalMarker,
    #[error("nested chain: {0}")]
    Chain(String),
    #[error("{0} is not in Z_p")]
    NotInZp(String),
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error("irregular at t = 0: {0}")]
    Irregular(String),
    #[error("preparedness violation: {0}")]
    PreparednessViolation(String),
    #[error("hypothesis: {0}")]
    Hypothesis(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("{pointer}: {msg}")]
    Schema { pointer: String, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn schema(pointer: &str, msg: impl Into<String>) -> Self {
        Error::Schema {
            pointer: if pointer.is_empty() { "/".to_string() } else { pointer.to_string() },
            msg: msg.into(),
        }
    }
}
