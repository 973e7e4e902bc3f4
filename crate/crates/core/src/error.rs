use thiserror::Error;

/// Errors raised by the boosting library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid weight distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("smooth margin and margin are undefined at the origin (s = 0)")]
    ZeroNorm,

    #[error("degenerate edge {0}: |r| must stay below 1")]
    DegenerateEdge(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("step rule precondition violated: {0}")]
    StepPrecondition(String),

    #[error("line search bracket failed: f(0) = {f_lo}, f(gamma) = {f_hi}")]
    Bracket { f_lo: f64, f_hi: f64 },

    #[error("no column with positive edge is available")]
    NoPositiveEdge,

    #[error("invalid bounded-edge parameters: {0}")]
    BoundedEdgeParams(String),

    #[error("bounded-edge prefix length {i_bar} exceeds the column cap {cap}")]
    PrefixCap { i_bar: usize, cap: usize },

    #[error("edge script exhausted at t = {t} (length {len})")]
    ScriptExhausted { t: usize, len: usize },

    #[error("data is not separable (rho = {0}); this mode requires rho > 0")]
    NonSeparable(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cycle window inconsistent with detected period: {0}")]
    CycleWindow(String),

    #[error("trace format error: {0}")]
    Trace(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
