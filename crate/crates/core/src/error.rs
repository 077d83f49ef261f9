use thiserror::Error;

/// Errors raised anywhere in the compiler, simulators and bound solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: Pauli string has width {found}, expected {expected}")]
    InconsistentWidth {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("Hamiltonian has no terms after merging and dropping zeros")]
    EmptyModel,

    #[error("register of {requested} qubits is outside the simulator range 2..={cap}")]
    WidthOverflow { requested: usize, cap: usize },

    #[error("width mismatch: operator acts on {found} qubits, register has {expected}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("dense oracle supports at most {cap} system qubits, got {requested}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("{count} interleavings exceed the enumeration cap {cap}")]
    CombinatorialCap { count: u128, cap: u128 },

    #[error("order {order} exceeds the number of segments {segments}")]
    OrderExceedsSegments { order: usize, segments: usize },

    #[error("bound is vacuous: (2e*lambda_t)^2 = {threshold:.6e} >= N = {segments}")]
    VacuousRegion { threshold: f64, segments: u128 },

    #[error("no segment count up to {cap} satisfies the requested error")]
    NoSolutionBelowCap { cap: u128 },

    #[error("estimator would run {requested} circuits, above the cap {cap}")]
    BudgetOverflow { requested: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
