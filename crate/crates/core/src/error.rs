use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("modulus {0} needs value tables larger than the configured limit")]
    ModulusTooLarge(u64),
    #[error("could not factor {0} within the configured budget")]
    FactorizationTooLarge(u64),
    #[error("character index {index} out of range for modulus {modulus}")]
    IndexOutOfRange { modulus: u64, index: u64 },
    #[error("characters have incompatible moduli or orders: {0}")]
    CharacterMismatch(String),
    #[error("range length {len} exceeds start {start}; the bound needs N <= M")]
    RangeOrder { start: u64, len: u64 },
    #[error("character is not primitive")]
    NotPrimitive,
    #[error("sample mixes square-full classes {0} and {1}")]
    MixedSquarefullClass(u64, u64),
    #[error("empty sample")]
    EmptySample,
    #[error("L(s, chi) has a pole at s = 1 for principal chi")]
    PoleAtOne,
    #[error("region contains the pole at s = 1")]
    PoleInRegion,
    #[error("precision budget exceeded: {0}")]
    PrecisionBudgetExceeded(String),
    #[error("|L(s)| = {0:e} is too small for a logarithmic derivative")]
    NearZeroOrPole(f64),
    #[error("zero suspected on the contour near {re} + {im}i")]
    BoundaryZeroSuspected { re: f64, im: f64 },
    #[error("resolution exhausted: {0}")]
    ResolutionExhausted(String),
    #[error("degenerate region: {0}")]
    DegenerateRegion(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("sum cap too small: last term {last:e} vs total {total:e}")]
    CapTooSmall { last: f64, total: f64 },
    #[error("quadrature budget exhausted after {0} panels")]
    QuadratureBudget(usize),
    #[error("{0} is not cubefree")]
    NotCubefree(u64),
    #[error("|disc| = {disc} exceeds the cap {cap}")]
    CapExceeded { disc: u64, cap: u64 },
    #[error("census is empty (M = 0)")]
    ZeroCensus,
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("duplicate discriminant {0}")]
    DuplicateDiscriminant(i64),
    #[error("cache version mismatch: found {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("cache corrupted at line {0}")]
    CorruptCache(u64),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 constraint, 3 data, 4 numeric budget.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Parse { .. } | DuplicateDiscriminant(_) | VersionMismatch { .. } | CorruptCache(_)
            | Config(_) | Io(_) => 3,
            PrecisionBudgetExceeded(_)
            | QuadratureBudget(_)
            | ResolutionExhausted(_)
            | CapTooSmall { .. }
            | FactorizationTooLarge(_)
            | ModulusTooLarge(_)
            | CapExceeded { .. }
            | BoundaryZeroSuspected { .. }
            | NearZeroOrPole(_) => 4,
            _ => 2,
        }
    }
}
