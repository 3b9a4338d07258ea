use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group needs at least one cyclic factor")]
    EmptyGroup,
    #[error("cyclic factor must be at least 1, got {0}")]
    ZeroFactor(usize),
    #[error("subgroup divisor {divisor} does not divide factor {factor}")]
    NonDivisor { factor: usize, divisor: usize },
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("operands live on different groups")]
    GroupMismatch,
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(f64),
    #[error("exponents violate the admissibility condition: {0}")]
    InadmissibleExponents(String),
    #[error("weight must be strictly positive and finite")]
    NonPositiveWeight,
    #[error("window set is empty")]
    EmptyWindow,
    #[error("window set must contain the unit of phase space")]
    WindowMissingUnit,
    #[error("window function is identically zero")]
    ZeroWindow,
    #[error("not a frame: lower bound {lower:e}, upper bound {upper:e}")]
    NotAFrame { lower: f64, upper: f64 },
    #[error("no window h satisfies S_(h,g) = S_(g,h) = I on this lattice (residual {residual:e})")]
    NoGaborDual { residual: f64 },
    #[error("matrix is not Hermitian (max |M - M^H| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("dominant eigenvalue {0:e} is below the degeneracy threshold")]
    DegenerateSpectrum(f64),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
