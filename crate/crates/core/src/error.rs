use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    CompositeInput(u64),
    #[error("prime {0} is too small (need p >= 5)")]
    TooSmall(u64),
    #[error("p = {p} is not congruent to 1 modulo the datum modulus {modulus}")]
    ModulusMismatch { p: u64, modulus: u64 },
    #[error("rounding guard failed at p = {p}, lambda = {lambda}: value {re} + {im}i is not a real integer")]
    PrecisionLoss { p: u64, lambda: u64, re: f64, im: f64 },
    #[error("lambda^2 = {0} lies on the boundary {{0, 1}} where the trace identity is not asserted")]
    BoundaryLambda(u64),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family has identically vanishing discriminant")]
    SingularFamily,
    #[error("bad prime {p} for family `{family}`")]
    BadPrime { p: u64, family: String },
    #[error("sweep mismatch: {0}")]
    SweepMismatch(String),
    #[error("bad histogram range [{lo}, {hi}] with {bins} bins")]
    BadRange { lo: f64, hi: f64, bins: usize },
    #[error("no samples")]
    EmptySamples,
    #[error("multiplicity formula not integral for m = {m}, r = {r}")]
    NonIntegral { m: u32, r: u32 },
    #[error("quadrature failed: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },
    #[error("argument {0} outside the domain")]
    DomainError(f64),
    #[error("check failed: {0}")]
    CheckFailure(String),
    #[error("invalid hypergeometric datum: {0}")]
    InvalidDatum(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("corrupt cache entry {path}: {reason}")]
    CacheCorrupt { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
