use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("seed has {got} coefficients but degree {n} needs {expected}", expected = .n + 1)]
    SeedLength { n: usize, got: usize },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("index {index} outside 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("polynomial must be nonconstant with nonzero constant term")]
    DegeneratePolynomial,

    #[error("x = {x} outside [0, {max}]")]
    OutOfDomain { x: String, max: usize },

    #[error("degree {m} is too small for k = {k} (need m >= 2k > 2l >= 0, l = {l})")]
    DegreeTooSmall { m: usize, k: usize, l: usize },

    #[error("prime {0} divides the leading coefficient")]
    PrimeDividesLeading(u64),

    #[error("prime {0} divides a_0 a_m of the seed")]
    PrimeDividesSeed(u64),

    #[error("polygons belong to different degrees ({0} and {1})")]
    DegreeMismatch(usize, usize),

    #[error("no polygons supplied")]
    EmptyInput,

    #[error("u = {0} is unsupported here; u must be -1 or 0")]
    UnsupportedOffset(i64),

    #[error("k = {k} outside 1..={max}")]
    DegreeOutOfRange { k: usize, max: usize },

    #[error("sieve table covers 0..={limit} but {needed} is required")]
    TableTooSmall { limit: u64, needed: u64 },

    #[error("residue {residue} is not a unit modulo {modulus}")]
    InvalidResidue { residue: u64, modulus: u64 },

    #[error("exponent k + 1 - pi(4k + 3) = {0} is not positive")]
    NonpositiveExponent(i64),

    #[error("no h_p satisfies the bracket condition for p = {p}, k = {k}")]
    NoBracket { p: u64, k: u64 },

    #[error("range violation: {0}")]
    RangeViolation(String),

    #[error("parameters outside the required family: {0}")]
    WrongFamily(String),

    #[error("seed hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("polygon breaks {realized:?} do not match expected {expected:?}")]
    BreakMismatch { expected: Vec<usize>, realized: Vec<usize> },

    #[error("slope bound violated: {0}")]
    SlopeBound(String),

    #[error("no qualifying prime: {0}")]
    NoQualifyingPrime(String),

    #[error("claim {claim} fails between vertices x = {left} and x = {right}")]
    ClaimViolation { claim: u8, left: usize, right: usize },

    #[error("segment refinement admits degree {degree} at p = {prime}")]
    SegmentAdmits { prime: u64, degree: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error signals a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
