use thiserror::Error;

/// Errors raised by the library.
///
/// Validation errors describe bad input. [`Error::InternalInconsistency`] and
/// [`Error::InvariantViolation`] mean two independent computations disagreed or
/// a proven inequality failed; callers should treat those as fatal.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invariants do not sum to an integer")]
    InvariantSumNotIntegral,
    #[error("local index {m} does not divide the degree {n}")]
    MNotDividingN { m: i64, n: u32 },
    #[error("the real place can only carry the invariant 1/2")]
    BadRealInvariant,
    #[error("invariant {0} is not in the open interval (0, 1)")]
    InvalidInvariant(String),
    #[error("place {0} appears more than once")]
    DuplicatePlace(String),
    #[error("ramification set has odd cardinality {0}")]
    OddRamification(usize),
    #[error("a complex place cannot ramify")]
    ComplexPlaceRamified,
    #[error("place {place} is not a place of the field with discriminant {disc}")]
    InvalidPlace { place: String, disc: i64 },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("operation needs a real quadratic field, got discriminant {0}")]
    ImaginaryField(i64),
    #[error("operation needs an imaginary quadratic field, got discriminant {0}")]
    RealField(i64),
    #[error("the algebra is ramified at the real place")]
    DefiniteAlgebra,
    #[error("discriminants are multiplicatively dependent modulo squares")]
    DependentDiscriminants,
    #[error("no prime is inert in every field: an odd product of the characters is trivial")]
    NoCommonInertPrimes,
    #[error("nothing found within the search bound {0}")]
    NotFoundWithinBound(u64),
    #[error("trace {0} is not hyperbolic (need |t| > 2)")]
    NonHyperbolicTrace(f64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("zero has no height")]
    ZeroInput,
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True for errors that signal a broken invariant rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::InternalInconsistency(_) | Error::InvariantViolation(_) | Error::NotFoundWithinBound(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
