use thiserror::Error;

/// Which admissibility check a parameter set failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamCheck {
    DegreeNotOddPrime,
    ConductorNotOddPrime,
    DegreeDoesNotDivide,
    TwoNotInert,
    ClassNumberEven,
}

impl std::fmt::Display for ParamCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ParamCheck::DegreeNotOddPrime => "n is not an odd prime",
            ParamCheck::ConductorNotOddPrime => "ell is not an odd prime",
            ParamCheck::DegreeDoesNotDivide => "n does not divide ell-1",
            ParamCheck::TwoNotInert => "2 is not inert (2^((ell-1)/n) = 1 mod ell)",
            ParamCheck::ClassNumberEven => "class number h must be odd",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    Param(ParamCheck),
    #[error("element is zero")]
    ZeroElement,
    #[error("embedding signs not certified at {bits} bits")]
    PrecisionExhausted { bits: u64 },
    #[error("element is not a unit modulo 2")]
    NotAUnit,
    #[error("modulus polynomial is not an irreducible polynomial of degree {0} over F2")]
    ReduciblePolynomial(usize),
    #[error("degree {n} exceeds the supported maximum {max} for this operation")]
    DegreeTooLarge { n: usize, max: usize },
    #[error("Galois orbit invariant violated: {0}")]
    OrbitInvariantViolation(String),
    #[error("Gram validation failed at basis pair ({row}, {col}): oracle {oracle}, formula {formula}")]
    ValidationFailed {
        row: usize,
        col: usize,
        oracle: u8,
        formula: u8,
    },
    #[error("closed-form pairing is not validated; refusing formula provenance")]
    FormulaNotValidated,
    #[error("starlight invariant mismatch: {by_orbits} by orbit count, {by_kernel} by kernel size")]
    StarInconsistency { by_orbits: u64, by_kernel: i64 },
    #[error("m_K = {m_k} outside [0, {max}]")]
    BoundViolation { m_k: u64, max: u64 },
    #[error("star map not well defined: {0}")]
    WellDefinednessFailure(String),
    #[error("prime {0} divides 2*ell or is not prime")]
    BadPrime(u64),
    #[error("prime {0} divides an interpolation denominator")]
    DenominatorClash(u64),
    #[error("no generator of norm {norm} found up to trace radius {radius} (p = {p})")]
    EnumerationExhausted { p: u64, norm: String, radius: String },
    #[error("unit signatures do not span F2^n (rank {rank} of {n}); totally positive units are not all squares")]
    SignatureSpanFailure { rank: usize, n: usize },
    #[error("signature not reachable by the unit basis")]
    UnreachableSignature,
    #[error("spin product disagrees with the Hilbert symbol (p = {p}, j = {j})")]
    SpinSymbolMismatch { p: u64, j: usize },
    #[error("{excluded} of {total} primes excluded, above the 0.1% limit")]
    TooManyExclusions { excluded: u64, total: u64 },
    #[error("generator reduces to 0 modulo a conjugate prime (p = {p}, j = {j})")]
    NonUnitResidue { p: u64, j: usize },
    #[error("inconsistency: {0}")]
    Consistency(String),
    #[error("cache entry invalid: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Failures that exclude a single prime from a sample without
    /// invalidating the run.
    pub fn is_per_prime(&self) -> bool {
        matches!(
            self,
            Error::DenominatorClash(_)
                | Error::EnumerationExhausted { .. }
                | Error::NonUnitResidue { .. }
                | Error::PrecisionExhausted { .. }
                | Error::UnreachableSignature
        )
    }
}
