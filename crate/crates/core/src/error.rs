use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("all entries are zero")]
    AllZero,
    #[error("coefficient at exponent {requested} lies beyond the horizon {horizon}")]
    BeyondHorizon { requested: BigInt, horizon: BigInt },
    #[error("{0} is not a power of the characteristic")]
    NotAPowerOfCharacteristic(String),
    #[error("series is not a p-th power (exponent {0} not divisible by p)")]
    NotAPthPower(BigInt),
    #[error("precision exhausted: value still below q^-{0} after refinement")]
    PrecisionExhausted(BigInt),
    #[error("exponent budget exceeded: need {needed}, budget {budget}")]
    ExponentBudgetExceeded { needed: String, budget: u64 },
    #[error("enumeration budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("the zero polynomial has no height")]
    ZeroPolynomial,
    #[error("roots cannot be separated at horizon {0}")]
    HorizonTooSmall(i64),
    #[error("root finder recursion exceeded depth {0}")]
    RecursionCapExceeded(u32),
    #[error("the two values agree through horizon {0}")]
    IndistinguishableAtHorizon(BigInt),
    #[error("witness polynomial vanishes at the series: {0}")]
    ZeroValueWitness(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
