use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator {denominator} does not divide context order {order}")]
    IncompatibleOrder { denominator: String, order: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported exponent {0}: denominator must be 1 or 2")]
    UnsupportedExponent(String),
    #[error("degenerate lattice: Gram determinant is zero")]
    DegenerateLattice,
    #[error("lattice is not even: diagonal entry {0} is odd")]
    NotEven(i64),
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("element {0} is not a member of the module")]
    MembershipViolation(String),
    #[error("element {element} has no preimage under multiplication by {n}")]
    NonDivisible { element: String, n: u64 },
    #[error("congruence violated: {0}")]
    PrecisionViolation(String),
    #[error("p = {0} is not an odd prime")]
    PNotOdd(u64),
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("enumeration of {needed} items exceeds the budget of {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },
    #[error("no witness: the chosen input satisfies the identity")]
    WitnessNotFound,
    #[error("input precision {have} is below the required {needed}")]
    PrecisionInsufficient { needed: String, have: String },
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(String, String),
    #[error("{k} is not a divisor of {r}")]
    NotADivisor { k: u64, r: u64 },
    #[error("{m} and {n} are not coprime")]
    NotCoprime { m: u64, n: u64 },
    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("well-definedness violated: {0}")]
    NotWellDefined(String),
}

impl Error {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
