use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("period {period} does not divide the degree {degree}")]
    NonDivisorPeriod { period: u64, degree: u64 },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("{monomials} monomials but {variables} variables; the exponent matrix must be square")]
    NotSquare { monomials: usize, variables: usize },

    #[error("exponent matrix is singular")]
    SingularMatrix,

    #[error("coefficient {coefficient} at byte {position} is not 1 (use --allow-coefficients to rescale)")]
    NonUnitCoefficient { coefficient: i64, position: usize },

    #[error("canonical weight w{} = {weight} is not positive", .index + 1)]
    NonPositiveWeight { index: usize, weight: String },

    #[error("monomial {} does not have chain/loop shape; the polynomial is degenerate", .row + 1)]
    NotKreuzerSkarke { row: usize },

    #[error("Milnor number {0} is not an integer; the singularity is not isolated")]
    NonIntegralMilnor(String),

    #[error("divisor multiplicity {multiplicity} at order {order} is not an integer")]
    NonIntegralDivisor { order: u64, multiplicity: String },

    #[error("vector {m:?} does not solve E m = 1 mod {k}")]
    InvalidSolution { k: u64, m: Vec<i64> },

    #[error("no geometric root of degree {k}: E m = 1 mod {k} has no solution")]
    NoGeometricRoot { k: u64 },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("canonical weights are not reduced (gcd {c})")]
    NonReducedWeights { c: u64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid matrix input: {0}")]
    InvalidInput(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
