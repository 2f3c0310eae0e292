use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("coefficient domain mismatch: {0} vs {1}")]
    DomainMismatch(String, String),
    #[error("variable order mismatch")]
    OrderMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("invalid modulus {0}: {1}")]
    InvalidModulus(u64, &'static str),
    #[error("too many variables ({0}); at most 15 are supported")]
    TooManyVariables(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("inconsistent residues: {0}")]
    InconsistentResidues(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid matrix shape {m}x{n}: {reason}")]
    InvalidShape { m: usize, n: usize, reason: &'static str },
    #[error("invalid minor label {0}")]
    InvalidLabel(usize),
    #[error("column set {0:?} is not a valid maximal minor")]
    InvalidColumns(Vec<usize>),
    #[error("arrangement must contain at least one minor")]
    EmptyArrangement,
    #[error("minor f{0} appears twice; the divisor would not be reduced")]
    NotReduced(usize),
    #[error("derivation has {got} coefficients, expected {expected}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("derivation coefficients are not homogeneous of a common degree")]
    NotHomogeneous,
    #[error("no transcribed basis for {0}")]
    UnknownBasis(String),
    #[error("basis data: {0}")]
    BasisData(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("tangency stage failed: {0}")]
    Tangency(String),
    #[error("degree-sum stage failed: derivation degrees sum to {got}, need deg F - 1 = {expected}")]
    DegreeSum { expected: usize, got: usize },
    #[error("determinant stage failed: {0}")]
    Determinant(String),
    #[error("expected {expected} derivations, got {got}")]
    Count { expected: usize, got: usize },
    #[error("exact determinant exceeded its budget of {0} intermediate terms; use the probabilistic mode")]
    Budget(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("degree {0} is not certified (modular and rational bounds differ)")]
    Uncertified(u32),
    #[error("degree {requested} exceeds the degree budget {budget}")]
    DegreeBudget { requested: u32, budget: u32 },
    #[error("gave up lifting degree {degree} generators after {primes} primes")]
    LiftBudget { degree: u32, primes: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("subset size {0} outside the number of minors")]
    SubsetSize(usize),
    #[error("surveys over {0}-subsets need the experimental flag")]
    Experimental(usize),
    #[error("checkpoint was written for configuration {found}, this run is {expected}")]
    CheckpointMismatch { found: String, expected: String },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    File(#[from] FileError),
}
