use thiserror::Error;

/// Crate-wide error type. Every failure names the place it was detected and
/// enough data to locate the offending basis element or matrix entry.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("matrix is not idempotent: p^2 differs from p at column {col}")]
    NotIdempotent { col: usize },

    #[error("inconsistent linear system in {context}: no solution for column {col}")]
    Unsolvable { context: String, col: usize },

    #[error("subspace containment violated in {context}: generator {index} lies outside the ambient subspace")]
    ContainmentViolation { context: String, index: usize },

    #[error("differential does not square to zero: degree {degree}, entry ({row}, {col})")]
    DifferentialSquare { degree: i64, row: usize, col: usize },

    #[error("map does not commute with the differentials at degree {degree} ({context})")]
    NotChainMap { degree: i64, context: String },

    #[error("map is not equivariant: arity {arity}, transposition s_{transposition}, degree {degree} ({context})")]
    NotEquivariant {
        arity: usize,
        transposition: usize,
        degree: i64,
        context: String,
    },

    #[error("group action violates the Coxeter relation {relation} at arity {arity}, degree {degree}")]
    CoxeterViolation {
        arity: usize,
        degree: i64,
        relation: String,
    },

    #[error("weight grading violated in {context}: entry ({row}, {col}) at degree {degree} mixes weights")]
    WeightMixing {
        context: String,
        degree: i64,
        row: usize,
        col: usize,
    },

    #[error("composition product requires either a zero arity-0 part or a weight bound with all arity-0 basis elements of positive weight ({context})")]
    UnboundedArityZero { context: String },

    #[error("truncation policies disagree in {context}: {left} vs {right}")]
    PolicyMismatch {
        context: String,
        left: String,
        right: String,
    },

    #[error("axiom violation in {check}: {witness}")]
    AxiomViolation { check: String, witness: String },

    #[error("simplicial identity {identity} fails at level {level} (arity {arity}, degree {degree})")]
    SimplicialIdentity {
        identity: String,
        level: usize,
        arity: usize,
        degree: i64,
    },

    #[error("{op} requires an operad with zero arity-0 part and one-dimensional unital arity-1 part; {operad} violates this")]
    NotAugmentable { op: String, operad: String },

    #[error("requested degree window reaches total degree {requested}, but the simplicial bound only determines homology through total degree {trustworthy}")]
    TruncationWindow { requested: i64, trustworthy: i64 },

    #[error("invalid input in {context}: {message}")]
    InvalidInput { context: String, message: String },
}

impl Error {
    pub fn invalid(context: &str, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            context: context.to_string(),
            message: message.into(),
        }
    }
}
