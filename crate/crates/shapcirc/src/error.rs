//! Crate-wide error type. One enum keeps composed pipelines (transform →
//! scores → reductions → provenance) free of conversion boilerplate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across parsing, validation, and computation.
#[derive(Debug, Error)]
pub enum Error {
    /// Syntax error in a text input (circuit, probability file, query, table).
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A token that should have been a rational number.
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    /// A probability outside [0, 1].
    #[error("probability for variable {var} is out of range: {value}")]
    ProbabilityOutOfRange { var: u32, value: String },

    /// A universe variable without an assigned probability.
    #[error("no probability given for variable {var}")]
    MissingProbability { var: u32 },

    /// A probability assigned to a variable outside the universe.
    #[error("probability given for variable {var}, which is not in the universe")]
    UnexpectedProbability { var: u32 },

    /// A variable id outside the circuit universe.
    #[error("variable {var} is not in the circuit universe")]
    UnknownVariable { var: u32 },

    /// An AND gate whose children share a variable.
    #[error("gate {gate} is not decomposable: its children share variables")]
    NotDecomposable { gate: usize },

    /// An OR gate with two children satisfied by the same assignment.
    #[error("gate {gate} is not deterministic: children overlap on {witness}")]
    DeterminismRefuted { gate: usize, witness: String },

    /// A structural precondition (smoothness, fan-in, var-set agreement)
    /// violated during a bottom-up pass.
    #[error("structure violation at gate {gate}: {message}")]
    StructureViolation { gate: usize, message: String },

    /// Serialization needs universes of the form {1, …, n}.
    #[error("circuit universe is not contiguous; cannot serialize")]
    NonContiguousUniverse,

    /// Interpolation grid construction failure.
    #[error("invalid interpolation grid: {0}")]
    InvalidGrid(String),

    /// Grid/value length mismatch handed to the Vandermonde solver.
    #[error("interpolation mismatch: {nodes} nodes but {values} values")]
    InterpolationMismatch { nodes: usize, values: usize },

    /// Coefficient function queried outside 1 ≤ k, 0 ≤ ℓ ≤ k−1.
    #[error("coefficient function undefined at (k = {k}, l = {l})")]
    CoefficientDomain { k: usize, l: usize },

    /// Custom coefficient table has no entry for a required pair.
    #[error("custom coefficient table has no entry for (k = {k}, l = {l})")]
    CustomTableMissing { k: usize, l: usize },

    /// Brute-force enumeration refused: too many variables.
    #[error("{what} supports at most {limit} variables, got {actual}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    /// The equal-probability path requires a uniform assignment.
    #[error("equal-probability method requires all variables to share one probability")]
    EqualProbabilityRequired,

    /// A method bound to one coefficient function got another.
    #[error("method requires the {expected} coefficient function, got {got}")]
    CoefficientMismatch { expected: &'static str, got: String },

    /// Exact-only computation requested in floating-point mode.
    #[error("float mode does not support the {method} method")]
    UnsupportedFloatMethod { method: &'static str },

    /// Two CSV files mapping to the same table name.
    #[error("duplicate table name {0:?} in data directory")]
    DuplicateTable(String),

    /// Table CSV without the mandatory `prob` column.
    #[error("table {table:?} has no `prob` column")]
    MissingProbColumn { table: String },

    /// Query atom arity differs from the table's data arity.
    #[error("atom over table {table:?} has {got} terms, table has {expected} data columns")]
    TableArity {
        table: String,
        expected: usize,
        got: usize,
    },

    /// Query references a table the database does not have.
    #[error("query references unknown table {0:?}")]
    UnknownTable(String),

    /// The same relation appears twice in a query (self-joins unsupported).
    #[error("table {0:?} appears twice in the query; self-joins are not supported")]
    SelfJoin(String),

    /// A filter over a variable no atom binds.
    #[error("filter references variable {0:?}, which no atom binds")]
    UnboundFilterVariable(String),

    /// Provenance monomials sharing a variable: no read-once circuit.
    #[error("provenance monomials share variable {var}; cannot build a decomposable circuit")]
    SharedMonomialVariable { var: u32 },

    /// CLI `--fact` label not present in the database.
    #[error("unknown fact {0:?}")]
    UnknownFact(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
