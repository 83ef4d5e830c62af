//! Crate-wide error type.

use std::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Which direction of the encryption oracle a query (or budget) refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    /// Encryption query (plaintext in, ciphertext out).
    Enc,
    /// Decryption query (ciphertext in, plaintext out).
    Dec,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryKind::Enc => write!(f, "enc"),
            QueryKind::Dec => write!(f, "dec"),
        }
    }
}

/// Why a candidate bilinear product failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductDefect {
    /// Some translation-like map `x -> x + x*a` is singular; the witness is
    /// the offending `a` (reported as a bitstring, coordinate x_1 first).
    NotRegular { witness: String },
    /// Associativity fails on the basis triple `(e_i, e_j, e_k)` (1-based).
    NotAssociative { i: usize, j: usize, k: usize },
}

impl fmt::Display for ProductDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductDefect::NotRegular { witness } => {
                write!(f, "non-regular: x -> x + x*a is singular at a = {witness}")
            }
            ProductDefect::NotAssociative { i, j, k } => {
                write!(f, "associativity fails on basis triple (e_{i}, e_{j}, e_{k})")
            }
        }
    }
}

/// All errors surfaced by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed textual input (file formats, hex blocks, ids).
    #[error("parse error: {0}")]
    Parse(String),

    /// A value was syntactically fine but semantically out of range.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A candidate product table does not define a valid hidden sum.
    #[error("product validation failed: {0}")]
    InvalidProduct(ProductDefect),

    /// The requested vectors do not form a basis under the hidden sum.
    #[error("vectors are not a basis under the hidden sum")]
    NotABasis,

    /// A matrix that had to be invertible was singular.
    #[error("singular matrix")]
    Singular,

    /// Exhaustive enumeration was requested for a width where it is
    /// intentionally refused unless forced.
    #[error("exhaustive enumeration refused at width {width} (2^{bits} candidates); pass force to override")]
    ExhaustiveRefused { width: u8, bits: u32 },

    /// Sampled enumeration is not implemented for this width.
    #[error("sampled enumeration unsupported at width {0} (supported: 3, 4, 5)")]
    SampledUnsupported(u8),

    /// A proven lower bound was violated by an observed value: this indicates
    /// a bug (or a falsified claim) and is always fatal.
    #[error("bound violated: delta = {delta} < bound = {bound} ({detail})")]
    BoundViolation { delta: u32, bound: u32, detail: String },

    /// An oracle query was refused because the session budget ran out.
    #[error("{kind} query budget exhausted ({used}/{budget} used)")]
    BudgetExhausted { kind: QueryKind, used: u64, budget: u64 },

    /// The remote oracle replied with something outside the wire protocol.
    #[error("protocol error: {0}")]
    Protocol(String),

    /// Underlying socket or file I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
