use thiserror::Error;

/// Errors raised by the engine. Every variant is a domain error: malformed
/// input or a request the algebra cannot answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("cannot combine chains over different rings ({left} and {right})")]
    MixedRings { left: String, right: String },

    #[error("cannot combine elements of different spaces ({left} and {right})")]
    MixedSpaces { left: String, right: String },

    #[error("chain {0} is not homogeneous")]
    NotHomogeneous(String),

    #[error("morphism {index} does not compose with morphism {next}")]
    NotComposable { index: usize, next: usize },

    #[error("malformed morphism: {0}")]
    MalformedMorphism(String),

    #[error("unsupported space {space}: {reason}")]
    UnsupportedSpace { space: String, reason: String },

    #[error("no bracket expression evaluates to a nonzero multiple of the contractible class")]
    ContractibleTarget,

    #[error("{coefficient}·{class} is not in the derived subalgebra")]
    NotInDerived { coefficient: i64, class: String },

    #[error("missing oracle entry for [{left}, {right}]")]
    MissingOracleEntry { left: String, right: String },

    #[error("invalid oracle table: {0}")]
    InvalidOracle(String),

    #[error("product {0} is not determined by the presentation")]
    UnsupportedProduct(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
