use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid taxon name {0:?}")]
    InvalidTaxon(String),

    #[error("duplicate taxon {0:?}")]
    DuplicateTaxon(String),

    /// A graph failed the degree, labeling or acyclicity rules.
    #[error("structural violation: {0}")]
    Structure(String),

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("taxon sets differ: {0}")]
    TaxonMismatch(String),

    /// A configured search or state budget would be exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("strings are not the lineage taxon strings of a line tree: {0}")]
    NotLineTreeProfile(String),

    #[error("tree is not the line tree of a permutation: {0}")]
    NotInImage(String),

    #[error("ordering conditions violated: {0}")]
    Conditions(String),

    #[error("ordering falls in the wrong case: {0}")]
    WrongCase(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    /// A checked mathematical invariant failed. Indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
