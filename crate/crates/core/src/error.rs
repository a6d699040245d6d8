use thiserror::Error;

use crate::group::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("table is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NonAssociative(Elem, Elem, Elem),
    #[error("element 0 is not a two-sided identity (fails at index {0})")]
    NoIdentity(Elem),
    #[error("table not closed: entry ({row},{col}) = {value} is not an element")]
    NotClosed { row: Elem, col: Elem, value: Elem },
    #[error("table is not a Latin square ({} {line} repeats an entry)", if *column { "column" } else { "row" })]
    NotLatin { line: Elem, column: bool },
    #[error("group order {order} exceeds the bound {bound}")]
    OrderBoundExceeded { order: usize, bound: usize },
    #[error("permutation degree {degree} exceeds the bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("subgroup {0} is not normal")]
    NotNormal(String),
    #[error("not an injective homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("malformed group: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{subgroup} is not a Sylow {p}-subgroup (order {order}, p-part {p_part})")]
    NotSylow { subgroup: String, p: u32, order: usize, p_part: usize },
    #[error("base group of order {order} is not a {p}-group")]
    NotPGroup { order: usize, p: u32 },
    #[error("fusion systems live on different base groups or primes")]
    MismatchedBase,
    #[error("morphism {0} does not map between subgroups of the base group")]
    ForeignMorphism(String),
    #[error("fusion system axiom violated: {0}")]
    Axiom(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("ball radius {radius} exceeds the bound {bound}")]
    RadiusBoundExceeded { radius: usize, bound: usize },
    #[error("malformed Alperin datum: {0}")]
    MalformedDatum(String),
    #[error("Alperin datum failed validation:\n{0}")]
    InvalidDatum(String),
    #[error("operation needs a {0} model")]
    WrongKind(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StableError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("degree {degree} exceeds the bound {bound}")]
    DegreeBoundExceeded { degree: usize, bound: usize },
    #[error("{0} is not elementary abelian")]
    NotElementaryAbelian(String),
    #[error("family is not compatible with the fusion morphisms: {0}")]
    IncompatibleFamily(String),
    #[error("malformed cohomology element: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}:{line}: {message}")]
pub struct ParseError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        ParseError { path: path.into(), line, message: message.into() }
    }
}

/// Failure to read or resolve one of the workbench text files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{path}: {source}")]
    Group { path: String, source: GroupError },
    #[error("{path}: {source}")]
    Fusion { path: String, source: FusionError },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error("{path}: {source}")]
    Stable { path: String, source: StableError },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("corpus manifest not found at {0}")]
    CorpusMissing(String),
}
