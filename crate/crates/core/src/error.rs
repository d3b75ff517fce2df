use thiserror::Error;

/// Errors raised by constructions and checkers in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group order {0}")]
    InvalidOrder(usize),

    #[error("capacity exceeded: {what} {requested} (maximum {max})")]
    Capacity {
        what: &'static str,
        requested: usize,
        max: usize,
    },

    #[error("group element {index} out of range for group of order {order}")]
    ElementOutOfRange { index: usize, order: usize },

    #[error("invalid operation table: {0}")]
    InvalidTable(String),

    #[error("level {requested} is beyond the materialized depth {materialized}")]
    Depth { requested: usize, materialized: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("level {level}: incoming edges of vertex {vertex} are not a permutation of r^-1(v)")]
    NotAPermutation { level: usize, vertex: usize },

    #[error("no lift of edge {edge} at level {level} ranging at upstairs vertex {vertex}")]
    NoLift {
        level: usize,
        vertex: usize,
        edge: usize,
    },

    #[error("{count} lifts of edge {edge} at level {level} ranging at upstairs vertex {vertex}")]
    AmbiguousLift {
        level: usize,
        vertex: usize,
        edge: usize,
        count: usize,
    },

    #[error("invalid morphism: {0}")]
    Morphism(String),

    #[error("labelling has no value for edge {edge} at level {level}")]
    LabellingIncomplete { level: usize, edge: usize },

    #[error("cohomology relation fails on edge {edge} at level {level}")]
    Cohomology { level: usize, edge: usize },

    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),

    #[error("no valid seed: {0}")]
    Seed(String),

    #[error("action is not free: element {element} fixes {kind} {index} at level {level}")]
    NotFree {
        element: usize,
        kind: &'static str,
        level: usize,
        index: usize,
    },

    #[error("order does not descend to the quotient at level {level}, edge {edge}")]
    OrderDescent { level: usize, edge: usize },

    #[error("mode error: {0}")]
    Mode(String),

    #[error("tripling: {0}")]
    Tripling(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
