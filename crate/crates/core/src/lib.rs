//! Ordered Bratteli diagrams, group-labelled skew products, tripling and
//! quotients by free group actions.

pub mod cli;
pub mod diagram;
pub mod error;
pub mod groups;
pub mod labelling;
pub mod ordering;
pub mod substitution;
pub mod tripling;

pub use diagram::{BratteliDiagram, DiagramMorphism, Edge, LiftingVerdict, Path, Simplicity};
pub use error::{Error, Result};
pub use groups::{FiniteGroup, GroupElement};
pub use ordering::{OrderedBratteliDiagram, Step};
