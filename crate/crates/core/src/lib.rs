//! Tree-child phylogenetic networks and shortest common supersequences.

pub mod cli;
pub mod construct;
pub mod error;
pub mod golden;
pub mod graph;
pub mod instance;
pub mod lts;
pub mod model;
pub mod newick;
pub mod reduction;
pub mod scs;
pub mod solver;
pub mod taxon;

pub use error::{Error, Result};
pub use graph::Dag;
pub use model::{BinaryTree, NodeId, NodeKind, PhyloNetwork};
pub use taxon::{Taxon, TaxonSet, Word};
