//! Hamiltonian cycles in the middle two levels of the odd-dimensional
//! hypercube, found through the reduced quotient graph on Catalan objects.
//!
//! The pipeline: canonical representatives ([`bits`]), dense 32-bit vertex
//! ranks ([`ranking`]), implicit adjacency and the brun decomposition
//! ([`graph`]), heuristic path search ([`search`]), then reversal, stitching
//! and lifting back to the cube ([`assembly`], [`lift`]).

pub mod assembly;
pub mod bits;
pub mod checkpoint;
pub mod counting;
pub mod error;
pub mod graph;
pub mod lift;
pub mod pathfile;
pub mod pipeline;
pub mod ranking;
pub mod search;

/// Exact count type used by the rank tables.
pub type Count = u64;
/// Intermediate type for table construction; products there exceed 64 bits.
pub type WideCount = u128;

pub use bits::{brun, canon, hc, BitString, CanonicalString, Params};
pub use error::{Error, Result};
pub use graph::{Part, PartSpec, View};
pub use ranking::{ClassRank, RankScope, Ranker};
