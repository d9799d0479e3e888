//! Glauber dynamics over the partial matchings of a graph, used as a
//! randomized maximum-matching heuristic, together with exact state-space
//! oracles that check its stationary law, reversibility, mixing behaviour,
//! conductance and the behaviour of two couplings.
//!
//! * [`graph`]: canonical simple graphs, generators, edge-list I/O.
//! * [`matching`], [`enumerate`], [`maxmatch`]: matching state, exhaustive
//!   enumeration, exact maximum matching.
//! * [`chain`]: the single-edge update, the randomized solver and its
//!   amplified form, bound calculators.
//! * [`analysis`]: Gibbs vector, kernel, mixing time, conductance.
//! * [`coupling`]: coupled pairs, contraction and marginal sweeps.
//! * [`bench`]: throughput measurements.

pub mod analysis;
pub mod bench;
pub mod chain;
pub mod coupling;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod matching;
pub mod maxmatch;

pub use chain::{amplified_solve, claimed_bounds, rand_matching, ChainParams, RunReport};
pub use error::{Error, Result};
pub use graph::{generate, read_graph, write_graph, EdgeId, Family, Graph, VertexId};
pub use matching::{phi, Matching};
pub use maxmatch::exact_max_matching;
