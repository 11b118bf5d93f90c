//! Inconsistency of pairwise comparison matrices and minimal-modification repair.
//!
//! - [`pcm`]: the matrix model, log-space view, triads, distance and text formats.
//! - [`indices`]: CR, CM and CI with their threshold transforms.
//! - [`convex`]: continuous subproblems with a fixed set of free cells.
//! - [`reduce`]: the 0-1 layer. Fewest changes below a threshold, lowest
//!   index under a change budget, all optimal change sets, and a Big-M
//!   branch-and-bound cross-check.

pub mod convex;
pub mod error;
pub mod fixtures;
pub mod indices;
pub mod pcm;
pub mod reduce;

pub use error::{Error, Result};
pub use indices::{IndexKind, IndexReport, RandomIndexTable};
pub use pcm::{ComparisonMatrix, LogMatrix, Position, ScaleBound, TriadIndex};

#[cfg(test)]
mod properties;
