//! Exact computation of dual Schubert and Postnikov-Stanley polynomials,
//! their supports and Newton polytopes, M-convexity and single-chain checks,
//! and the staircase-tiling description of Newton polytope vertices.

pub mod bruhat;
pub mod error;
mod lp;
pub mod perm;
pub mod poly;
pub mod polytope;
pub mod scnp;
pub mod tiling;

pub use error::{Error, Result};
pub use perm::{InversionPair, Permutation};
