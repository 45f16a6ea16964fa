//! Tiling and cover numbers of finite graphs and step graphons.
//!
//! The crate computes fractional tilings (nonnegative weights on homomorphic
//! copies of a pattern with load at most one at every vertex), fractional
//! covers (vertex weights that put total weight at least one on every copy),
//! integer and robust tiling numbers, and their measure-weighted analogues on
//! step graphons. It also samples inhomogeneous random graphs `G(n, W)` to
//! compare their normalized fractional tiling numbers with the graphon value.

pub mod error;
pub mod graph;
pub mod graphon;
pub mod lp;
pub mod numfmt;
pub mod random;
pub mod tiling;

pub use error::{Error, Result};
pub use graph::{enumerate_homs, enumerate_injective_copies, Graph, Pattern, PatternCopy};
