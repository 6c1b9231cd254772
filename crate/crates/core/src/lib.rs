//! Exact enumeration of edge lattice animals in Z^d by edge count and
//! perimeter, with the surrounding machinery: explicit constructions and the
//! concatenation operation, bond-percolation sampling from the origin, and
//! the rate functions and finite-size probes built on the census.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod census;
pub mod constructions;
pub mod error;
pub mod lattice;
pub mod percolation;
pub mod ratio;
pub mod report;

pub use error::{Error, Result};
