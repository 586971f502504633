//! Dyadic-like trees, the associated maximal operator, and the extremal
//! constructions that show its Hardy-type bound is sharp.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a < b)` also rejects NaN

pub mod bellman;
pub mod bisect;
pub mod error;
pub mod extremal;
pub mod maximal;
pub mod norms;
pub mod profile;
pub mod quadrature;
pub mod tree;

pub use error::{Error, Result};
