//! Archimedean spherical arrays: construction, volumes, sampling and
//! numerical checks of the projection property.

// NaN-rejecting comparisons are written as `!(a < b)` on purpose, and rule
// constants keep every published digit.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod array;
pub mod base;
pub mod error;
pub mod mesh;
pub mod numfmt;
pub mod rng;
pub mod scaling;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
