//! Boundary control of the heat equation on a half-plane through a point
//! Neumann source, reduced to radial profiles on the half-line.
//!
//! The pipeline: a target plane field is stored through its radial profile
//! ([`radial`]), expanded in a Laguerre basis ([`basis`]), turned into a
//! piecewise-constant control ([`control`]), and checked by evaluating the
//! heat flow it produces ([`heat`]). [`transform`] carries the Hankel-type
//! transform that links all of these.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod control;
pub mod error;
pub mod heat;
pub mod radial;
pub mod serde_num;
pub mod special;
pub mod transform;
pub mod xprec;

pub use error::{Error, Result};
