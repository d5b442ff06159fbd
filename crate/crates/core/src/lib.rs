//! Affine-isometric style representations of SU(1,1) on infinite-dimensional
//! complex hyperbolic spaces, built from closed-form kernels.
//!
//! The crate covers finite-dimensional hyperbolic geometry (`hypgeo`), the
//! group SU(1,1) and its maps to SL(2,R) and SO(2,1) (`su11`), formal vector
//! spaces with Hermitian kernels (`kernelspace`), the block operator model
//! (`blockrep`), the classifying invariants (`invariants`), horospherical
//! combination of models (`horocomb`) and named verification suites (`verify`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blockrep;
pub mod error;
pub mod horocomb;
pub mod hypgeo;
pub mod invariants;
pub mod kernelspace;
pub mod rational;
pub mod su11;
pub mod verify;

pub use error::{Error, Result};
