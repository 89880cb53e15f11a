//! Non-Hermitian tight-binding chains with a non-reciprocal hopping phase:
//! potential generators, Hamiltonian assembly, a dense complex eigensolver
//! and localization diagnostics.

// `!(x > 0.0)` guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod eig;
pub mod error;
pub mod exp;
pub mod ham;
pub mod lattice;
pub mod obs;
pub mod toy;

pub use error::{Error, Result};
