//! Open-system dynamics of a qubit coupled to several structured bosonic baths.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effh;
pub mod error;
pub mod oracle;
pub mod qcore;
pub mod quadrature;
pub mod rcmap;
pub mod redfield;
pub mod spectral;

pub use error::{Error, Result};
