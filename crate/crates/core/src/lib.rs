#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod forms;
pub mod geometry;
pub mod harness;
pub mod modular;
pub mod ncseries;
pub mod reciprocity;
pub mod regularization;
pub mod transport;

pub use error::{Error, Result};
