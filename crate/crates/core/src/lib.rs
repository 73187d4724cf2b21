// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod born;
pub mod error;
pub mod geometry;
pub mod method;
pub mod oracles;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
