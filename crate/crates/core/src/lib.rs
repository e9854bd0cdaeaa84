// NaN must fail range checks, hence `!(a < b)` rather than `a >= b`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

pub mod config;
pub mod error;
pub mod greens;
pub mod grid;
pub mod potential;
pub mod spectra;
pub mod specfun;
pub mod units;

pub use error::{Error, Result};
