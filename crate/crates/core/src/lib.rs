// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distributions;
pub mod error;
pub mod mellin;
pub mod models;
pub mod moments;
pub mod montecarlo;
pub mod optim;
pub mod pce;
pub mod poly;
pub mod quad;
pub mod reconstruct;
pub mod specfun;
pub mod unscented;

pub use distributions::Distribution;
pub use error::{Error, Result};
