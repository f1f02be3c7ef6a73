#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod complexmat;
pub mod decompose;
pub mod error;
pub mod powerbound;
pub mod report;
pub mod riesz;
pub mod spectrum;

pub use complexmat::{c64, Matrix, Scalar};
pub use error::{Error, Result};
