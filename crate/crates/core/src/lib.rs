#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod field;
pub mod lab;
pub mod project;
pub mod quasimode;
pub mod spectra;

pub use error::{Error, Result};
