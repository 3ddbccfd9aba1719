pub mod commutator;
pub mod czd;
pub mod error;
pub mod grid;
pub mod harness;
pub mod kernels;
pub mod microlocal;
pub mod quad;

pub use error::{CzError, Result};
