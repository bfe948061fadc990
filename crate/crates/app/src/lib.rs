//! Command line and HTTP front ends for the `morphsynth` engine.
//!
//! Both front ends go through [`solve`], so a request answered over HTTP and
//! the same request made on the command line produce identical results.

pub mod api;
pub mod cli;
pub mod error;
pub mod solve;
pub mod store;

pub use error::AppError;
