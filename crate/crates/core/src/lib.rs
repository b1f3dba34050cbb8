//! Exact verification of geodesically compatible metric/operator pairs and
//! the Poisson pencils of hydrodynamic type they generate.

// Index loops mirror the tensor formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod ratfun;

pub use error::{Error, Result};
pub mod tensor;
pub mod nijenhuis;
pub mod geodesic;
pub mod corpus;
pub mod hydro;
pub mod sim;
pub mod cli;
