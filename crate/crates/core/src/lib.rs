pub mod cli;
pub mod error;
pub mod io;
pub mod matrix;
pub mod power;
pub mod range;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{cartesian_parts, CartesianPair, ComplexMatrix, HermitianSpectrum, C64};
