//! Exact rational machinery for open-closed homotopy algebras.

pub mod error;
pub mod exactlinalg;
pub mod graded;
pub mod hochschild;
pub mod scoalgebra;
pub mod transfer;
pub mod cobar;
pub mod swisscheese;
pub mod cli;

pub use error::{Error, Result};
