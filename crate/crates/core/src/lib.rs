//! Quantum walks on integer lattices: simulation, generating functions and
//! the geometry of their asymptotics.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod kernel;
pub mod pipelines;
pub mod simulator;
pub mod tolerances;
pub mod torus;
pub mod walkmodel;

pub use error::{QrwError, Result};
pub use tolerances::Tolerances;
pub use walkmodel::{CoinMatrix, WalkSpec};
