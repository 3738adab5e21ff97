pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod model;
pub mod network;
pub mod oracle;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
