//! File formats, verification and the command line around `tcmm-core`.

pub mod algo;
pub mod circuits;
pub mod cli;
pub mod error;
pub mod matrices;
pub mod netlist;
pub mod scaling;
pub mod verify;

pub use error::{Result, ToolError};
