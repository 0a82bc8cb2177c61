//! IO, configuration, parallel drivers and the command-line workflows around
//! the numerical core.

pub use fkpp_core as core;

pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod workflows;
