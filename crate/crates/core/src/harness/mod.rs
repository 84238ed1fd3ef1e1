//! Experiment drivers and file formats.

pub mod config;
pub mod convergence;
pub mod evolution;
pub mod initial;
pub mod render;
pub mod scales;
pub mod spectrum;
