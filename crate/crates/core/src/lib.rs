//! Spectral solvers for the multi-length-scale phase-field crystal model.
//!
//! Quasiperiodic order parameters are stored as Fourier coefficients on a
//! higher-dimensional lattice ([`lattice`], [`field`]). The Allen–Cahn flow of
//! the rescaled energy ([`model`]) is integrated by a linear, unconditionally
//! energy-stable SAV/Crank–Nicolson stepper ([`sav_cn`]) whose accuracy can be
//! lifted to fourth order by spectral deferred correction ([`sdc`]).
//! [`harness`] holds the experiment drivers behind the `ipfc` binary.

pub mod error;
pub mod field;
pub mod harness;
pub mod lattice;
pub mod model;
pub mod sav_cn;
pub mod sdc;

pub use error::{Error, Result};
pub use field::{FieldDump, PhysicalField, SpectralField, SpectralSpace};
pub use lattice::{build_grid, build_symbol, IndexGrid, OperatorSymbol, ProjectionSpec};
pub use model::{ModelParams, Problem};
pub use sav_cn::{StepReport, StepperState};
