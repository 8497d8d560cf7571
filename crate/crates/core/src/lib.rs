//! Composite pulse sequences on a driven two-level system.
//!
//! The crate builds the standard composite-pulse families (broadband,
//! narrowband, passband, universal, and partial-transfer theta pulses),
//! evaluates their excitation profiles over Rabi-frequency error and
//! detuning grids, re-derives composite phases numerically by cancelling
//! derivative terms of the sequence propagator, and models T1/T2 decay
//! plus readout error on top of the ideal unitary evolution.

pub mod cli;
pub mod error;
pub mod noise;
pub mod scan;
pub mod sequences;
pub mod solver;
pub mod su2;
pub mod svg;
pub mod tables;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
