//! Quantum statistical speeds and optical response of driven atomic media.
//!
//! Two models are covered: a four-level ladder generating the sum frequency
//! 2ω + ω_s (third-order susceptibility χ⁽³⁾), and a three-level medium
//! probed at that frequency under electromagnetically induced transparency
//! (linear susceptibility χ⁽¹⁾). For a single atom of either medium the
//! crate computes the quantum Fisher information and the Hilbert-Schmidt
//! speed with respect to the driving frequencies, sweeps parameters, and
//! detects where extrema of these curves line up with features of the
//! susceptibilities.
//!
//! Units are reduced (ħ = ε₀ = c = 1 unless [`optics::PhysicalConstants`]
//! says otherwise).

pub mod atom;
pub mod config;
pub mod error;
pub mod features;
pub mod optics;
pub mod params;
pub mod presets;
pub mod report;
pub mod scan;
pub mod speed;

pub use atom::{AtomState, DampingMode};
pub use error::{Error, Result};
pub use params::{FourLevelParams, Model, ModelParams, Param, ThreeLevelParams};
pub use scan::{run_scan, Grid, Quantity, ScanResult, ScanSpec};
pub use speed::{DiffConfig, DiffMethod, ParamFamily};
