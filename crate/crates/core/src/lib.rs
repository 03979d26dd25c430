//! Bi-stable point wave absorber toolkit.
//!
//! Radiation-kernel identification, multiple-scales steady states, bifurcation
//! loci, time-domain simulation and design-map reporting for a heaving buoy with
//! a quartic double-well power take-off.

pub mod bifurcation;
pub mod config;
pub mod era;
pub mod error;
pub mod hydro;
pub mod mms;
pub mod numerics;
pub mod report;
pub mod simulator;

pub use error::{Error, Result};
pub use hydro::{BuoyGeometry, NondimParams, RadiationRealization, WaveInput};
