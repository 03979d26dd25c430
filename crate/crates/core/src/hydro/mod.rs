//! Radiation kernel, wave forcing and the nondimensional parameter set.

mod kernel;
mod params;

pub use kernel::{
    impulse_response, ogilvie_impulse, radiation_damping, KernelConstants, RadiationRealization,
};
pub use params::{
    nondimensionalize, wave_force, BuoyGeometry, Circuit, Nondimensional, NondimParams, Stiffness,
    WaveInput, XiConvention,
};
