//! Matter-wave states: isotropic and anisotropic Bessel modes, the accelerating
//! superposition, Laguerre–Gauss modes, and their densities, currents and phases.

mod beam;
mod current;
mod field;
mod lg;
pub(crate) mod modes;

pub use beam::{energy_to_k, Dynamics, PhysicalBeam};
pub use current::{
    local_wavevector, probability_current, probability_density, sampled_current, Current,
    CurrentMap,
};
pub use field::{default_half_width, sample_wave, ComplexField, FieldHeader};
pub use lg::{eval_lg, laguerre, LGParams};
pub use modes::{
    arg_accel, envelope, eval_accel, eval_aniso, modal_weights, varphi, varphi_derivative,
    AccelPair, ModeParams, Wave, NATURAL_K, NATURAL_KZ,
};
