//! Physical constants (CODATA 2018, SI).

/// Elementary charge [C].
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Electron rest mass [kg].
pub const M_ELECTRON: f64 = 9.109_383_701_5e-31;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light [m/s].
pub const C_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity [F/m].
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability [N/A^2].
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Bohr magneton eħ/2m [J/T].
pub const MU_B: f64 = E_CHARGE * HBAR / (2.0 * M_ELECTRON);

/// Bundle of the constants used by the field solvers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysConstants {
    pub e: f64,
    pub m_e: f64,
    pub hbar: f64,
    pub epsilon_0: f64,
    pub mu_0: f64,
    pub mu_b: f64,
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self {
            e: E_CHARGE,
            m_e: M_ELECTRON,
            hbar: HBAR,
            epsilon_0: EPSILON_0,
            mu_0: MU_0,
            mu_b: MU_B,
        }
    }
}
