//! Classical fields sourced by the beam's charge and current densities, and
//! the radial Poynting diagnostic.

mod bessel;
mod lg;
mod radiation;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, E_CHARGE, MU_0};
use crate::error::{Error, Result};
use crate::io;

pub use bessel::{bessel_bracket, bessel_em, bessel_er_expanded};
pub use lg::{lg_bz_closed_form, lg_density, lg_em, lg_er_closed_form, lg_er_quadrature};
pub use radiation::{radiated_power_check, sample_cylinder, CylinderSample, RadiationReport};

/// Electrons per unit length along the beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineDensity {
    pub eta: f64,
}

impl LineDensity {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::domain(format!(
                "line density must be > 0, got {eta}"
            )));
        }
        Ok(Self { eta })
    }

    /// η = I/(e v) for a beam current I [A] at speed v [m/s].
    pub fn from_current(current: f64, velocity: f64) -> Result<Self> {
        if !(velocity > 0.0 && velocity < C_LIGHT) {
            return Err(Error::domain("speed must lie in (0, c)"));
        }
        Self::new(current / (E_CHARGE * velocity))
    }

    /// Line charge λ = η e [C/m].
    pub fn lambda(&self) -> f64 {
        self.eta * E_CHARGE
    }
}

/// Field components and Poynting vector at one radius (SI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EMSample {
    pub r: f64,
    pub e_r: f64,
    pub b_phi: f64,
    pub b_z: f64,
    pub s_r: f64,
    pub s_phi: f64,
    pub s_z: f64,
}

impl EMSample {
    pub(crate) fn from_fields(r: f64, e_r: f64, b_phi: f64, b_z: f64) -> Self {
        let (s_r, s_phi, s_z) = poynting(e_r, b_phi, b_z);
        Self {
            r,
            e_r,
            b_phi,
            b_z,
            s_r,
            s_phi,
            s_z,
        }
    }

    pub fn row(&self) -> Vec<f64> {
        vec![
            self.r, self.e_r, self.b_phi, self.b_z, self.s_r, self.s_phi, self.s_z,
        ]
    }
}

/// (E × B)/μ0 for vectors given in any right-handed orthonormal frame.
pub fn cross_over_mu0(e: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        (e[1] * b[2] - e[2] * b[1]) / MU_0,
        (e[2] * b[0] - e[0] * b[2]) / MU_0,
        (e[0] * b[1] - e[1] * b[0]) / MU_0,
    ]
}

/// Poynting vector (S_r, S_φ, S_z) of E = E_r r̂ and B = B_φ φ̂ + B_z ẑ.
pub fn poynting(e_r: f64, b_phi: f64, b_z: f64) -> (f64, f64, f64) {
    let s = cross_over_mu0([e_r, 0.0, 0.0], [0.0, b_phi, b_z]);
    (s[0], s[1], s[2])
}

/// Header written next to a field-profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileHeader {
    pub beam: String,
    pub eta: f64,
    pub ell: i32,
    pub k: f64,
    pub kr: Option<f64>,
    pub kz: Option<f64>,
    pub p: Option<u32>,
    pub w0: Option<f64>,
    pub z: Option<f64>,
    pub units: ProfileUnits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileUnits {
    pub r: String,
    pub e: String,
    pub b: String,
    pub s: String,
}

impl Default for ProfileUnits {
    fn default() -> Self {
        Self {
            r: "m".into(),
            e: "V/m".into(),
            b: "T".into(),
            s: "W/m^2".into(),
        }
    }
}

/// CSV (r, E_r, B_phi, B_z, S_r, S_phi, S_z) plus a JSON header at `path` with `.json`.
pub fn write_profile(path: &Path, header: &ProfileHeader, samples: &[EMSample]) -> Result<()> {
    let rows: Vec<Vec<f64>> = samples.iter().map(EMSample::row).collect();
    io::write_csv_table(
        path,
        &["r", "E_r", "B_phi", "B_z", "S_r", "S_phi", "S_z"],
        &rows,
    )?;
    io::write_json(&path.with_extension("json"), header)
}
