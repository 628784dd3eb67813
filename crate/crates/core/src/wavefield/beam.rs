//! Electron beam energy to wavenumber.

use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, E_CHARGE, HBAR, M_ELECTRON};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    #[default]
    Nonrelativistic,
    Relativistic,
}

/// Electron kinetic energy and the dispersion relation used to convert it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalBeam {
    pub energy_ev: f64,
    pub mode: Dynamics,
}

impl PhysicalBeam {
    pub fn new(energy_ev: f64, mode: Dynamics) -> Result<Self> {
        if !(energy_ev > 0.0 && energy_ev.is_finite()) {
            return Err(Error::domain(format!(
                "beam energy must be > 0 eV, got {energy_ev}"
            )));
        }
        Ok(Self { energy_ev, mode })
    }

    /// Total wavenumber [1/m].
    pub fn k(&self) -> f64 {
        let e = self.energy_ev * E_CHARGE;
        match self.mode {
            Dynamics::Nonrelativistic => (2.0 * M_ELECTRON * e).sqrt() / HBAR,
            Dynamics::Relativistic => {
                let mc2 = M_ELECTRON * C_LIGHT * C_LIGHT;
                (e * e + 2.0 * e * mc2).sqrt() / (HBAR * C_LIGHT)
            }
        }
    }

    /// de Broglie wavelength [m].
    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k()
    }

    /// Electron speed [m/s].
    pub fn velocity(&self) -> f64 {
        let e = self.energy_ev * E_CHARGE;
        match self.mode {
            Dynamics::Nonrelativistic => (2.0 * e / M_ELECTRON).sqrt(),
            Dynamics::Relativistic => {
                let mc2 = M_ELECTRON * C_LIGHT * C_LIGHT;
                let gamma = 1.0 + e / mc2;
                C_LIGHT * (1.0 - 1.0 / (gamma * gamma)).sqrt()
            }
        }
    }
}

/// Wavenumber of an electron beam.
pub fn energy_to_k(beam: &PhysicalBeam) -> Result<f64> {
    PhysicalBeam::new(beam.energy_ev, beam.mode)?;
    Ok(beam.k())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrupling_energy_doubles_k() {
        let a = energy_to_k(&PhysicalBeam::new(1e4, Dynamics::Nonrelativistic).unwrap()).unwrap();
        let b = energy_to_k(&PhysicalBeam::new(4e4, Dynamics::Nonrelativistic).unwrap()).unwrap();
        assert!((b / a - 2.0).abs() < 1e-15);
    }

    #[test]
    fn three_hundred_kev() {
        let nr = PhysicalBeam::new(3e5, Dynamics::Nonrelativistic).unwrap();
        let oracle =
            (2.0 * 9.109_383_701_5e-31 * 3e5 * 1.602_176_634e-19f64).sqrt() / 1.054_571_817e-34;
        assert!((nr.k() / oracle - 1.0).abs() < 1e-15);
        assert!((nr.k() - 2.806_074e12).abs() / 2.806_074e12 < 1e-6);
        let rel = PhysicalBeam::new(3e5, Dynamics::Relativistic).unwrap();
        assert!(rel.k() > nr.k());
        // 1.968749 pm at 300 kV
        assert!((rel.wavelength() - 1.968_749e-12).abs() < 1e-18);
        assert!(rel.velocity() < C_LIGHT && rel.velocity() > 0.77 * C_LIGHT);
    }

    #[test]
    fn rejects_nonpositive_energy() {
        assert!(PhysicalBeam::new(0.0, Dynamics::Relativistic).is_err());
        let bad = PhysicalBeam {
            energy_ev: -1.0,
            mode: Dynamics::Nonrelativistic,
        };
        assert!(energy_to_k(&bad).is_err());
    }
}
