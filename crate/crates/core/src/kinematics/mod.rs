//! Rotation, angular velocity and angular acceleration of the petal pattern,
//! and probability-flux trajectories.

mod flux;

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::wavefield::AccelPair;

pub use flux::{trace_flux_lines, write_trajectories_csv, FluxOptions, Trajectory};

/// Rotation law Φ(z) = −(1/ℓ) arctan(((1+D)/(1−D)) tan(Δk_z z + φ0)), unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationLaw {
    pub ell: u32,
    #[serde(rename = "D")]
    pub d: f64,
    pub dkz: f64,
    pub phi0: f64,
}

/// Continuous arctan(q tan x): the branch advances by π each time x crosses an
/// odd multiple of π/2.
pub(crate) fn unwrapped_atan_tan(q: f64, x: f64) -> f64 {
    let n = (x / PI).round();
    let t = x - n * PI;
    (q * t.sin()).atan2(t.cos()) + n * PI
}

impl RotationLaw {
    pub fn new(ell: u32, d: f64, dkz: f64, phi0: f64) -> Result<Self> {
        let law = Self { ell, d, dkz, phi0 };
        law.validate()?;
        Ok(law)
    }

    /// Law of an accelerating pair, with no offset.
    pub fn from_pair(pair: &AccelPair) -> Result<Self> {
        Self::new(pair.ell, pair.d, pair.dkz(), 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::domain("rotation law needs ℓ ≥ 1"));
        }
        if !(0.0..1.0).contains(&self.d) {
            return Err(Error::domain(format!(
                "rotation law needs 0 ≤ D < 1, got {}",
                self.d
            )));
        }
        if self.dkz == 0.0 || !self.dkz.is_finite() {
            return Err(Error::domain("rotation law needs Δk_z ≠ 0"));
        }
        if !self.phi0.is_finite() {
            return Err(Error::domain("offset must be finite"));
        }
        Ok(())
    }

    fn q(&self) -> f64 {
        (1.0 + self.d) / (1.0 - self.d)
    }

    fn arg(&self, z: f64) -> f64 {
        self.dkz * z + self.phi0
    }

    /// One full petal period along z, π/|Δk_z|.
    pub fn period(&self) -> f64 {
        PI / self.dkz.abs()
    }

    pub fn rotation(&self, z: f64) -> f64 {
        -unwrapped_atan_tan(self.q(), self.arg(z)) / f64::from(self.ell)
    }

    pub fn angular_velocity(&self, z: f64) -> f64 {
        let d = self.d;
        let c = (2.0 * self.arg(z)).cos();
        -(self.dkz / f64::from(self.ell)) * (1.0 - d * d) / (1.0 + d * d - 2.0 * d * c)
    }

    pub fn angular_acceleration(&self, z: f64) -> f64 {
        let d = self.d;
        let x = 2.0 * self.arg(z);
        let den = 1.0 + d * d - 2.0 * d * x.cos();
        -(self.dkz * self.dkz / f64::from(self.ell)) * 4.0 * d * (d * d - 1.0) * x.sin()
            / (den * den)
    }

    /// Rows (z, Φ, ∂Φ, ∂²Φ).
    pub fn curves(&self, z: &[f64]) -> Vec<Vec<f64>> {
        z.iter()
            .map(|&z| {
                vec![
                    z,
                    self.rotation(z),
                    self.angular_velocity(z),
                    self.angular_acceleration(z),
                ]
            })
            .collect()
    }

    pub fn write_curves_csv(&self, path: &Path, z: &[f64]) -> Result<()> {
        io::write_csv_table(path, &["z", "Phi", "dPhi", "d2Phi"], &self.curves(z))
    }
}

/// Checked Φ(z).
pub fn rotation(law: &RotationLaw, z: f64) -> Result<f64> {
    law.validate()?;
    Ok(law.rotation(z))
}

/// Checked ∂_zΦ.
pub fn angular_velocity(law: &RotationLaw, z: f64) -> Result<f64> {
    law.validate()?;
    Ok(law.angular_velocity(z))
}

/// Checked ∂²_zΦ.
pub fn angular_acceleration(law: &RotationLaw, z: f64) -> Result<f64> {
    law.validate()?;
    Ok(law.angular_acceleration(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_rotation_is_linear() {
        let law = RotationLaw::new(2, 0.0, 0.3, 0.0).unwrap();
        for i in -50..50 {
            let z = 0.37 * i as f64;
            assert!((law.rotation(z) + 0.3 * z / 2.0).abs() < 1e-13);
            assert!((law.angular_velocity(z) + 0.15).abs() < 1e-15);
            assert_eq!(law.angular_acceleration(z), 0.0);
        }
    }

    #[test]
    fn worked_values() {
        let law = RotationLaw::new(1, 0.510, 1.0, 0.0).unwrap();
        let v = law.rotation(PI / 4.0);
        assert!((v + (1.51f64 / 0.49).atan()).abs() < 1e-15);
        assert!((v + 1.257).abs() < 1e-3);
        assert!((law.angular_velocity(0.0) + 1.51 / 0.49).abs() < 1e-14);
        assert!((law.angular_velocity(0.0) + 3.0816).abs() < 1e-4);
        assert_eq!(law.rotation(0.0), 0.0);
        assert_eq!(law.angular_acceleration(0.0), 0.0);
    }

    #[test]
    fn speed_ratio() {
        let law = RotationLaw::new(1, 0.325, 0.7, 0.0).unwrap();
        let fast = law.angular_velocity(0.0).abs();
        let slow = law.angular_velocity(law.period() / 2.0).abs();
        assert!((fast / slow - (1.325f64 / 0.675).powi(2)).abs() < 1e-12);
        assert!((fast / slow - 3.853).abs() < 1e-3);
    }

    #[test]
    fn one_period_turns_by_pi_over_ell() {
        for d in [0.0, 0.158, 0.325, 0.51, 0.9] {
            for ell in 1..4 {
                let law = RotationLaw::new(ell, d, 0.2, 0.1).unwrap();
                for z in [-7.0, 0.0, 3.3] {
                    let diff = law.rotation(z + law.period()) - law.rotation(z);
                    assert!((diff + PI / f64::from(ell)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn accelerates_then_decelerates() {
        let law = RotationLaw::new(1, 0.5, 1.0, 0.0).unwrap();
        let h = law.period() / 2.0;
        let a1 = law.angular_acceleration(0.5 * h);
        let a2 = law.angular_acceleration(1.5 * h);
        let a3 = law.angular_acceleration(2.5 * h);
        assert!(a1 * a2 < 0.0 && a2 * a3 < 0.0);
        assert!(law.angular_acceleration(h).abs() < 1e-12);
        // |∂Φ| falls over the first half period and recovers over the second.
        assert!(law.angular_velocity(0.5 * h).abs() > law.angular_velocity(0.9 * h).abs());
        assert!(law.angular_velocity(1.5 * h).abs() > law.angular_velocity(1.1 * h).abs());
    }

    #[test]
    fn rejects_balanced_and_static_laws() {
        assert!(RotationLaw::new(1, 1.0, 1.0, 0.0).is_err());
        assert!(RotationLaw::new(1, 0.5, 0.0, 0.0).is_err());
        assert!(RotationLaw::new(0, 0.5, 1.0, 0.0).is_err());
        let bad = RotationLaw {
            ell: 1,
            d: 1.0,
            dkz: 1.0,
            phi0: 0.0,
        };
        assert!(rotation(&bad, 0.0).is_err());
        assert!(angular_velocity(&bad, 0.0).is_err());
        assert!(angular_acceleration(&bad, 0.0).is_err());
    }

    #[test]
    fn curves_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let law = RotationLaw::new(1, 0.3, 1.0, 0.0).unwrap();
        law.write_curves_csv(&p, &[0.0, 0.5, 1.0]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("z,Phi,dPhi,d2Phi\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
