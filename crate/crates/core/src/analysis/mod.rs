//! Measurement pipeline: per-frame rotation registration, fit of the rotation
//! law, and kinematic curves evaluated from the fitted parameters.

mod fit;
mod registration;

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::kinematics::RotationLaw;
use crate::propagation::{encoded_law, FocalStack};

pub use fit::{
    fit_phase_offset, fit_rotation_curve, fit_rotation_curve_with, FitControl, FitResult, D_MAX,
};
pub use registration::{
    measure_rotation, unwrap_angles, Center, Image, RegistrationOptions, Rotation,
};

/// Registration radius in units of 1/k_r1.
pub const REGISTRATION_RADIUS: f64 = 2.0;

/// Unwrapped rotation angles relative to the reference plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationSeries {
    pub z_values: Vec<f64>,
    pub angles: Vec<f64>,
    pub reference_index: usize,
    pub uncertainties: Vec<f64>,
}

impl RotationSeries {
    pub fn new(
        z_values: Vec<f64>,
        angles: Vec<f64>,
        reference_index: usize,
        uncertainties: Vec<f64>,
    ) -> Result<Self> {
        let s = Self {
            z_values,
            angles,
            reference_index,
            uncertainties,
        };
        if s.z_values.len() != s.angles.len() || s.z_values.len() != s.uncertainties.len() {
            return Err(Error::config(
                "z, angle and uncertainty lists differ in length",
            ));
        }
        if s.z_values.is_empty() || s.reference_index >= s.z_values.len() {
            return Err(Error::config("reference index outside the series"));
        }
        if s.z_values.iter().chain(&s.angles).any(|v| !v.is_finite()) {
            return Err(Error::domain("series holds non-finite values"));
        }
        Ok(s)
    }

    /// Adjacent angles may not jump by π/ℓ or more.
    pub fn validate(&self, ell: u32) -> Result<()> {
        let limit = PI / f64::from(ell.max(1));
        if self.angles.windows(2).any(|w| (w[1] - w[0]).abs() >= limit) {
            return Err(Error::config(format!(
                "rotation series jumps by π/ℓ = {limit:.4} or more"
            )));
        }
        if self.z_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("z values must be strictly increasing"));
        }
        Ok(())
    }
}

/// Registration options sized for a stack: annulus radius 2/k_r1.
pub fn registration_for(stack: &FocalStack) -> Result<RegistrationOptions> {
    let law = encoded_law(&stack.spec, &stack.optics)?;
    Ok(RegistrationOptions::new(REGISTRATION_RADIUS / law.kr1))
}

/// Register every frame against the lowest-z frame and unwrap.
pub fn measure_series(stack: &FocalStack, opts: &RegistrationOptions) -> Result<RotationSeries> {
    stack.validate()?;
    let ell = stack.spec.ell;
    let images: Vec<Image> = stack.frames.iter().map(Image::intensity_of).collect();
    let reference = &images[0];
    let rotations = images
        .par_iter()
        .map(|img| measure_rotation(img, reference, ell, opts))
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<f64> = rotations.iter().map(|r| r.angle).collect();
    RotationSeries::new(
        stack.z_values.clone(),
        unwrap_angles(&raw, ell),
        0,
        rotations.iter().map(|r| r.uncertainty).collect(),
    )
}

/// Φ, ∂_zΦ and ∂²_zΦ of the fitted law on a z grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicCurves {
    pub z: Vec<f64>,
    pub rotation: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
}

impl KinematicCurves {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<f64>> = (0..self.z.len())
            .map(|k| {
                vec![
                    self.z[k],
                    self.rotation[k],
                    self.velocity[k],
                    self.acceleration[k],
                ]
            })
            .collect();
        io::write_csv_table(path, &["z", "Phi", "dPhi", "d2Phi"], &rows)
    }
}

/// Evaluate the closed-form laws at the fitted parameters.
pub fn derive_kinematics(fit: &FitResult, ell: u32, z: &[f64]) -> Result<KinematicCurves> {
    let law = RotationLaw::new(ell, fit.d_fit, fit.dkz_fit, fit.phi0_fit)?;
    Ok(KinematicCurves {
        z: z.to_vec(),
        rotation: z.iter().map(|&z| law.rotation(z)).collect(),
        velocity: z.iter().map(|&z| law.angular_velocity(z)).collect(),
        acceleration: z.iter().map(|&z| law.angular_acceleration(z)).collect(),
    })
}

/// JSON fit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub ell: u32,
    pub reference_index: usize,
    pub reference_z: f64,
    /// How the reference plane was chosen.
    pub reference_rule: String,
    pub fit: FitResult,
    pub series: RotationSeries,
    pub provenance: Option<String>,
}

impl FitReport {
    pub fn new(
        ell: u32,
        series: RotationSeries,
        fit: FitResult,
        provenance: Option<String>,
    ) -> Self {
        Self {
            ell,
            reference_index: series.reference_index,
            reference_z: series.z_values[series.reference_index],
            reference_rule: "lowest z".into(),
            fit,
            series,
            provenance,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit_with(d: f64, dkz: f64, phi0: f64) -> FitResult {
        FitResult {
            d_fit: d,
            dkz_fit: dkz,
            phi0_fit: phi0,
            covariance: None,
            residual_rms: 0.0,
            residuals: vec![],
            iterations: 1,
        }
    }

    #[test]
    fn isotropic_fit_gives_uniform_rotation() {
        let z: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
        let c = derive_kinematics(&fit_with(0.0, 1.5, 0.2), 1, &z).unwrap();
        for k in 0..z.len() {
            assert!((c.velocity[k] + 1.5).abs() < 1e-14);
            assert_eq!(c.acceleration[k], 0.0);
        }
    }

    #[test]
    fn curves_match_kinematics_exactly() {
        let fit = fit_with(0.325, 2.1, 0.7);
        let law = RotationLaw::new(2, 0.325, 2.1, 0.7).unwrap();
        let z: Vec<f64> = (0..40).map(|k| -1.0 + 0.05 * k as f64).collect();
        let c = derive_kinematics(&fit, 2, &z).unwrap();
        for (k, &zz) in z.iter().enumerate() {
            assert_eq!(c.rotation[k], law.rotation(zz));
            assert_eq!(c.velocity[k], law.angular_velocity(zz));
            assert_eq!(c.acceleration[k], law.angular_acceleration(zz));
        }
    }

    #[test]
    fn peak_acceleration_location() {
        // stationary points of ∂²Φ solve d/dx [sin 2x/(1+D²−2D cos 2x)²] = 0
        let (d, dkz, phi0) = (0.51, 1.0, 0.0);
        let n = 200_001;
        let z: Vec<f64> = (0..n)
            .map(|k| 0.5 * PI * k as f64 / (n - 1) as f64)
            .collect();
        let c = derive_kinematics(&fit_with(d, dkz, phi0), 1, &z).unwrap();
        let (kmax, _) = c
            .acceleration
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap();
        let g = |x: f64| {
            let den = 1.0 + d * d - 2.0 * d * (2.0 * x).cos();
            2.0 * (2.0 * x).cos() * den - 2.0 * (2.0 * x).sin() * 2.0 * d * 2.0 * (2.0 * x).sin()
        };
        let (mut lo, mut hi) = (1e-6, 0.5 * PI - 1e-6);
        assert!(g(lo) * g(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let step = z[1] - z[0];
        assert!((z[kmax] - lo).abs() <= step, "{} vs {}", z[kmax], lo);
    }

    #[test]
    fn series_validation() {
        assert!(RotationSeries::new(vec![0.0, 1.0], vec![0.0], 0, vec![0.0, 0.0]).is_err());
        assert!(RotationSeries::new(vec![0.0, 1.0], vec![0.0, 0.1], 2, vec![0.0, 0.0]).is_err());
        let s = RotationSeries::new(vec![0.0, 1.0], vec![0.0, 2.0], 0, vec![0.0, 0.0]).unwrap();
        assert!(s.validate(1).is_ok());
        assert!(s.validate(2).is_err());
    }

    #[test]
    fn report_serializes() {
        let s = RotationSeries::new(vec![-1.0, 0.0, 1.0], vec![0.0, 0.1, 0.2], 0, vec![0.01; 3])
            .unwrap();
        let r = FitReport::new(1, s, fit_with(0.1, 1.0, 0.0), None);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("fit.json");
        r.write(&p).unwrap();
        let back: FitReport = io::read_json(&p).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.reference_z, -1.0);
    }
}
