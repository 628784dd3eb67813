//! Radial energy flux through a far cylinder, computed from Cartesian field samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{cross_over_mu0, EMSample};
use crate::error::{Error, Result};

/// Cartesian E and B at a point on the cylinder, with the area it represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiationReport {
    pub r_far: f64,
    pub max_abs_s_r: f64,
    /// ∮ S·r̂ dA over the sampled patch [W].
    pub radial_flux: f64,
    /// ∮ |S_z| dA over the same patch, the scale the radial flux is judged against.
    pub axial_flux_scale: f64,
    pub relative_flux: f64,
}

/// Sample a cylindrically symmetric profile on an n_phi × n_z grid of a cylinder
/// of radius `r_far` and length `length`, converting to Cartesian components.
pub fn sample_cylinder<F>(
    profile: F,
    r_far: f64,
    n_phi: usize,
    n_z: usize,
    length: f64,
) -> Result<Vec<CylinderSample>>
where
    F: Fn(f64, f64) -> Result<EMSample>,
{
    if !(r_far > 0.0) || n_phi == 0 || n_z == 0 || !(length > 0.0) {
        return Err(Error::config(
            "cylinder needs r > 0, a positive length and a nonempty grid",
        ));
    }
    let area = r_far * (2.0 * PI / n_phi as f64) * (length / n_z as f64);
    let mut out = Vec::with_capacity(n_phi * n_z);
    for j in 0..n_z {
        let z = (j as f64 + 0.5) * length / n_z as f64 - 0.5 * length;
        let s = profile(r_far, z)?;
        for i in 0..n_phi {
            let phi = 2.0 * PI * i as f64 / n_phi as f64;
            let (sn, cs) = phi.sin_cos();
            out.push(CylinderSample {
                x: r_far * cs,
                y: r_far * sn,
                z,
                e: [s.e_r * cs, s.e_r * sn, 0.0],
                b: [-s.b_phi * sn, s.b_phi * cs, s.b_z],
                area,
            });
        }
    }
    Ok(out)
}

/// Integrate the outward Poynting flux of the samples.
pub fn radiated_power_check(r_far: f64, samples: &[CylinderSample]) -> RadiationReport {
    let mut max_abs_s_r: f64 = 0.0;
    let mut radial = 0.0;
    let mut axial = 0.0;
    for s in samples {
        let p = cross_over_mu0(s.e, s.b);
        let r = s.x.hypot(s.y);
        let s_r = (p[0] * s.x + p[1] * s.y) / r;
        max_abs_s_r = max_abs_s_r.max(s_r.abs());
        radial += s_r * s.area;
        axial += p[2].abs() * s.area;
    }
    RadiationReport {
        r_far,
        max_abs_s_r,
        radial_flux: radial,
        axial_flux_scale: axial,
        relative_flux: if axial > 0.0 {
            radial.abs() / axial
        } else {
            radial.abs()
        },
    }
}
