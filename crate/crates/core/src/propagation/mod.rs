//! Fourier optics: Fraunhofer transform of a hologram, diffraction-order
//! extraction and angular-spectrum defocus.

mod fft2;
mod stack;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::ComplexField;

pub use fft2::{fft2_centered, Direction, Fft2};
pub use stack::{
    default_z_list, encoded_law, first_order, make_focal_series, make_focal_series_with,
    stack_to_volume, EncodedLaw, FocalStack, SeriesOptions, StackManifest, Volume, VolumeHeader,
};

/// Lens and beam defining the Fourier plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optics {
    /// Electron wavelength [m].
    pub wavelength: f64,
    /// Focal length of the Fourier lens [m].
    pub focal_length: f64,
}

impl Optics {
    /// 300 kV illumination (relativistic λ) behind a 1 m lens.
    pub fn kv300() -> Self {
        Self {
            wavelength: 1.968_748_6e-12,
            focal_length: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::config(format!(
                "wavelength must be > 0, got {}",
                self.wavelength
            )));
        }
        if !(self.focal_length > 0.0 && self.focal_length.is_finite()) {
            return Err(Error::config(format!(
                "focal length must be > 0, got {}",
                self.focal_length
            )));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Back-focal-plane pitch λf/(N p) for an N-sample input of pitch p.
    pub fn focal_pitch(&self, n: usize, pitch: f64) -> f64 {
        self.wavelength * self.focal_length / (n as f64 * pitch)
    }
}

/// Far field in the back focal plane: x' = λf·ν, unitary normalization.
pub fn fraunhofer(input: &ComplexField, optics: &Optics) -> Result<ComplexField> {
    input.validate()?;
    optics.validate()?;
    if input.nx != input.ny {
        return Err(Error::config(format!(
            "Fraunhofer transform needs a square grid, got {}×{}",
            input.nx, input.ny
        )));
    }
    let mut values = input.values.clone();
    fft2_centered(&mut values, input.nx, input.ny, Direction::Forward);
    ComplexField::from_values(
        input.nx,
        input.ny,
        optics.focal_pitch(input.nx, input.pitch),
        0.0,
        values,
    )
}

/// Circular window around a diffraction order, with a raised-cosine edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderWindow {
    /// Window radius in the focal plane [m].
    pub radius: f64,
    /// Fraction of the radius occupied by the cosine roll-off, in [0, 1).
    pub taper: f64,
    /// Side of the square crop [pixels].
    pub crop: usize,
}

impl OrderWindow {
    fn weight(&self, r: f64) -> f64 {
        let inner = self.radius * (1.0 - self.taper);
        if r <= inner {
            1.0
        } else if r >= self.radius {
            0.0
        } else {
            0.5 * (1.0 + (PI * (r - inner) / (self.radius - inner)).cos())
        }
    }
}

/// Pixel offset of diffraction order `order` from the far-field center.
pub fn order_offset(
    farfield: &ComplexField,
    optics: &Optics,
    carrier_period: f64,
    order: i32,
) -> f64 {
    f64::from(order) * optics.wavelength * optics.focal_length / (carrier_period * farfield.pitch)
}

/// Crop, window and recenter diffraction order `order`. The crop center is the
/// pixel nearest to the order position.
pub fn extract_order(
    farfield: &ComplexField,
    optics: &Optics,
    carrier_period: f64,
    window: &OrderWindow,
    order: i32,
) -> Result<ComplexField> {
    farfield.validate()?;
    optics.validate()?;
    if !(carrier_period > 0.0) {
        return Err(Error::config("carrier period must be > 0"));
    }
    if !(window.radius > 0.0) || !(0.0..1.0).contains(&window.taper) {
        return Err(Error::config(
            "window radius must be > 0 and taper in [0, 1)",
        ));
    }
    let separation = optics.wavelength * optics.focal_length / carrier_period;
    if window.radius >= separation {
        return Err(Error::config(format!(
            "diffraction orders overlap: window radius {:e} m is not below the order spacing {:e} m",
            window.radius, separation
        )));
    }
    let m = window.crop;
    if m < 2 || (m as f64) * 0.5 * farfield.pitch < window.radius {
        return Err(Error::config(format!(
            "crop of {m} pixels does not contain the window"
        )));
    }
    let cx = (farfield.nx / 2) as i64
        + order_offset(farfield, optics, carrier_period, order).round() as i64;
    let cy = (farfield.ny / 2) as i64;
    let (x0, y0) = (cx - (m / 2) as i64, cy - (m / 2) as i64);
    if x0 < 0 || y0 < 0 || x0 + m as i64 > farfield.nx as i64 || y0 + m as i64 > farfield.ny as i64
    {
        return Err(Error::config(
            "order window extends past the far-field grid",
        ));
    }
    let (x0, y0) = (x0 as usize, y0 as usize);
    let pitch = farfield.pitch;
    let mut values = vec![Complex64::new(0.0, 0.0); m * m];
    values.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
        let dy = (j as f64 - (m / 2) as f64) * pitch;
        let src = &farfield.values[(y0 + j) * farfield.nx + x0..];
        for (i, v) in row.iter_mut().enumerate() {
            let dx = (i as f64 - (m / 2) as f64) * pitch;
            let w = window.weight(dx.hypot(dy));
            if w > 0.0 {
                *v = src[i] * w;
            }
        }
    });
    ComplexField::from_values(m, m, pitch, farfield.z, values)
}

/// The +1 order, recentered.
pub fn extract_first_order(
    farfield: &ComplexField,
    optics: &Optics,
    carrier_period: f64,
    window: &OrderWindow,
) -> Result<ComplexField> {
    extract_order(farfield, optics, carrier_period, window, 1)
}

/// Exact free-space propagator exp(i dz (k_z − k)), optionally band-limited.
/// Evanescent components and spatial frequencies above the band limit are zeroed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularSpectrum {
    pub wavelength: f64,
    /// Radial spatial-frequency cutoff [1/m].
    pub band_limit: Option<f64>,
}

impl AngularSpectrum {
    pub fn new(wavelength: f64, band_limit: Option<f64>) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::config(format!(
                "wavelength must be > 0, got {wavelength}"
            )));
        }
        if let Some(b) = band_limit {
            if !(b > 0.0) {
                return Err(Error::config(format!("band limit must be > 0, got {b}")));
            }
        }
        Ok(Self {
            wavelength,
            band_limit,
        })
    }

    /// Highest radial frequency that is passed on this grid.
    fn band_edge(&self, field: &ComplexField) -> f64 {
        let nyq = 0.5 / field.pitch;
        let corner = nyq * std::f64::consts::SQRT_2;
        self.band_limit
            .map_or(corner, |b| b.min(corner))
            .min(1.0 / self.wavelength)
    }

    /// Largest |dz| for which the transfer-function phase is sampled without
    /// aliasing: |∂φ/∂ν|·Δν ≤ π at the band edge.
    pub fn aliasing_bound(&self, field: &ComplexField) -> f64 {
        let nu = self.band_edge(field);
        let inv = 1.0 / self.wavelength;
        let dnu = 1.0 / (field.nx.min(field.ny) as f64 * field.pitch);
        (inv * inv - nu * nu).max(0.0).sqrt() / (2.0 * nu * dnu)
    }

    fn check(&self, field: &ComplexField, dz: f64) -> Result<()> {
        if !dz.is_finite() {
            return Err(Error::config("propagation distance must be finite"));
        }
        let bound = self.aliasing_bound(field);
        if dz.abs() > bound {
            return Err(Error::config(format!(
                "angular-spectrum aliasing: |dz| = {:e} m exceeds the sampling bound {:e} m",
                dz.abs(),
                bound
            )));
        }
        Ok(())
    }

    fn transfer(&self, nx: usize, ny: usize, pitch: f64, dz: f64) -> Vec<Complex64> {
        let k = 2.0 * PI / self.wavelength;
        let limit = self.band_limit.unwrap_or(f64::INFINITY);
        let (fx, fy) = (1.0 / (nx as f64 * pitch), 1.0 / (ny as f64 * pitch));
        let mut h = vec![Complex64::new(0.0, 0.0); nx * ny];
        h.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            let ny_ = (j as f64 - (ny / 2) as f64) * fy;
            for (i, v) in row.iter_mut().enumerate() {
                let nx_ = (i as f64 - (nx / 2) as f64) * fx;
                let nu2 = nx_ * nx_ + ny_ * ny_;
                if nu2.sqrt() > limit {
                    continue;
                }
                let kp2 = 4.0 * PI * PI * nu2;
                if kp2 >= k * k {
                    continue;
                }
                let kz_minus_k = -kp2 / (k + (k * k - kp2).sqrt());
                *v = Complex64::from_polar(1.0, dz * kz_minus_k);
            }
        });
        h
    }

    /// Propagate by dz. The common phase e^{ik dz} is dropped.
    pub fn propagate(&self, field: &ComplexField, dz: f64) -> Result<ComplexField> {
        let mut out = self.propagate_many(field, &[dz], None)?;
        Ok(out.remove(0))
    }

    /// Propagate to several planes, optionally cropping each output to a centered
    /// `crop`×`crop` window. Planes are computed concurrently.
    pub fn propagate_many(
        &self,
        field: &ComplexField,
        dzs: &[f64],
        crop: Option<usize>,
    ) -> Result<Vec<ComplexField>> {
        field.validate()?;
        for &dz in dzs {
            self.check(field, dz)?;
        }
        let (nx, ny) = (field.nx, field.ny);
        let (ox, oy) = match crop {
            Some(c) if c <= nx && c <= ny && c >= 2 => (c, c),
            Some(c) => {
                return Err(Error::config(format!(
                    "output crop {c} does not fit the {nx}×{ny} grid"
                )))
            }
            None => (nx, ny),
        };
        let mut spectrum = field.values.clone();
        fft2_centered(&mut spectrum, nx, ny, Direction::Forward);
        let inverse = Fft2::new(nx, ny, Direction::Inverse);
        dzs.par_iter()
            .map(|&dz| {
                let h = self.transfer(nx, ny, field.pitch, dz);
                let mut buf: Vec<Complex64> = spectrum.iter().zip(&h).map(|(s, t)| s * t).collect();
                inverse.process(&mut buf);
                let (x0, y0) = (nx / 2 - ox / 2, ny / 2 - oy / 2);
                let values = if (ox, oy) == (nx, ny) {
                    buf
                } else {
                    (0..oy)
                        .flat_map(|j| buf[(y0 + j) * nx + x0..(y0 + j) * nx + x0 + ox].to_vec())
                        .collect()
                };
                ComplexField::from_values(ox, oy, field.pitch, field.z + dz, values)
            })
            .collect()
    }
}

/// Full-band angular-spectrum propagation.
pub fn angular_spectrum(field: &ComplexField, wavelength: f64, dz: f64) -> Result<ComplexField> {
    AngularSpectrum::new(wavelength, None)?.propagate(field, dz)
}

/// Pearson correlation of two equally sized sample sets restricted to `mask`.
pub fn masked_correlation(a: &[f64], b: &[f64], mask: impl Fn(usize) -> bool) -> f64 {
    let idx: Vec<usize> = (0..a.len().min(b.len())).filter(|&k| mask(k)).collect();
    let n = idx.len() as f64;
    let (ma, mb) = idx
        .iter()
        .fold((0.0, 0.0), |(x, y), &k| (x + a[k], y + b[k]));
    let (ma, mb) = (ma / n, mb / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &k in &idx {
        let (da, db) = (a[k] - ma, b[k] - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    sab / (saa * sbb).sqrt()
}
