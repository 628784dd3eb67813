//! Complex amplitudes sampled on a uniform Cartesian grid.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modes::Wave;
use crate::error::{Error, Result};
use crate::io;
use crate::specfun::bessel_j_zero;

/// Row-major samples ψ(x_i, y_j) with x_i = (i − ⌊nx/2⌋)·pitch, likewise for y.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    pub z: f64,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub nx: usize,
    pub ny: usize,
    pub pitch_m: f64,
    pub z_m: f64,
}

impl ComplexField {
    pub fn zeros(nx: usize, ny: usize, pitch: f64, z: f64) -> Result<Self> {
        Self::from_values(nx, ny, pitch, z, vec![Complex64::new(0.0, 0.0); nx * ny])
    }

    pub fn from_values(
        nx: usize,
        ny: usize,
        pitch: f64,
        z: f64,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let f = Self {
            nx,
            ny,
            pitch,
            z,
            values,
        };
        f.validate()?;
        Ok(f)
    }

    /// Fill by evaluating `f(x, y)` at every pixel; rows are filled in parallel.
    pub fn from_fn<F>(nx: usize, ny: usize, pitch: f64, z: f64, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let mut values = vec![Complex64::new(0.0, 0.0); nx * ny];
        let cx = (nx / 2) as f64;
        let cy = (ny / 2) as f64;
        values
            .par_chunks_mut(nx.max(1))
            .enumerate()
            .for_each(|(j, row)| {
                let y = (j as f64 - cy) * pitch;
                for (i, v) in row.iter_mut().enumerate() {
                    *v = f((i as f64 - cx) * pitch, y);
                }
            });
        Self::from_values(nx, ny, pitch, z, values)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::config(format!(
                "grid must be at least 2×2, got {}×{}",
                self.nx, self.ny
            )));
        }
        if !(self.pitch > 0.0 && self.pitch.is_finite()) {
            return Err(Error::config(format!(
                "pitch must be > 0, got {}",
                self.pitch
            )));
        }
        if self.values.len() != self.nx * self.ny {
            return Err(Error::config("sample count does not match grid size"));
        }
        if !self.z.is_finite() {
            return Err(Error::config("plane coordinate must be finite"));
        }
        if let Some(k) = self
            .values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::domain(format!("non-finite sample at index {k}")));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.pitch
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.pitch
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.nx + i]
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn phase(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.arg()).collect()
    }

    /// Σ|ψ|² over the grid.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            nx: self.nx,
            ny: self.ny,
            pitch_m: self.pitch,
            z_m: self.z,
        }
    }

    /// Sidecar path: same stem, `.json` extension.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("json")
    }

    /// Interleaved little-endian f32 (re, im) plus a JSON sidecar.
    pub fn write_raw(&self, path: &Path) -> Result<()> {
        io::write_f32_le(
            path,
            self.values.iter().flat_map(|v| [v.re as f32, v.im as f32]),
        )?;
        io::write_json(&Self::sidecar_path(path), &self.header())
    }

    pub fn read_raw(path: &Path) -> Result<Self> {
        let h: FieldHeader = io::read_json(&Self::sidecar_path(path))?;
        let raw = io::read_f32_le(path)?;
        if raw.len() != 2 * h.nx * h.ny {
            return Err(Error::config(format!(
                "{} holds {} floats, header expects {}",
                path.display(),
                raw.len(),
                2 * h.nx * h.ny
            )));
        }
        let values = raw
            .chunks_exact(2)
            .map(|c| Complex64::new(f64::from(c[0]), f64::from(c[1])))
            .collect();
        Self::from_values(h.nx, h.ny, h.pitch_m, h.z_m, values)
    }

    pub fn write_intensity_pgm(&self, path: &Path) -> Result<()> {
        io::write_pgm16(path, self.nx, self.ny, &self.intensity())
    }

    pub fn write_intensity_csv(&self, path: &Path) -> Result<()> {
        io::write_csv_grid(path, self.nx, self.ny, &self.intensity())
    }
}

/// Half-width spanning the first twelve radial zeros of J_ℓ(k_r r).
pub fn default_half_width(ell: i32, kr: f64) -> Result<f64> {
    Ok(bessel_j_zero(ell, 12)? / kr)
}

/// Sample a wave on an n×n grid of half-width `half_width` at plane z.
pub fn sample_wave<W: Wave>(wave: &W, n: usize, half_width: f64, z: f64) -> Result<ComplexField> {
    if !(half_width > 0.0) {
        return Err(Error::config("half-width must be > 0"));
    }
    let pitch = 2.0 * half_width / n as f64;
    ComplexField::from_fn(n, n, pitch, z, |x, y| wave.psi(x.hypot(y), y.atan2(x), z))
}
