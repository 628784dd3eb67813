//! Off-axis double-ring holograms whose Fourier plane holds the accelerating wave.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::wavefield::modes::varphi_unchecked;
use crate::wavefield::ComplexField;

/// Ratio R/f above which the Fourier-lens mapping is flagged as nonparaxial.
pub const PARAXIAL_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HologramMode {
    Binary,
    Grayscale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub nx: usize,
    pub ny: usize,
    /// Pixel pitch [m].
    pub pitch: f64,
}

/// Geometry of the double delta-ring hologram. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HologramSpec {
    pub ring1_diameter: f64,
    pub ring2_diameter: f64,
    pub ring_thickness: f64,
    pub carrier_period: f64,
    pub ell: u32,
    #[serde(rename = "D")]
    pub d: f64,
    pub mode: HologramMode,
    pub canvas: Canvas,
}

/// Which ring(s) to rasterize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rings {
    Both,
    First,
    Second,
}

impl HologramSpec {
    /// The fabricated geometry: 8.0 and 7.0 μm rings, 200 nm wide, 75 nm carrier,
    /// on a 1024² canvas at 15 nm pitch.
    pub fn experiment(ell: u32, d: f64) -> Self {
        Self {
            ring1_diameter: 8.0e-6,
            ring2_diameter: 7.0e-6,
            ring_thickness: 200e-9,
            carrier_period: 75e-9,
            ell,
            d,
            mode: HologramMode::Grayscale,
            canvas: Canvas {
                nx: 1024,
                ny: 1024,
                pitch: 15e-9,
            },
        }
    }

    /// Scale model for end-to-end runs: 4096² canvas at Λ/4 pitch, radii 336 and
    /// 294 pixels (the experimental 8:7 ratio), 14-pixel rings.
    pub fn desk(ell: u32, d: f64) -> Self {
        let pitch = 18.75e-9;
        Self {
            ring1_diameter: 2.0 * 336.0 * pitch,
            ring2_diameter: 2.0 * 294.0 * pitch,
            ring_thickness: 14.0 * pitch,
            carrier_period: 4.0 * pitch,
            ell,
            d,
            mode: HologramMode::Grayscale,
            canvas: Canvas {
                nx: 4096,
                ny: 4096,
                pitch,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("ring1_diameter", self.ring1_diameter),
            ("ring2_diameter", self.ring2_diameter),
            ("ring_thickness", self.ring_thickness),
            ("carrier_period", self.carrier_period),
            ("pitch", self.canvas.pitch),
        ];
        for (name, v) in lengths {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.ell == 0 {
            return Err(Error::config("ell must be a positive integer"));
        }
        if !(0.0..=1.0).contains(&self.d) {
            return Err(Error::config(format!(
                "D must lie in [0, 1], got {}",
                self.d
            )));
        }
        if self.ring1_diameter == self.ring2_diameter {
            return Err(Error::config("ring diameters must differ"));
        }
        let dmin = self.ring1_diameter.min(self.ring2_diameter);
        if self.ring_thickness >= dmin / 10.0 {
            return Err(Error::config(format!(
                "ring thickness {} must be below a tenth of the smaller diameter {}",
                self.ring_thickness, dmin
            )));
        }
        if self.carrier_period >= self.ring_thickness {
            return Err(Error::config(format!(
                "carrier period {} must be below the ring thickness {}",
                self.carrier_period, self.ring_thickness
            )));
        }
        if self.canvas.pitch > 0.25 * self.carrier_period * (1.0 + 1e-12) {
            return Err(Error::config(format!(
                "Nyquist violation: pitch {} exceeds a quarter of the carrier period {}",
                self.canvas.pitch, self.carrier_period
            )));
        }
        if self.canvas.nx < 2 || self.canvas.ny < 2 {
            return Err(Error::config("canvas must be at least 2×2"));
        }
        let half = 0.5 * self.canvas.nx.min(self.canvas.ny) as f64 * self.canvas.pitch;
        let outer = 0.5 * self.ring1_diameter.max(self.ring2_diameter) + 0.5 * self.ring_thickness;
        if outer >= half {
            return Err(Error::config(format!(
                "rings (outer radius {outer}) do not fit the canvas half-width {half}"
            )));
        }
        Ok(())
    }

    pub fn ring1_radius(&self) -> f64 {
        0.5 * self.ring1_diameter
    }

    pub fn ring2_radius(&self) -> f64 {
        0.5 * self.ring2_diameter
    }

    /// Carrier phase Θ_j(φ) of ring j ∈ {1, 2}: ±ℓφ_ℓ(φ).
    pub fn carrier_phase(&self, ring: u8, phi: f64) -> f64 {
        let l = self.ell as i32;
        let theta = f64::from(l) * varphi_unchecked(l, self.d, phi);
        if ring == 1 {
            theta
        } else {
            -theta
        }
    }

    /// Amplitude envelope A(φ), normalized to a unit maximum.
    pub fn amplitude(&self, phi: f64) -> f64 {
        let c = (2.0 * f64::from(self.ell) * phi).cos();
        (1.0 + self.d * self.d + 2.0 * self.d * c).max(0.0).sqrt() / (1.0 + self.d)
    }
}

/// Real transmission map in [0, 1] on the hologram canvas.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMap {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    pub values: Vec<f64>,
}

impl TransmissionMap {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn to_field(&self) -> Result<ComplexField> {
        let values = self
            .values
            .iter()
            .map(|&t| Complex64::new(t, 0.0))
            .collect();
        ComplexField::from_values(self.nx, self.ny, self.pitch, 0.0, values)
    }

    /// 16-bit PGM plus a JSON sidecar with the generating spec.
    pub fn write_pgm(&self, path: &Path, spec: &HologramSpec) -> Result<()> {
        io::write_pgm16(path, self.nx, self.ny, &self.values)?;
        io::write_json(&path.with_extension("json"), spec)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        io::write_csv_grid(path, self.nx, self.ny, &self.values)
    }
}

/// Rasterize both rings.
pub fn design_hologram(spec: &HologramSpec) -> Result<TransmissionMap> {
    render_rings(spec, Rings::Both)
}

/// Rasterize a selection of rings. Pixels within half a thickness of a ring radius are open;
/// in grayscale mode the boundary pixels are weighted by their radial coverage.
pub fn render_rings(spec: &HologramSpec, rings: Rings) -> Result<TransmissionMap> {
    spec.validate()?;
    let Canvas { nx, ny, pitch } = spec.canvas;
    let mut active = Vec::with_capacity(2);
    if rings != Rings::Second {
        active.push((1u8, spec.ring1_radius()));
    }
    if rings != Rings::First {
        active.push((2u8, spec.ring2_radius()));
    }
    let half = 0.5 * spec.ring_thickness;
    let k_carrier = 2.0 * PI / spec.carrier_period;
    let binary = spec.mode == HologramMode::Binary;
    let mut values = vec![0.0; nx * ny];
    values.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let y = (j as f64 - (ny / 2) as f64) * pitch;
        for (i, v) in row.iter_mut().enumerate() {
            let x = (i as f64 - (nx / 2) as f64) * pitch;
            let r = x.hypot(y);
            // grayscale edges carry their radial pixel coverage; binary edges stay hard
            for &(ring, radius) in &active {
                let gap = (r - radius).abs();
                let cover = if binary {
                    f64::from(u8::from(gap <= half))
                } else {
                    ((half - gap) / pitch + 0.5).clamp(0.0, 1.0)
                };
                if cover > 0.0 {
                    let phi = y.atan2(x);
                    let t = spec.amplitude(phi)
                        * 0.5
                        * (1.0 + (k_carrier * x + spec.carrier_phase(ring, phi)).cos());
                    *v += if binary {
                        f64::from(u8::from(t >= 0.5))
                    } else {
                        cover * t
                    };
                }
            }
            *v = v.min(1.0);
        }
    });
    Ok(TransmissionMap {
        nx,
        ny,
        pitch,
        values,
    })
}

/// Radial wavenumber produced by a ring through a Fourier lens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingWavenumber {
    pub kr: f64,
    /// False when R/f exceeds [`PARAXIAL_LIMIT`].
    pub paraxial: bool,
}

/// k_r = (2π/λ)(R/f).
pub fn ring_to_kr(ring_radius: f64, wavelength: f64, focal_length: f64) -> Result<RingWavenumber> {
    for (name, v) in [
        ("ring radius", ring_radius),
        ("wavelength", wavelength),
        ("focal length", focal_length),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let ratio = ring_radius / focal_length;
    Ok(RingWavenumber {
        kr: 2.0 * PI / wavelength * ratio,
        paraxial: ratio <= PARAXIAL_LIMIT,
    })
}

/// Focal-plane radius λf/(4Δ) inside which a ring of thickness Δ still acts as a delta ring.
pub fn validity_radius(spec: &HologramSpec, wavelength: f64, focal_length: f64) -> f64 {
    wavelength * focal_length / (4.0 * spec.ring_thickness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(d: f64) -> HologramSpec {
        let pitch = 10e-9;
        HologramSpec {
            ring1_diameter: 2.0 * 96.0 * pitch,
            ring2_diameter: 2.0 * 84.0 * pitch,
            ring_thickness: 12.0 * pitch,
            carrier_period: 4.0 * pitch,
            ell: 1,
            d,
            mode: HologramMode::Grayscale,
            canvas: Canvas {
                nx: 256,
                ny: 256,
                pitch,
            },
        }
    }

    fn winding(spec: &HologramSpec, ring: u8) -> f64 {
        let n = 4096;
        let mut total = 0.0;
        let mut prev = Complex64::from_polar(1.0, spec.carrier_phase(ring, -PI));
        for s in 1..=n {
            let phi = -PI + 2.0 * PI * s as f64 / n as f64;
            let cur = Complex64::from_polar(1.0, spec.carrier_phase(ring, phi));
            total += (cur * prev.conj()).arg();
            prev = cur;
        }
        total / (2.0 * PI)
    }

    #[test]
    fn presets_validate() {
        HologramSpec::experiment(1, 0.51).validate().unwrap();
        HologramSpec::desk(1, 0.51).validate().unwrap();
    }

    #[test]
    fn experiment_geometry_renders() {
        let t = design_hologram(&HologramSpec::experiment(1, 0.0)).unwrap();
        assert_eq!(t.values.len(), 1024 * 1024);
        assert!(t.values.iter().any(|&v| v > 0.9));
        assert!(t.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn winding_numbers() {
        for d in [0.0, 0.158, 0.51, 0.9] {
            let spec = small(d);
            let w1 = winding(&spec, 1);
            let w2 = winding(&spec, 2);
            assert!((w1 - 1.0).abs() < 1e-9, "D={d}: {w1}");
            assert!((w1 + w2).abs() < 1e-9);
        }
        let mut spec = small(0.3);
        spec.ell = 3;
        assert!((winding(&spec, 1) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn configuration_errors() {
        let mut s = small(0.0);
        s.ring_thickness = 0.0;
        assert!(matches!(design_hologram(&s), Err(Error::Config(_))));
        let mut s = small(0.0);
        s.canvas.pitch = 11e-9;
        assert!(matches!(s.validate(), Err(Error::Config(m)) if m.contains("Nyquist")));
        let mut s = small(0.0);
        s.ring2_diameter = s.ring1_diameter;
        assert!(s.validate().is_err());
        let mut s = small(0.0);
        s.carrier_period = 13.0 * s.canvas.pitch;
        assert!(s.validate().is_err());
        let mut s = small(0.0);
        s.canvas.nx = 150;
        assert!(s.validate().is_err());
    }

    #[test]
    fn transmission_stays_inside_rings() {
        let spec = small(0.4);
        let t = design_hologram(&spec).unwrap();
        for j in 0..t.ny {
            for i in 0..t.nx {
                let x = (i as f64 - 128.0) * spec.canvas.pitch;
                let y = (j as f64 - 128.0) * spec.canvas.pitch;
                let r = x.hypot(y);
                let reach = 0.5 * (spec.ring_thickness + spec.canvas.pitch);
                let inside = (r - spec.ring1_radius()).abs() < reach
                    || (r - spec.ring2_radius()).abs() < reach;
                if !inside {
                    assert_eq!(t.at(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn binary_mode_is_two_level() {
        let mut spec = small(0.2);
        spec.mode = HologramMode::Binary;
        let t = design_hologram(&spec).unwrap();
        assert!(t.values.iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(t.values.contains(&1.0));
    }

    #[test]
    fn single_ring_selection() {
        let spec = small(0.0);
        let both = design_hologram(&spec).unwrap();
        let a = render_rings(&spec, Rings::First).unwrap();
        let b = render_rings(&spec, Rings::Second).unwrap();
        for k in 0..both.values.len() {
            assert_eq!(both.values[k], a.values[k] + b.values[k]);
        }
    }

    #[test]
    fn envelope_maximum_is_one() {
        let spec = small(0.51);
        assert!((spec.amplitude(0.0) - 1.0).abs() < 1e-15);
        let min = spec.amplitude(PI / 2.0);
        assert!((min - (1.0 - 0.51) / 1.51).abs() < 1e-15);
    }

    #[test]
    fn ring_mapping_is_linear() {
        let a = ring_to_kr(4.0e-6, 1.97e-12, 1.0).unwrap();
        let b = ring_to_kr(8.0e-6, 1.97e-12, 1.0).unwrap();
        assert!((b.kr / a.kr - 2.0).abs() < 1e-15);
        assert!(a.paraxial);
        assert!((a.kr - 2.0 * PI / 1.97e-12 * 4.0e-6).abs() < 1e-3);
        assert!(!ring_to_kr(0.2, 1e-12, 1.0).unwrap().paraxial);
        assert!(ring_to_kr(0.0, 1e-12, 1.0).is_err());
    }
}
