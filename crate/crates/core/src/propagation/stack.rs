//! Synthetic focal series and their volume reconstruction.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{extract_first_order, fraunhofer, AngularSpectrum, Optics, OrderWindow};
use crate::error::{Error, Result};
use crate::holography::{render_rings, ring_to_kr, validity_radius, HologramSpec, Rings};
use crate::io;
use crate::wavefield::ComplexField;

/// Numerical choices for turning a hologram into a focal series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    /// First-order window radius as a fraction of the order spacing.
    pub window_fraction: f64,
    /// Raised-cosine fraction of the window radius.
    pub taper: f64,
    /// Band limit of the defocus propagator, in units of the outer ring's spatial frequency.
    pub band_factor: f64,
    /// Side of the stored frames [pixels].
    pub frame_size: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            window_fraction: 0.6,
            taper: 0.3,
            band_factor: 2.0,
            frame_size: 512,
        }
    }
}

/// Wavenumbers encoded by the two rings under the Fourier-lens mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodedLaw {
    pub kr1: f64,
    pub kr2: f64,
    /// (k_z1 − k_z2)/2.
    pub dkz: f64,
    /// Focal-plane radius of delta-ring validity [m].
    pub validity_radius: f64,
}

impl EncodedLaw {
    /// Axial distance π/|Δk_z| of one petal revolution by π/ℓ.
    pub fn period(&self) -> f64 {
        std::f64::consts::PI / self.dkz.abs()
    }
}

pub fn encoded_law(spec: &HologramSpec, optics: &Optics) -> Result<EncodedLaw> {
    spec.validate()?;
    optics.validate()?;
    let kr1 = ring_to_kr(spec.ring1_radius(), optics.wavelength, optics.focal_length)?.kr;
    let kr2 = ring_to_kr(spec.ring2_radius(), optics.wavelength, optics.focal_length)?.kr;
    let k = optics.k();
    let (kz1, kz2) = ((k * k - kr1 * kr1).sqrt(), (k * k - kr2 * kr2).sqrt());
    Ok(EncodedLaw {
        kr1,
        kr2,
        dkz: 0.5 * (kr2 * kr2 - kr1 * kr1) / (kz1 + kz2),
        validity_radius: validity_radius(spec, optics.wavelength, optics.focal_length),
    })
}

/// n equally spaced planes with Δk_z z covering [−half_phase, half_phase].
pub fn default_z_list(law: &EncodedLaw, n: usize, half_phase: f64) -> Vec<f64> {
    let zmax = half_phase / law.dkz.abs();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| -zmax + 2.0 * zmax * i as f64 / (n - 1) as f64)
        .collect()
}

/// Ordered defocus frames sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalStack {
    pub spec: HologramSpec,
    pub optics: Optics,
    pub options: SeriesOptions,
    pub frames: Vec<ComplexField>,
    pub z_values: Vec<f64>,
    /// SHA-256 of the generating spec, optics, options and plane list.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackManifest {
    pub spec: HologramSpec,
    pub optics: Optics,
    pub options: SeriesOptions,
    pub z_values: Vec<f64>,
    pub provenance: String,
    pub frames: Vec<String>,
}

#[derive(Serialize)]
struct ProvenanceInput<'a> {
    spec: &'a HologramSpec,
    optics: &'a Optics,
    options: &'a SeriesOptions,
    z_values: &'a [f64],
}

fn provenance(
    spec: &HologramSpec,
    optics: &Optics,
    options: &SeriesOptions,
    z_values: &[f64],
) -> Result<String> {
    let json = serde_json::to_vec(&ProvenanceInput {
        spec,
        optics,
        options,
        z_values,
    })?;
    Ok(Sha256::digest(json)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

fn check_z_list(z: &[f64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::config("focal series needs at least one plane"));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("defocus values must be finite"));
    }
    if z.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("defocus values must be strictly increasing"));
    }
    if z[0] > 0.0 || z[z.len() - 1] < 0.0 {
        return Err(Error::config("defocus values must bracket the focal plane"));
    }
    Ok(())
}

impl FocalStack {
    pub fn validate(&self) -> Result<()> {
        check_z_list(&self.z_values)?;
        if self.frames.len() != self.z_values.len() {
            return Err(Error::config("frame count does not match the plane list"));
        }
        let f0 = &self.frames[0];
        if self
            .frames
            .iter()
            .any(|f| f.nx != f0.nx || f.ny != f0.ny || f.pitch != f0.pitch)
        {
            return Err(Error::config("frames do not share one grid"));
        }
        Ok(())
    }

    pub fn intensity(&self, k: usize) -> Vec<f64> {
        self.frames[k].intensity()
    }

    pub fn manifest(&self) -> StackManifest {
        StackManifest {
            spec: self.spec,
            optics: self.optics,
            options: self.options,
            z_values: self.z_values.clone(),
            provenance: self.provenance.clone(),
            frames: (0..self.frames.len())
                .map(|k| format!("frame_{k:04}.c64"))
                .collect(),
        }
    }

    /// Frames as raw complex f32 files plus `manifest.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let manifest = self.manifest();
        for (frame, name) in self.frames.iter().zip(&manifest.frames) {
            frame.write_raw(&dir.join(name))?;
        }
        io::write_json(&dir.join("manifest.json"), &manifest)
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let m: StackManifest = io::read_json(&dir.join("manifest.json"))?;
        let frames = m
            .frames
            .iter()
            .map(|name| ComplexField::read_raw(&dir.join(name)))
            .collect::<Result<Vec<_>>>()?;
        let stack = Self {
            spec: m.spec,
            optics: m.optics,
            options: m.options,
            frames,
            z_values: m.z_values,
            provenance: m.provenance,
        };
        stack.validate()?;
        Ok(stack)
    }
}

/// Windowed +1 diffraction order of the rendered hologram, centred on its grid.
pub fn first_order(
    spec: &HologramSpec,
    optics: &Optics,
    rings: Rings,
    options: &SeriesOptions,
) -> Result<ComplexField> {
    spec.validate()?;
    optics.validate()?;
    if !(options.window_fraction > 0.0 && options.window_fraction < 1.0) {
        return Err(Error::config("window fraction must lie in (0, 1)"));
    }
    let far = fraunhofer(&render_rings(spec, rings)?.to_field()?, optics)?;
    let separation = optics.wavelength * optics.focal_length / spec.carrier_period;
    let radius = options.window_fraction * separation;
    let span = 2 * (radius / far.pitch).ceil() as usize + 2;
    let window = OrderWindow {
        radius,
        taper: options.taper,
        crop: span.div_ceil(64) * 64,
    };
    extract_first_order(&far, optics, spec.carrier_period, &window)
}

pub fn make_focal_series(
    spec: &HologramSpec,
    optics: &Optics,
    z_list: &[f64],
) -> Result<FocalStack> {
    make_focal_series_with(spec, optics, z_list, &SeriesOptions::default())
}

/// Hologram → far field → windowed +1 order → angular-spectrum defocus to each plane.
pub fn make_focal_series_with(
    spec: &HologramSpec,
    optics: &Optics,
    z_list: &[f64],
    options: &SeriesOptions,
) -> Result<FocalStack> {
    spec.validate()?;
    optics.validate()?;
    check_z_list(z_list)?;
    if !(options.band_factor > 0.0) {
        return Err(Error::config("band factor must be > 0"));
    }
    let order = first_order(spec, optics, Rings::Both, options)?;
    let outer = spec.ring1_radius().max(spec.ring2_radius()) + 0.5 * spec.ring_thickness;
    let band = options.band_factor * outer / (optics.wavelength * optics.focal_length);
    let asm = AngularSpectrum::new(optics.wavelength, Some(band))?;
    let frames = asm.propagate_many(&order, z_list, Some(options.frame_size.min(order.nx)))?;
    Ok(FocalStack {
        spec: *spec,
        optics: *optics,
        options: *options,
        frames,
        z_values: z_list.to_vec(),
        provenance: provenance(spec, optics, options, z_list)?,
    })
}

/// Intensity volume on a uniform z grid, z-major then row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub pitch: f64,
    pub z_values: Vec<f64>,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeHeader {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub pitch_m: f64,
    pub z_m: Vec<f64>,
    pub dtype: String,
    pub order: String,
    pub provenance: String,
}

impl Volume {
    pub fn slice(&self, kz: usize) -> &[f64] {
        &self.data[kz * self.nx * self.ny..(kz + 1) * self.nx * self.ny]
    }

    /// Raw little-endian f32 plus a `.json` header.
    pub fn write(&self, path: &Path, provenance: &str) -> Result<()> {
        io::write_f32_le(path, self.data.iter().map(|&v| v as f32))?;
        let header = VolumeHeader {
            nx: self.nx,
            ny: self.ny,
            nz: self.nz,
            pitch_m: self.pitch,
            z_m: self.z_values.clone(),
            dtype: "float32-le".into(),
            order: "z,y,x".into(),
            provenance: provenance.into(),
        };
        io::write_json(&path.with_extension("json"), &header)
    }
}

/// Linear interpolation of frame intensities onto `nz` uniform planes spanning the stack.
pub fn stack_to_volume(stack: &FocalStack, nz: usize) -> Result<Volume> {
    stack.validate()?;
    if stack.frames.len() < 2 {
        return Err(Error::config(
            "volume reconstruction needs at least two frames",
        ));
    }
    if nz < 2 {
        return Err(Error::config("volume needs at least two planes"));
    }
    let z = &stack.z_values;
    let (z0, z1) = (z[0], z[z.len() - 1]);
    let intensities: Vec<Vec<f64>> = (0..stack.frames.len())
        .map(|k| stack.intensity(k))
        .collect();
    let f0 = &stack.frames[0];
    let npix = f0.nx * f0.ny;
    let mut data = Vec::with_capacity(npix * nz);
    let mut z_values = Vec::with_capacity(nz);
    for s in 0..nz {
        let zs = if s + 1 == nz {
            z1
        } else {
            z0 + (z1 - z0) * s as f64 / (nz - 1) as f64
        };
        z_values.push(zs);
        let hi = z.partition_point(|&v| v < zs).clamp(1, z.len() - 1);
        let lo = hi - 1;
        let t = ((zs - z[lo]) / (z[hi] - z[lo])).clamp(0.0, 1.0);
        let (a, b) = (&intensities[lo], &intensities[hi]);
        data.extend((0..npix).map(|p| a[p] + t * (b[p] - a[p])));
    }
    Ok(Volume {
        nx: f0.nx,
        ny: f0.ny,
        nz,
        pitch: f0.pitch,
        z_values,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holography::{Canvas, HologramMode};
    use num_complex::Complex64;

    fn small_spec(d: f64) -> HologramSpec {
        let pitch = 18.75e-9;
        HologramSpec {
            ring1_diameter: 2.0 * 42.0 * pitch,
            ring2_diameter: 2.0 * 36.75 * pitch,
            ring_thickness: 5.0 * pitch,
            carrier_period: 4.0 * pitch,
            ell: 1,
            d,
            mode: HologramMode::Grayscale,
            canvas: Canvas {
                nx: 512,
                ny: 512,
                pitch,
            },
        }
    }

    fn fake_stack(values: &[f64]) -> FocalStack {
        let frames = values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                ComplexField::from_fn(4, 4, 1.0, k as f64, |x, _| Complex64::new(v + 0.1 * x, 0.0))
                    .unwrap()
            })
            .collect();
        FocalStack {
            spec: small_spec(0.0),
            optics: Optics::kv300(),
            options: SeriesOptions::default(),
            frames,
            z_values: (0..values.len()).map(|k| k as f64 - 1.0).collect(),
            provenance: String::new(),
        }
    }

    #[test]
    fn empty_plane_list_is_rejected() {
        let r = make_focal_series(&small_spec(0.0), &Optics::kv300(), &[]);
        assert!(matches!(r, Err(Error::Config(_))));
        let r = make_focal_series(&small_spec(0.0), &Optics::kv300(), &[0.1, 0.0]);
        assert!(r.is_err());
    }

    #[test]
    fn series_is_deterministic() {
        let spec = small_spec(0.3);
        let optics = Optics::kv300();
        let law = encoded_law(&spec, &optics).unwrap();
        let z = default_z_list(&law, 3, 0.5);
        let opts = SeriesOptions {
            frame_size: 64,
            ..SeriesOptions::default()
        };
        let a = make_focal_series_with(&spec, &optics, &z, &opts).unwrap();
        let b = make_focal_series_with(&spec, &optics, &z, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.provenance.len(), 64);
        assert_eq!(a.frames[0].nx, 64);
        a.validate().unwrap();
    }

    #[test]
    fn encoded_rotation_rate() {
        let spec = small_spec(0.0);
        let optics = Optics::kv300();
        let law = encoded_law(&spec, &optics).unwrap();
        let k = optics.k();
        let direct =
            0.5 * ((k * k - law.kr1 * law.kr1).sqrt() - (k * k - law.kr2 * law.kr2).sqrt());
        assert!((law.dkz - direct).abs() < 1e-3 * law.dkz.abs());
        assert!(law.dkz < 0.0);
    }

    #[test]
    fn volume_from_identical_frames_is_constant() {
        let stack = fake_stack(&[2.0, 2.0]);
        let v = stack_to_volume(&stack, 7).unwrap();
        assert_eq!(v.nz, 7);
        assert_eq!(v.data.len(), 16 * 7);
        for s in 1..7 {
            assert_eq!(v.slice(s), v.slice(0));
        }
    }

    #[test]
    fn volume_does_not_overshoot() {
        let stack = fake_stack(&[0.5, 3.0, 1.0, 2.0]);
        // 22 planes over [−1, 2] land on every frame plane
        let v = stack_to_volume(&stack, 22).unwrap();
        let frame_max = (0..4)
            .flat_map(|k| stack.intensity(k))
            .fold(f64::MIN, f64::max);
        let vol_max = v.data.iter().cloned().fold(f64::MIN, f64::max);
        assert!((vol_max - frame_max).abs() < 1e-12 * frame_max);
        assert_eq!(v.z_values[0], -1.0);
        assert_eq!(v.z_values[21], 2.0);
        let coarse = stack_to_volume(&stack, 9).unwrap();
        assert!(coarse.data.iter().all(|&x| x <= frame_max));
    }

    #[test]
    fn single_frame_volume_is_an_error() {
        let stack = fake_stack(&[1.0]);
        let mut s = stack.clone();
        s.z_values = vec![0.0];
        assert!(stack_to_volume(&s, 4).is_err());
    }

    #[test]
    fn stack_round_trips_through_disk() {
        let stack = fake_stack(&[0.5, 3.0]);
        let dir = tempfile::tempdir().unwrap();
        stack.write_dir(dir.path()).unwrap();
        let back = FocalStack::read_dir(dir.path()).unwrap();
        assert_eq!(back.z_values, stack.z_values);
        for (a, b) in back.frames.iter().zip(&stack.frames) {
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).norm() < 1e-6);
            }
        }
    }
}
