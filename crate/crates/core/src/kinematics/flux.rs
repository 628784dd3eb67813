//! Flux lines: integral curves of the local wave vector Im(ψ*∇ψ)/|ψ|².

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::wavefield::{local_wavevector, Wave};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxOptions {
    pub z_start: f64,
    pub z_end: f64,
    pub step: f64,
    /// Integration stops where |ψ|² falls to this value.
    pub density_floor: f64,
}

/// One traced flux line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: (f64, f64),
    /// (r, φ, z) samples with φ unwrapped.
    pub samples: Vec<[f64; 3]>,
    pub truncated: bool,
    /// Largest distance of any sample from the end-to-end chord.
    pub max_chord_deviation: f64,
    pub chord_length: f64,
}

impl Trajectory {
    pub fn relative_deviation(&self) -> f64 {
        if self.chord_length > 0.0 {
            self.max_chord_deviation / self.chord_length
        } else {
            0.0
        }
    }

    pub fn cartesian(&self) -> Vec<[f64; 3]> {
        self.samples
            .iter()
            .map(|&[r, phi, z]| [r * phi.cos(), r * phi.sin(), z])
            .collect()
    }
}

fn slope<W: Wave>(wave: &W, x: f64, y: f64, z: f64, floor: f64) -> Option<[f64; 2]> {
    let r = x.hypot(y);
    let phi = y.atan2(x);
    let v = local_wavevector(wave, r, phi, z, floor)?;
    if !(v.j_z > 0.0) {
        return None;
    }
    let (s, c) = phi.sin_cos();
    Some([
        (v.j_r * c - v.j_phi * s) / v.j_z,
        (v.j_r * s + v.j_phi * c) / v.j_z,
    ])
}

fn chord_metrics(points: &[[f64; 3]]) -> (f64, f64) {
    let (a, b) = (points[0], points[points.len() - 1]);
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if len == 0.0 {
        return (0.0, 0.0);
    }
    let u = [d[0] / len, d[1] / len, d[2] / len];
    let mut worst: f64 = 0.0;
    for p in points {
        let w = [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
        let t = w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
        let perp = [w[0] - t * u[0], w[1] - t * u[1], w[2] - t * u[2]];
        worst = worst.max((perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]).sqrt());
    }
    (worst, len)
}

fn trace_one<W: Wave>(wave: &W, seed: (f64, f64), opt: &FluxOptions) -> Trajectory {
    let (r0, phi0) = seed;
    let mut x = r0 * phi0.cos();
    let mut y = r0 * phi0.sin();
    let mut z = opt.z_start;
    let mut phi_prev = phi0;
    let mut samples = vec![[r0, phi0, z]];
    let mut cart = vec![[x, y, z]];
    let steps = ((opt.z_end - opt.z_start) / opt.step).round().max(1.0) as usize;
    let h = (opt.z_end - opt.z_start) / steps as f64;
    let mut truncated = false;
    let f = |x: f64, y: f64, z: f64| slope(wave, x, y, z, opt.density_floor);
    if f(x, y, z).is_none() {
        truncated = true;
    } else {
        for _ in 0..steps {
            let step = (|| {
                let k1 = f(x, y, z)?;
                let k2 = f(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], z + 0.5 * h)?;
                let k3 = f(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], z + 0.5 * h)?;
                let k4 = f(x + h * k3[0], y + h * k3[1], z + h)?;
                Some([
                    x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                    y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                ])
            })();
            let Some([nx, ny]) = step else {
                truncated = true;
                break;
            };
            x = nx;
            y = ny;
            z += h;
            let raw = y.atan2(x);
            let phi = phi_prev
                + (raw - phi_prev + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
                - std::f64::consts::PI;
            phi_prev = phi;
            samples.push([x.hypot(y), phi, z]);
            cart.push([x, y, z]);
        }
    }
    let (max_chord_deviation, chord_length) = chord_metrics(&cart);
    Trajectory {
        seed,
        samples,
        truncated,
        max_chord_deviation,
        chord_length,
    }
}

/// Integrate (dx/dz, dy/dz) = v⊥/v_z from each seed with fixed-step RK4.
/// Seeds are traced in parallel; results are in seed order.
pub fn trace_flux_lines<W: Wave>(
    wave: &W,
    seeds: &[(f64, f64)],
    opt: &FluxOptions,
) -> Result<Vec<Trajectory>> {
    if !(opt.step > 0.0) {
        return Err(Error::config("flux-line step must be > 0"));
    }
    if !(opt.z_end > opt.z_start) {
        return Err(Error::config("flux-line range must have z_end > z_start"));
    }
    if !(opt.density_floor >= 0.0) {
        return Err(Error::config("density floor must be ≥ 0"));
    }
    Ok(seeds.par_iter().map(|&s| trace_one(wave, s, opt)).collect())
}

/// CSV rows (seed, z, r, phi, x, y, truncated).
pub fn write_trajectories_csv(path: &Path, lines: &[Trajectory]) -> Result<()> {
    let mut rows = Vec::new();
    for (k, t) in lines.iter().enumerate() {
        for &[r, phi, z] in &t.samples {
            rows.push(vec![
                k as f64,
                z,
                r,
                phi,
                r * phi.cos(),
                r * phi.sin(),
                f64::from(u8::from(t.truncated)),
            ]);
        }
    }
    io::write_csv_table(
        path,
        &["seed", "z", "r", "phi", "x", "y", "truncated"],
        &rows,
    )
}
