//! Probability density and current, in units where ħ/m = 1 (multiply by ħ/m for SI).

use num_complex::Complex64;

use super::field::ComplexField;
use super::modes::Wave;

/// Cylindrical components of Im(ψ*∇ψ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Current {
    pub j_r: f64,
    pub j_phi: f64,
    pub j_z: f64,
}

pub fn probability_density<W: Wave>(wave: &W, r: f64, phi: f64, z: f64) -> f64 {
    wave.psi(r, phi, z).norm_sqr()
}

/// Analytic current Im(ψ*∇ψ); j_φ is taken as 0 on the axis.
pub fn probability_current<W: Wave>(wave: &W, r: f64, phi: f64, z: f64) -> Current {
    let (psi, g) = wave.psi_grad(r, phi, z);
    let c = psi.conj();
    Current {
        j_r: (c * g[0]).im,
        j_phi: if r == 0.0 { 0.0 } else { (c * g[1]).im },
        j_z: (c * g[2]).im,
    }
}

/// Local wave vector Im(ψ*∇ψ)/|ψ|², or None where |ψ|² ≤ `floor`.
pub fn local_wavevector<W: Wave>(
    wave: &W,
    r: f64,
    phi: f64,
    z: f64,
    floor: f64,
) -> Option<Current> {
    let (psi, g) = wave.psi_grad(r, phi, z);
    let rho = psi.norm_sqr();
    if !(rho > floor) {
        return None;
    }
    let c = psi.conj();
    Some(Current {
        j_r: (c * g[0]).im / rho,
        j_phi: if r == 0.0 { 0.0 } else { (c * g[1]).im / rho },
        j_z: (c * g[2]).im / rho,
    })
}

/// Transverse current of a sampled field from the phase gradient, |ψ|²∇arg ψ.
/// Pixels are flagged (None) near the border and where |ψ|² is below
/// `rel_floor`·max|ψ|² at the pixel or any stencil neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentMap {
    pub nx: usize,
    pub ny: usize,
    pub samples: Vec<Option<(f64, f64)>>,
}

impl CurrentMap {
    pub fn at(&self, i: usize, j: usize) -> Option<(f64, f64)> {
        self.samples[j * self.nx + i]
    }

    pub fn flagged(&self) -> usize {
        self.samples.iter().filter(|s| s.is_none()).count()
    }
}

/// Fourth-order central difference of the phase, evaluated through phase ratios
/// so that no unwrapping is needed.
pub fn sampled_current(field: &ComplexField, rel_floor: f64) -> CurrentMap {
    let (nx, ny) = (field.nx, field.ny);
    let peak = field
        .values
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max);
    let floor = rel_floor * peak;
    let h = field.pitch;
    let mut samples = vec![None; nx * ny];
    let ok = |v: Complex64| v.norm_sqr() > floor && v.norm_sqr() > 0.0;
    for j in 2..ny.saturating_sub(2) {
        for i in 2..nx.saturating_sub(2) {
            let c = field.at(i, j);
            let stencil = [
                field.at(i - 2, j),
                field.at(i - 1, j),
                field.at(i + 1, j),
                field.at(i + 2, j),
                field.at(i, j - 2),
                field.at(i, j - 1),
                field.at(i, j + 1),
                field.at(i, j + 2),
            ];
            if !ok(c) || !stencil.iter().all(|v| ok(*v)) {
                continue;
            }
            let d = |a: Complex64| (a * c.conj()).arg();
            let gx = (8.0 * (d(stencil[2]) - d(stencil[1])) - (d(stencil[3]) - d(stencil[0])))
                / (12.0 * h);
            let gy = (8.0 * (d(stencil[6]) - d(stencil[5])) - (d(stencil[7]) - d(stencil[4])))
                / (12.0 * h);
            let rho = c.norm_sqr();
            samples[j * nx + i] = Some((rho * gx, rho * gy));
        }
    }
    CurrentMap { nx, ny, samples }
}
