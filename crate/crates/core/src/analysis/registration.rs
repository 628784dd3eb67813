//! Rotation registration by polar resampling and circular cross-correlation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::ComplexField;

/// Real image on a square-pixel grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    pub data: Vec<f64>,
    /// Complex amplitude behind `data`, when known. Interpolating the amplitude
    /// and squaring keeps twice the margin to Nyquist of interpolating |ψ|².
    pub amplitude: Option<Vec<Complex64>>,
}

impl Image {
    pub fn new(nx: usize, ny: usize, pitch: f64, data: Vec<f64>) -> Result<Self> {
        if data.len() != nx * ny || nx < 4 || ny < 4 {
            return Err(Error::config(format!(
                "image of {} samples does not match {nx}×{ny}",
                data.len()
            )));
        }
        if !(pitch > 0.0) {
            return Err(Error::config("image pitch must be > 0"));
        }
        Ok(Self {
            nx,
            ny,
            pitch,
            data,
            amplitude: None,
        })
    }

    /// |ψ|² of a sampled field.
    pub fn intensity_of(field: &ComplexField) -> Self {
        Self {
            nx: field.nx,
            ny: field.ny,
            pitch: field.pitch,
            data: field.intensity(),
            amplitude: Some(field.values.clone()),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            amplitude: self
                .amplitude
                .as_ref()
                .map(|a| a.iter().map(|v| v * factor.sqrt()).collect()),
            ..*self
        }
    }

    fn index(&self, i: isize, j: isize) -> usize {
        let i = i.clamp(0, self.nx as isize - 1) as usize;
        let j = j.clamp(0, self.ny as isize - 1) as usize;
        j * self.nx + i
    }

    /// Cubic-convolution (Keys, a = −½) interpolation of `data` at pixel coordinates (x, y).
    pub fn bicubic(&self, x: f64, y: f64) -> f64 {
        self.convolve(x, y, 0.0, |k| self.data[k])
    }

    /// Intensity at (x, y), interpolated through the amplitude when one is attached.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        match &self.amplitude {
            Some(a) => self
                .convolve(x, y, Complex64::new(0.0, 0.0), |k| a[k])
                .norm_sqr(),
            None => self.bicubic(x, y),
        }
    }

    fn convolve<T>(&self, x: f64, y: f64, zero: T, value: impl Fn(usize) -> T) -> T
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let (fx, fy) = (x.floor(), y.floor());
        let (ix, iy) = (fx as isize, fy as isize);
        let wx = keys_weights(x - fx);
        let wy = keys_weights(y - fy);
        let mut acc = zero;
        for (b, wyb) in wy.iter().enumerate() {
            let mut row = zero;
            for (a, wxa) in wx.iter().enumerate() {
                row = row + value(self.index(ix + a as isize - 1, iy + b as isize - 1)) * *wxa;
            }
            acc = acc + row * *wyb;
        }
        acc
    }

    /// Intensity-weighted centroid in pixel coordinates.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let (mut s, mut sx, mut sy) = (0.0, 0.0, 0.0);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let v = self.data[j * self.nx + i];
                s += v;
                sx += v * i as f64;
                sy += v * j as f64;
            }
        }
        (s > 0.0).then(|| (sx / s, sy / s))
    }
}

fn keys_weights(t: f64) -> [f64; 4] {
    let a = -0.5;
    let w = |x: f64| {
        let x = x.abs();
        if x <= 1.0 {
            ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
        } else if x < 2.0 {
            ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
        } else {
            0.0
        }
    };
    [w(1.0 + t), w(t), w(1.0 - t), w(2.0 - t)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    /// Pixel (⌊nx/2⌋, ⌊ny/2⌋), where synthetic beams are centered.
    Geometric,
    /// Intensity centroid of the reference, for off-center data.
    Centroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegistrationOptions {
    /// Outer radius of the polar annulus [m].
    pub r_max: f64,
    pub n_r: usize,
    /// Azimuthal samples; must be a multiple of 2ℓ.
    pub n_theta: usize,
    pub center: Center,
}

impl RegistrationOptions {
    pub fn new(r_max: f64) -> Self {
        Self {
            r_max,
            n_r: 48,
            n_theta: 720,
            center: Center::Geometric,
        }
    }
}

/// Registered rotation of a frame relative to the reference, counterclockwise positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    /// In [−π/(2ℓ), π/(2ℓ)).
    pub angle: f64,
    /// Half-width of the correlation peak at which the mismatch doubles.
    pub uncertainty: f64,
    /// Peak normalized correlation of the azimuthal structure.
    pub correlation: f64,
}

struct Polar {
    rows: Vec<Vec<f64>>,
    radii: Vec<f64>,
}

fn polar(img: &Image, c: (f64, f64), opts: &RegistrationOptions) -> Result<Polar> {
    let rmax_px = opts.r_max / img.pitch;
    let limit =
        (c.0.min(c.1)
            .min(img.nx as f64 - 1.0 - c.0)
            .min(img.ny as f64 - 1.0 - c.1))
            - 2.0;
    if rmax_px > limit {
        return Err(Error::config(format!(
            "registration radius of {rmax_px:.1} px exceeds the image half-width {limit:.1} px"
        )));
    }
    let radii: Vec<f64> = (1..=opts.n_r)
        .map(|i| rmax_px * i as f64 / opts.n_r as f64)
        .collect();
    let rows = radii
        .iter()
        .map(|&r| {
            (0..opts.n_theta)
                .map(|t| {
                    let th = 2.0 * PI * t as f64 / opts.n_theta as f64;
                    img.sample(c.0 + r * th.cos(), c.1 + r * th.sin())
                })
                .collect()
        })
        .collect();
    Ok(Polar { rows, radii })
}

/// Rotation θ minimizing the polar-weighted Σ(frame(φ − θ) − reference(φ))²,
/// modulo the 2ℓ-fold petal period π/ℓ.
pub fn measure_rotation(
    frame: &Image,
    reference: &Image,
    ell: u32,
    opts: &RegistrationOptions,
) -> Result<Rotation> {
    if (frame.nx, frame.ny) != (reference.nx, reference.ny) || frame.pitch != reference.pitch {
        return Err(Error::config("frame and reference geometries differ"));
    }
    if ell == 0 {
        return Err(Error::config("ell must be ≥ 1"));
    }
    let fold = 2 * ell as usize;
    if opts.n_r == 0 || opts.n_theta < 4 * fold || opts.n_theta % fold != 0 {
        return Err(Error::config(format!(
            "n_theta must be a multiple of 2ℓ = {fold} and n_r ≥ 1"
        )));
    }
    if !(opts.r_max > 0.0) {
        return Err(Error::config("registration radius must be > 0"));
    }
    for img in [frame, reference] {
        if !(img.data.iter().sum::<f64>() > 0.0) {
            return Err(Error::domain("image has no positive total intensity"));
        }
    }
    let c = match opts.center {
        Center::Geometric => ((frame.nx / 2) as f64, (frame.ny / 2) as f64),
        Center::Centroid => reference
            .centroid()
            .ok_or_else(|| Error::domain("reference has no centroid"))?,
    };
    let pf = polar(frame, c, opts)?;
    let pr = polar(reference, c, opts)?;
    let n = opts.n_theta;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut cross = vec![Complex64::new(0.0, 0.0); n];
    let (mut ef, mut er, mut tf, mut tr) = (0.0, 0.0, 0.0, 0.0);
    for ((rf, rr), &r) in pf.rows.iter().zip(&pr.rows).zip(&pf.radii) {
        let mut a: Vec<Complex64> = rf.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut b: Vec<Complex64> = rr.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fwd.process(&mut a);
        fwd.process(&mut b);
        tf += r * a[0].norm_sqr();
        tr += r * b[0].norm_sqr();
        for k in 1..n {
            cross[k] += a[k] * b[k].conj() * r;
            ef += r * a[k].norm_sqr();
            er += r * b[k].norm_sqr();
        }
    }
    // Cartesian pixelation alone leaves ~1e-9 of azimuthal structure on a round beam
    if ef <= 1e-6 * tf || er <= 1e-6 * tr {
        return Err(Error::AmbiguousRotation);
    }
    inv.process(&mut cross);
    // C[s] = Σ_r r Σ_t f(r, t + s) g(r, t), folded over the 2ℓ-fold symmetry
    let m = n / fold;
    let norm = (ef * er).sqrt();
    let folded: Vec<f64> = (0..m)
        .map(|s| (0..fold).map(|q| cross[s + q * m].re).sum::<f64>() / (fold as f64 * norm))
        .collect();
    let (i, &c0) = folded
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("folded correlation is non-empty");
    let cm = folded[(i + m - 1) % m];
    let cp = folded[(i + 1) % m];
    let curv = cm - 2.0 * c0 + cp;
    let delta = if curv < 0.0 {
        0.5 * (cm - cp) / curv
    } else {
        0.0
    };
    let step = 2.0 * PI / n as f64;
    let period = PI / f64::from(ell);
    let theta = (i as f64 + delta) * step;
    let angle = (theta + 0.5 * period).rem_euclid(period) - 0.5 * period;
    let peak = c0 - 0.25 * (cm - cp) * delta;
    let second = -curv / (step * step);
    let uncertainty = if second > 0.0 {
        ((1.0 - peak).max(1e-12) / (0.5 * second)).sqrt()
    } else {
        period
    };
    Ok(Rotation {
        angle,
        uncertainty,
        correlation: peak,
    })
}

/// Map raw angles (each reduced modulo π/ℓ) to a continuous sequence.
pub fn unwrap_angles(raw: &[f64], ell: u32) -> Vec<f64> {
    let period = PI / f64::from(ell);
    let mut out = Vec::with_capacity(raw.len());
    for (k, &a) in raw.iter().enumerate() {
        if k == 0 {
            out.push(a);
            continue;
        }
        let step = (a - raw[k - 1] + 0.5 * period).rem_euclid(period) - 0.5 * period;
        out.push(out[k - 1] + step);
    }
    out
}
