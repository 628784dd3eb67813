//! Paraxial Laguerre–Gauss modes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::factorial;

/// Laguerre–Gauss mode LG_{l,p} with waist w0 at z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LGParams {
    pub l: i32,
    pub p: u32,
    pub w0: f64,
    pub k: f64,
}

/// Generalized Laguerre polynomial L_n^α(x) by the three-term recurrence.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for i in 1..n {
        let fi = f64::from(i);
        let next = ((2.0 * fi + 1.0 + alpha - x) * cur - (fi + alpha) * prev) / (fi + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

impl LGParams {
    pub fn new(l: i32, p: u32, w0: f64, k: f64) -> Result<Self> {
        let s = Self { l, p, w0, k };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return Err(Error::domain(format!("waist must be > 0, got {}", self.w0)));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::domain(format!(
                "wavenumber must be > 0, got {}",
                self.k
            )));
        }
        Ok(())
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    /// Rayleigh range k w0²/2.
    pub fn z_r(&self) -> f64 {
        0.5 * self.k * self.w0 * self.w0
    }

    /// Spot size w(z).
    pub fn w(&self, z: f64) -> f64 {
        self.w0 * (1.0 + (z / self.z_r()).powi(2)).sqrt()
    }

    /// 1/R(z) written as z/(z² + z_R²), finite at the waist.
    pub fn inverse_curvature(&self, z: f64) -> f64 {
        let zr = self.z_r();
        z / (z * z + zr * zr)
    }

    /// Gouy phase (|l| + 2p + 1) arctan(z/z_R).
    pub fn gouy(&self, z: f64) -> f64 {
        f64::from(self.abs_l() + 2 * self.p + 1) * (z / self.z_r()).atan()
    }

    /// Normalization C_{l,p} = √(2p!/(π(p+|l|)!)).
    pub fn c_lp(&self) -> f64 {
        (2.0 * factorial(self.p) / (PI * factorial(self.p + self.abs_l()))).sqrt()
    }

    /// Transverse probability density |ψ|² (unit L² norm per plane).
    pub fn density(&self, r: f64, z: f64) -> f64 {
        let w = self.w(z);
        let s = 2.0 * r * r / (w * w);
        let a = self.abs_l();
        let lag = laguerre(self.p, f64::from(a), s);
        self.c_lp().powi(2) / (w * w) * s.powi(a as i32) * (-s).exp() * lag * lag
    }

    /// Complex amplitude at (r, φ, z).
    pub fn eval(&self, r: f64, phi: f64, z: f64) -> Complex64 {
        let w = self.w(z);
        let a = self.abs_l();
        let rho = std::f64::consts::SQRT_2 * r / w;
        let amp = self.c_lp() / w
            * rho.powi(a as i32)
            * (-(r * r) / (w * w)).exp()
            * laguerre(self.p, f64::from(a), rho * rho);
        let phase =
            0.5 * self.k * r * r * self.inverse_curvature(z) + f64::from(self.l) * phi + self.k * z
                - self.gouy(z);
        Complex64::from_polar(amp, phase)
    }
}

/// Checked evaluation of a Laguerre–Gauss mode.
pub fn eval_lg(params: &LGParams, r: f64, phi: f64, z: f64) -> Result<Complex64> {
    params.validate()?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!("r must be ≥ 0, got {r}")));
    }
    Ok(params.eval(r, phi, z))
}
