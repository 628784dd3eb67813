//! Bessel modes: isotropic, anisotropic and the accelerating two-component superposition.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{jn, jn_prime};

/// Natural-unit defaults when nothing else is specified.
pub const NATURAL_K: f64 = 1.0;
pub const NATURAL_KZ: f64 = 0.6;

fn check_d(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::domain(format!(
            "anisotropy D must lie in [0, 1], got {d}"
        )));
    }
    Ok(())
}

fn check_wavenumbers(k: f64, kr: f64, kz: f64) -> Result<()> {
    if !(kr > 0.0 && kz > 0.0 && k.is_finite()) {
        return Err(Error::domain(format!(
            "need k_r > 0 and k_z > 0 (k = {k}, k_r = {kr}, k_z = {kz})"
        )));
    }
    if ((kr * kr + kz * kz) / (k * k) - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "k² ≠ k_r² + k_z² (k = {k}, k_r = {kr}, k_z = {kz})"
        )));
    }
    Ok(())
}

/// Unwrapped arctan(sin θ / (cos θ + D)), continuous in θ with value 0 at θ = 0.
/// For D < 1 the continuous branch stays within π/2 of θ, which fixes the winding.
fn unwrapped_atan(theta: f64, d: f64) -> f64 {
    let principal = theta.sin().atan2(theta.cos() + d);
    principal + 2.0 * PI * ((theta - principal) / (2.0 * PI)).round()
}

/// The nonlinear azimuthal phase φ_ℓ(φ) = −φ + (1/ℓ) arctan(sin 2ℓφ / (cos 2ℓφ + D)).
pub fn varphi(ell: i32, d: f64, phi: f64) -> Result<f64> {
    if ell == 0 {
        return Err(Error::domain("φ_ℓ is undefined for ℓ = 0"));
    }
    check_d(d)?;
    Ok(varphi_unchecked(ell, d, phi))
}

pub(crate) fn varphi_unchecked(ell: i32, d: f64, phi: f64) -> f64 {
    let l = f64::from(ell);
    -phi + unwrapped_atan(2.0 * l * phi, d) / l
}

/// dφ_ℓ/dφ.
pub fn varphi_derivative(ell: i32, d: f64, phi: f64) -> f64 {
    let c = (2.0 * f64::from(ell) * phi).cos();
    -1.0 + 2.0 * (1.0 + d * c) / (1.0 + d * d + 2.0 * d * c)
}

/// Amplitude envelope (1 + 2D cos 2ℓφ / (1 + D²))^{1/2}.
pub fn envelope(ell: i32, d: f64, phi: f64) -> f64 {
    let c = (2.0 * f64::from(ell) * phi).cos();
    (1.0 + 2.0 * d * c / (1.0 + d * d)).max(0.0).sqrt()
}

/// Weights of the ±ℓ OAM states in an anisotropic mode.
pub fn modal_weights(d: f64) -> Result<(f64, f64)> {
    check_d(d)?;
    let n = (1.0 + d * d).sqrt();
    Ok((1.0 / n, d / n))
}

/// One anisotropic Bessel component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub ell: i32,
    #[serde(rename = "D")]
    pub d: f64,
    pub k: f64,
    pub kr: f64,
    pub kz: f64,
}

impl ModeParams {
    /// Mode with given total and radial wavenumbers; k_z follows from k² = k_r² + k_z².
    pub fn new(ell: i32, d: f64, k: f64, kr: f64) -> Result<Self> {
        if !(kr > 0.0 && kr < k) {
            return Err(Error::domain(format!(
                "need 0 < k_r < k (k = {k}, k_r = {kr})"
            )));
        }
        let p = Self {
            ell,
            d,
            k,
            kr,
            kz: (k * k - kr * kr).sqrt(),
        };
        p.validate()?;
        Ok(p)
    }

    /// k = 1, k_z = 0.6.
    pub fn natural(ell: i32, d: f64) -> Result<Self> {
        let kr = (NATURAL_K * NATURAL_K - NATURAL_KZ * NATURAL_KZ).sqrt();
        let p = Self {
            ell,
            d,
            k: NATURAL_K,
            kr,
            kz: NATURAL_KZ,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_d(self.d)?;
        if self.ell == 0 && self.d != 0.0 {
            return Err(Error::domain(
                "ℓ = 0 is allowed only for the isotropic mode (D = 0)",
            ));
        }
        check_wavenumbers(self.k, self.kr, self.kz)
    }

    /// Anisotropic Bessel wave at (r, φ, z).
    pub fn eval(&self, r: f64, phi: f64, z: f64) -> Complex64 {
        self.components()[0].value(r, phi, z)
    }

    /// The same wave written with the explicit envelope and nonlinear phase.
    pub fn eval_polar_form(&self, r: f64, phi: f64, z: f64) -> Complex64 {
        let l = f64::from(self.ell);
        let phase = if self.ell == 0 {
            0.0
        } else {
            l * varphi_unchecked(self.ell, self.d, phi)
        };
        let amp = jn(self.ell, self.kr * r) * envelope(self.ell, self.d, phi);
        Complex64::from_polar(amp, self.kz * z + phase)
    }

    pub(crate) fn components(&self) -> [Component; 1] {
        let n = (1.0 + self.d * self.d).sqrt();
        [Component {
            order: self.ell,
            m: self.ell,
            c_pos: 1.0 / n,
            c_neg: self.d / n,
            kr: self.kr,
            kz: self.kz,
        }]
    }
}

/// Checked evaluation of the anisotropic mode.
pub fn eval_aniso(params: &ModeParams, r: f64, phi: f64, z: f64) -> Result<Complex64> {
    params.validate()?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!("r must be ≥ 0, got {r}")));
    }
    Ok(params.eval(r, phi, z))
}

/// Two components of charge +ℓ and −ℓ at common k with distinct k_z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelPair {
    pub ell: u32,
    #[serde(rename = "D")]
    pub d: f64,
    pub k: f64,
    pub kr1: f64,
    pub kr2: f64,
    pub kz1: f64,
    pub kz2: f64,
}

impl AccelPair {
    /// Pair from two radial wavenumbers at total wavenumber k.
    pub fn new(ell: u32, d: f64, k: f64, kr1: f64, kr2: f64) -> Result<Self> {
        for kr in [kr1, kr2] {
            if !(kr > 0.0 && kr < k) {
                return Err(Error::domain(format!(
                    "need 0 < k_r < k (k = {k}, k_r = {kr})"
                )));
            }
        }
        let p = Self {
            ell,
            d,
            k,
            kr1,
            kr2,
            kz1: (k * k - kr1 * kr1).sqrt(),
            kz2: (k * k - kr2 * kr2).sqrt(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Validity check. Equal longitudinal wavenumbers are accepted so that the
    /// non-rotating limit k_r1 = k_r2 can be studied; the kinematic laws reject it.
    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::domain("the accelerating pair needs ℓ ≥ 1"));
        }
        check_d(self.d)?;
        check_wavenumbers(self.k, self.kr1, self.kz1)?;
        check_wavenumbers(self.k, self.kr2, self.kz2)
    }

    /// Mean longitudinal wavenumber k̄_z.
    pub fn kbar(&self) -> f64 {
        0.5 * (self.kz1 + self.kz2)
    }

    /// Half difference Δk_z = (k_z1 − k_z2)/2.
    pub fn dkz(&self) -> f64 {
        0.5 * (self.kz1 - self.kz2)
    }

    /// Rotation period π/|Δk_z| along z.
    pub fn period(&self) -> f64 {
        PI / self.dkz().abs()
    }

    /// (𝒥⁺, 𝒥⁻) = J_ℓ(k_r1 r) ± J_ℓ(k_r2 r).
    pub fn j_pm(&self, r: f64) -> (f64, f64) {
        let l = self.ell as i32;
        let a = jn(l, self.kr1 * r);
        let b = jn(l, self.kr2 * r);
        (a + b, a - b)
    }

    /// The +ℓ component on its own.
    pub fn first(&self) -> ModeParams {
        ModeParams {
            ell: self.ell as i32,
            d: self.d,
            k: self.k,
            kr: self.kr1,
            kz: self.kz1,
        }
    }

    /// The −ℓ component on its own.
    pub fn second(&self) -> ModeParams {
        ModeParams {
            ell: -(self.ell as i32),
            d: self.d,
            k: self.k,
            kr: self.kr2,
            kz: self.kz2,
        }
    }

    /// Accelerating wave at (r, φ, z) in the envelope/𝒥± form.
    pub fn eval(&self, r: f64, phi: f64, z: f64) -> Complex64 {
        let l = self.ell as i32;
        let alpha = self.dkz() * z + f64::from(l) * varphi_unchecked(l, self.d, phi);
        let (jp, jm) = self.j_pm(r);
        let bracket = Complex64::new(jp * alpha.cos(), jm * alpha.sin());
        bracket * envelope(l, self.d, phi) * Complex64::from_polar(1.0, self.kbar() * z)
    }

    pub(crate) fn components(&self) -> [Component; 2] {
        let n = (1.0 + self.d * self.d).sqrt();
        let l = self.ell as i32;
        [
            Component {
                order: l,
                m: l,
                c_pos: 1.0 / n,
                c_neg: self.d / n,
                kr: self.kr1,
                kz: self.kz1,
            },
            Component {
                order: l,
                m: l,
                c_pos: self.d / n,
                c_neg: 1.0 / n,
                kr: self.kr2,
                kz: self.kz2,
            },
        ]
    }
}

/// Checked evaluation of the accelerating superposition.
pub fn eval_accel(pair: &AccelPair, r: f64, phi: f64, z: f64) -> Result<Complex64> {
    pair.validate()?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!("r must be ≥ 0, got {r}")));
    }
    Ok(pair.eval(r, phi, z))
}

/// Transverse phase of the accelerating wave (the k̄_z z carrier removed),
/// branch-tracked continuously in Δk_z z + ℓφ_ℓ.
pub fn arg_accel(pair: &AccelPair, r: f64, phi: f64, z: f64) -> Result<f64> {
    pair.validate()?;
    let l = pair.ell as i32;
    let (jp, jm) = pair.j_pm(r);
    let (j1, j2) = (0.5 * (jp + jm), 0.5 * (jp - jm));
    if jp.abs() <= 1e-14 * (j1.abs() + j2.abs()) || jp == 0.0 {
        return Err(Error::SingularRadius { r });
    }
    let rho = jm / jp;
    let alpha = pair.dkz() * z + f64::from(l) * varphi_unchecked(l, pair.d, phi);
    let n = (alpha / PI).round();
    let a = alpha - n * PI;
    let branch = if rho >= 0.0 { n * PI } else { -n * PI };
    let sign_shift = if jp < 0.0 { PI } else { 0.0 };
    Ok((rho * a.sin()).atan2(a.cos()) + branch + sign_shift)
}

/// Single Bessel term J_order(k_r r)(c₊e^{imφ} + c₋e^{−imφ})e^{ik_z z}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Component {
    pub order: i32,
    pub m: i32,
    pub c_pos: f64,
    pub c_neg: f64,
    pub kr: f64,
    pub kz: f64,
}

impl Component {
    fn angular(&self, phi: f64) -> (Complex64, Complex64) {
        let m = f64::from(self.m);
        let ep = Complex64::from_polar(1.0, m * phi);
        let em = ep.conj();
        let g = ep * self.c_pos + em * self.c_neg;
        let dg = Complex64::i() * m * (ep * self.c_pos - em * self.c_neg);
        (g, dg)
    }

    pub fn value(&self, r: f64, phi: f64, z: f64) -> Complex64 {
        let (g, _) = self.angular(phi);
        g * jn(self.order, self.kr * r) * Complex64::from_polar(1.0, self.kz * z)
    }

    /// (ψ, ∂_r ψ, (1/r)∂_φ ψ, ∂_z ψ).
    pub fn value_and_gradient(&self, r: f64, phi: f64, z: f64) -> (Complex64, [Complex64; 3]) {
        let x = self.kr * r;
        let j = jn(self.order, x);
        let dj = self.kr * jn_prime(self.order, x);
        let j_over_r = if self.m == 0 {
            0.0
        } else if x == 0.0 {
            if self.order.abs() == 1 {
                0.5 * self.kr * f64::from(self.order.signum())
            } else {
                0.0
            }
        } else {
            j / r
        };
        let (g, dg) = self.angular(phi);
        let ez = Complex64::from_polar(1.0, self.kz * z);
        let psi = g * j * ez;
        (
            psi,
            [
                g * dj * ez,
                dg * j_over_r * ez,
                psi * Complex64::i() * self.kz,
            ],
        )
    }
}

/// Waves with analytic value and cylindrical gradient.
pub trait Wave: Sync {
    fn psi(&self, r: f64, phi: f64, z: f64) -> Complex64;

    /// ψ and (∂_r ψ, (1/r)∂_φ ψ, ∂_z ψ).
    fn psi_grad(&self, r: f64, phi: f64, z: f64) -> (Complex64, [Complex64; 3]);
}

fn sum_components(cs: &[Component], r: f64, phi: f64, z: f64) -> (Complex64, [Complex64; 3]) {
    let mut psi = Complex64::new(0.0, 0.0);
    let mut grad = [Complex64::new(0.0, 0.0); 3];
    for c in cs {
        let (p, g) = c.value_and_gradient(r, phi, z);
        psi += p;
        for i in 0..3 {
            grad[i] += g[i];
        }
    }
    (psi, grad)
}

impl Wave for ModeParams {
    fn psi(&self, r: f64, phi: f64, z: f64) -> Complex64 {
        self.eval(r, phi, z)
    }

    fn psi_grad(&self, r: f64, phi: f64, z: f64) -> (Complex64, [Complex64; 3]) {
        sum_components(&self.components(), r, phi, z)
    }
}

impl Wave for AccelPair {
    fn psi(&self, r: f64, phi: f64, z: f64) -> Complex64 {
        self.eval(r, phi, z)
    }

    fn psi_grad(&self, r: f64, phi: f64, z: f64) -> (Complex64, [Complex64; 3]) {
        sum_components(&self.components(), r, phi, z)
    }
}
