//! Fields of a Laguerre–Gauss beam, by quadrature and (for p = 0) in closed form.
//! Radial integrals run in the dimensionless variable u = r/w(z).

use std::f64::consts::PI;

use super::{EMSample, LineDensity};
use crate::constants::{EPSILON_0, HBAR, MU_0, M_ELECTRON};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, QuadControl};
use crate::specfun::{factorial, incomplete_gamma_lower, incomplete_gamma_upper};
use crate::wavefield::laguerre;
use crate::wavefield::LGParams;

/// Charge density λ|ψ|² [C/m³].
pub fn lg_density(params: &LGParams, eta: &LineDensity, r: f64, z: f64) -> Result<f64> {
    params.validate()?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!("r must be ≥ 0, got {r}")));
    }
    Ok(eta.lambda() * params.density(r, z))
}

/// w² |ψ|² as a function of u = r/w (independent of z).
fn scaled_density(params: &LGParams, u: f64) -> f64 {
    let a = params.abs_l();
    let s = 2.0 * u * u;
    let lag = laguerre(params.p, f64::from(a), s);
    params.c_lp().powi(2) * s.powi(a as i32) * (-s).exp() * lag * lag
}

/// ∫_0^r r'^{2m+1} |ψ|² dr' = w^{2m} ∫_0^{r/w} u^{2m+1} w²|ψ|² du.
fn moment(params: &LGParams, r: f64, z: f64, m: i32, ctrl: &QuadControl) -> Result<f64> {
    let w = params.w(z);
    let upper = r / w;
    if upper == 0.0 {
        return Ok(0.0);
    }
    // Past u ≈ 8 + √p the integrand is negligible; splitting keeps the peak resolved.
    let knee = upper.min(8.0 + f64::from(params.p).sqrt() * 2.0);
    let f = |u: f64| u.powi(2 * m + 1) * scaled_density(params, u);
    let mut v = integrate(f, 0.0, knee, ctrl)?.value;
    if upper > knee {
        v += integrate(f, knee, upper, ctrl)?.value;
    }
    Ok(v * w.powi(2 * m))
}

/// E_r = (λ/ε0 r) ∫_0^r r' |ψ|² dr' by adaptive quadrature.
pub fn lg_er_quadrature(
    params: &LGParams,
    eta: &LineDensity,
    r: f64,
    z: f64,
    ctrl: &QuadControl,
) -> Result<f64> {
    params.validate()?;
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(eta.lambda() / (EPSILON_0 * r) * moment(params, r, z, 0, ctrl)?)
}

/// p = 0 closed form λ(|l|! − Γ(|l|+1, 2r²/w²))/(2π ε0 r |l|!), written with the
/// lower incomplete gamma so that small radii keep full precision.
pub fn lg_er_closed_form(params: &LGParams, eta: &LineDensity, r: f64, z: f64) -> Result<f64> {
    params.validate()?;
    if params.p != 0 {
        return Err(Error::domain("the closed-form E_r holds for p = 0 only"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let a = params.abs_l();
    let w = params.w(z);
    let s = 2.0 * r * r / (w * w);
    let gamma_lower = incomplete_gamma_lower(f64::from(a) + 1.0, s)?;
    Ok(eta.lambda() * gamma_lower / (2.0 * PI * EPSILON_0 * r * factorial(a)))
}

/// p = 0 closed form B_z = μ0 l (λħ/m) Γ(|l|, 2r²/w²)/(π |l|! w²).
pub fn lg_bz_closed_form(params: &LGParams, eta: &LineDensity, r: f64, z: f64) -> Result<f64> {
    params.validate()?;
    if params.p != 0 {
        return Err(Error::domain("the closed-form B_z holds for p = 0 only"));
    }
    if params.l == 0 {
        return Ok(0.0);
    }
    let a = params.abs_l();
    let w = params.w(z);
    let s = 2.0 * r * r / (w * w);
    let g = incomplete_gamma_upper(f64::from(a), s)?;
    Ok(
        MU_0 * f64::from(params.l) * eta.lambda() * HBAR / M_ELECTRON * g
            / (PI * factorial(a) * w * w),
    )
}

/// Full field sample of the LG beam at (r, z).
pub fn lg_em(
    params: &LGParams,
    eta: &LineDensity,
    r: f64,
    z: f64,
    ctrl: &QuadControl,
) -> Result<EMSample> {
    params.validate()?;
    ctrl.validate()?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("r must be finite and ≥ 0, got {r}")));
    }
    let lambda = eta.lambda();
    let pref = MU_0 * lambda * HBAR / M_ELECTRON;
    let (e_r, b_phi) = if r == 0.0 {
        (0.0, 0.0)
    } else {
        let i1 = moment(params, r, z, 0, ctrl)?;
        let i3 = moment(params, r, z, 1, ctrl)?;
        let zr = params.z_r();
        let den = z * z + zr * zr;
        let curvature = params.k * (z * z - zr * zr) / (2.0 * den * den);
        let gouy = f64::from(params.abs_l() + 2 * params.p + 1) * zr / den;
        (
            lambda / (EPSILON_0 * r) * i1,
            pref / r * ((params.k - gouy) * i1 - curvature * i3),
        )
    };
    let b_z = if params.l == 0 {
        0.0
    } else {
        let w = params.w(z);
        let f = |u: f64| scaled_density(params, u) / u;
        let tail = integrate_to_infinity(f, r / w, ctrl)?.value;
        pref * f64::from(params.l) * tail / (w * w)
    };
    Ok(EMSample::from_fields(r, e_r, b_phi, b_z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MU_B;

    fn beam(l: i32, p: u32) -> LGParams {
        LGParams::new(l, p, 1e-9, 2.7e12).unwrap()
    }

    #[test]
    fn density_examples() {
        let eta = LineDensity::new(5.0).unwrap();
        let b = beam(0, 0);
        let v = lg_density(&b, &eta, 0.0, 0.0).unwrap();
        assert!((v / (2.0 * eta.lambda() / (PI * 1e-18)) - 1.0).abs() < 1e-14);
        assert_eq!(lg_density(&beam(1, 0), &eta, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn density_integrates_to_line_charge() {
        let eta = LineDensity::new(5.0).unwrap();
        for (l, p) in [(0, 0), (2, 0), (1, 2)] {
            let b = beam(l, p);
            for z in [0.0, b.z_r(), -3.0 * b.z_r()] {
                let w = b.w(z);
                let q = eta.lambda()
                    * integrate_to_infinity(
                        |u| {
                            2.0 * PI * u * w * w * lg_density(&b, &eta, u * w, z).unwrap()
                                / eta.lambda()
                        },
                        0.0,
                        &QuadControl::default(),
                    )
                    .unwrap()
                    .value;
                assert!(
                    (q / eta.lambda() - 1.0).abs() < 1e-8,
                    "l={l} p={p} z={z}: {}",
                    q / eta.lambda()
                );
            }
        }
    }

    #[test]
    fn closed_form_and_quadrature_agree() {
        let eta = LineDensity::new(1.0).unwrap();
        for l in [0, 1, 2, -3] {
            let b = beam(l, 0);
            for z in [0.0, b.z_r()] {
                let w = b.w(z);
                for i in 0..=49 {
                    let r = (0.1 + 0.1 * i as f64) * w;
                    let a = lg_er_closed_form(&b, &eta, r, z).unwrap();
                    let q = lg_er_quadrature(&b, &eta, r, z, &QuadControl::default()).unwrap();
                    assert!((a / q - 1.0).abs() < 1e-8, "l={l} z={z} r/w={}", r / w);
                }
            }
        }
    }

    #[test]
    fn coulomb_tail() {
        let eta = LineDensity::new(1.0).unwrap();
        let b = beam(2, 0);
        let r = 40.0 * b.w0;
        let e = lg_er_closed_form(&b, &eta, r, 0.0).unwrap();
        assert!((e / (eta.lambda() / (2.0 * PI * EPSILON_0 * r)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn no_axial_field_without_charge() {
        let eta = LineDensity::new(1.0).unwrap();
        let b = beam(0, 1);
        for z in [0.0, 1e-6] {
            for r in [0.0, 3e-10, 2e-9] {
                assert_eq!(
                    lg_em(&b, &eta, r, z, &QuadControl::default()).unwrap().b_z,
                    0.0
                );
            }
        }
    }

    #[test]
    fn axial_field_quadrature_matches_closed_form() {
        let eta = LineDensity::new(1.0).unwrap();
        for l in [1, 2, -2] {
            let b = beam(l, 0);
            for r in [0.0, 0.3e-9, 1e-9, 2.5e-9] {
                let q = lg_em(&b, &eta, r, 0.0, &QuadControl::default())
                    .unwrap()
                    .b_z;
                let c = lg_bz_closed_form(&b, &eta, r, 0.0).unwrap();
                assert!(
                    (q - c).abs() <= 1e-9 * c.abs().max(1e-30),
                    "l={l} r={r}: {q} vs {c}"
                );
            }
        }
        // On axis: B_z(0) = 2μ0 μ_B η sgn(l)/(π w²) for |l| ≥ 1 at p = 0.
        let b = beam(1, 0);
        let c = lg_bz_closed_form(&b, &eta, 0.0, 0.0).unwrap();
        assert!((c / (2.0 * MU_0 * MU_B * eta.eta / (PI * b.w0 * b.w0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn azimuthal_field_at_waist_uses_plain_wavenumber_shift() {
        let eta = LineDensity::new(1.0).unwrap();
        let b = beam(1, 0);
        let r = 1.3e-9;
        let s = lg_em(&b, &eta, r, 0.0, &QuadControl::default()).unwrap();
        let i1 =
            lg_er_quadrature(&b, &eta, r, 0.0, &QuadControl::default()).unwrap() * EPSILON_0 * r
                / eta.lambda();
        let i3 = super::moment(&b, r, 0.0, 1, &QuadControl::default()).unwrap();
        let zr = b.z_r();
        let want = MU_0 * eta.lambda() * HBAR / M_ELECTRON / r
            * ((b.k - 2.0 / zr) * i1 + b.k / (2.0 * zr * zr) * i3);
        assert!((s.b_phi / want - 1.0).abs() < 1e-12);
        assert_eq!(s.s_r, 0.0);
    }

    #[test]
    fn closed_forms_need_p_zero() {
        let eta = LineDensity::new(1.0).unwrap();
        assert!(lg_er_closed_form(&beam(1, 1), &eta, 1e-9, 0.0).is_err());
        assert!(lg_bz_closed_form(&beam(1, 1), &eta, 1e-9, 0.0).is_err());
    }
}
