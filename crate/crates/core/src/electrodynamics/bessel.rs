//! Fields of an isotropic Bessel beam.

use super::{EMSample, LineDensity};
use crate::constants::{EPSILON_0, MU_0, MU_B};
use crate::error::{Error, Result};
use crate::specfun::{jn_pair, zeta_ell, SeriesControl};
use crate::wavefield::ModeParams;

/// x J_ℓ² − 2ℓ J_ℓ J_{ℓ−1} + x J_{ℓ−1}² at x = k_r r.
pub fn bessel_bracket(ell: i32, x: f64) -> f64 {
    let (j, jm1) = jn_pair(ell, x);
    x * j * j - 2.0 * f64::from(ell) * j * jm1 + x * jm1 * jm1
}

/// E_r written as (ηe r/2ε0)[(J_ℓ + J_{ℓ−1})² − 2(1 + ℓ/(k_r r)) J_ℓ J_{ℓ−1}].
pub fn bessel_er_expanded(mode: &ModeParams, eta: &LineDensity, r: f64) -> f64 {
    let x = mode.kr * r;
    if x == 0.0 {
        return 0.0;
    }
    let (j, jm1) = jn_pair(mode.ell, x);
    eta.lambda() * r / (2.0 * EPSILON_0)
        * ((j + jm1).powi(2) - 2.0 * (1.0 + f64::from(mode.ell) / x) * j * jm1)
}

/// E_r, B_φ, B_z and S of an isotropic (D = 0) Bessel beam at radius r.
pub fn bessel_em(
    mode: &ModeParams,
    eta: &LineDensity,
    r: f64,
    ctrl: &SeriesControl,
) -> Result<EMSample> {
    mode.validate()?;
    if mode.d != 0.0 {
        return Err(Error::domain(
            "the analytic Bessel fields need an isotropic mode (D = 0)",
        ));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("r must be finite and ≥ 0, got {r}")));
    }
    let bracket = bessel_bracket(mode.ell, mode.kr * r);
    let e_r = eta.lambda() / (2.0 * EPSILON_0 * mode.kr) * bracket;
    let b0 = eta.eta * MU_0 * MU_B;
    let b_phi = b0 * mode.kz / mode.kr * bracket;
    let b_z = if mode.ell == 0 {
        0.0
    } else {
        b0 * (f64::from(mode.ell.signum()) - 2.0 * zeta_ell(mode.ell, mode.kr, r, ctrl)?)
    };
    Ok(EMSample::from_fields(r, e_r, b_phi, b_z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{C_LIGHT, HBAR, M_ELECTRON};
    use crate::quadrature::{integrate, QuadControl};
    use crate::specfun::jn;

    fn mode(ell: i32) -> ModeParams {
        // 300 keV-scale wavenumbers with a 10 mrad cone.
        let k = 2.7e12;
        ModeParams::new(ell, 0.0, k, 0.01 * k).unwrap()
    }

    fn gauss_oracle(m: &ModeParams, eta: &LineDensity, r: f64) -> f64 {
        let x = m.kr * r;
        let panels = (x / 2.0).ceil().max(1.0) as usize;
        let h = x / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            s += integrate(
                |t| jn(m.ell, t).powi(2) * t,
                i as f64 * h,
                (i + 1) as f64 * h,
                &QuadControl::default(),
            )
            .unwrap()
            .value;
        }
        eta.lambda() * s / (EPSILON_0 * r * m.kr * m.kr)
    }

    #[test]
    fn on_axis_values() {
        let eta = LineDensity::new(3.0e8).unwrap();
        let c = SeriesControl::default();
        let b0 = eta.eta * MU_0 * MU_B;
        let mut bz = Vec::new();
        for ell in [1, 2, 3] {
            let s = bessel_em(&mode(ell), &eta, 0.0, &c).unwrap();
            assert_eq!(s.e_r, 0.0);
            assert_eq!(s.b_z, b0);
            bz.push(s.b_z);
        }
        assert!(bz.windows(2).all(|w| w[0] == w[1]));
        let s = bessel_em(&mode(-2), &eta, 0.0, &c).unwrap();
        assert_eq!(s.b_z, -b0);
        // μ0 λħ/(2m) sgn ℓ
        assert!((b0 / (MU_0 * eta.lambda() * HBAR / (2.0 * M_ELECTRON)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_law_quadrature() {
        let eta = LineDensity::new(1.0).unwrap();
        for ell in [1, 2, -3] {
            let m = mode(ell);
            for x in [0.3, 1.7, 5.0, 12.5, 40.0] {
                let r = x / m.kr;
                let s = bessel_em(&m, &eta, r, &SeriesControl::default()).unwrap();
                let want = gauss_oracle(&m, &eta, r);
                assert!((s.e_r / want - 1.0).abs() < 1e-8, "ℓ={ell} x={x}");
                assert!(s.e_r >= 0.0);
            }
        }
    }

    #[test]
    fn expanded_form_agrees() {
        let eta = LineDensity::new(2.0).unwrap();
        for ell in [-2, 1, 2, 5] {
            let m = mode(ell);
            for x in [0.01, 0.5, 3.0, 17.0, 49.0] {
                let r = x / m.kr;
                let a = bessel_em(&m, &eta, r, &SeriesControl::default())
                    .unwrap()
                    .e_r;
                let b = bessel_er_expanded(&m, &eta, r);
                assert!(
                    (a - b).abs()
                        <= 1e-12 * a.abs().max(1e-300) + 1e-14 * eta.lambda() / EPSILON_0 / m.kr
                );
            }
        }
    }

    #[test]
    fn magnetic_to_electric_ratio_is_vz_over_c2() {
        let eta = LineDensity::new(1.0).unwrap();
        let m = mode(2);
        let vz = HBAR * m.kz / M_ELECTRON;
        for x in [0.7, 4.0, 22.0] {
            let s = bessel_em(&m, &eta, x / m.kr, &SeriesControl::default()).unwrap();
            assert!((s.b_phi / s.e_r / (vz / (C_LIGHT * C_LIGHT)) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn isotropic_only() {
        let mut m = mode(1);
        m.d = 0.2;
        let eta = LineDensity::new(1.0).unwrap();
        assert!(bessel_em(&m, &eta, 1e-9, &SeriesControl::default()).is_err());
        assert!(bessel_em(&mode(1), &eta, -1.0, &SeriesControl::default()).is_err());
    }

    #[test]
    fn zero_charge_has_no_axial_field() {
        let m = ModeParams::new(0, 0.0, 2.7e12, 2.7e10).unwrap();
        let eta = LineDensity::new(1.0).unwrap();
        let s = bessel_em(&m, &eta, 3e-10, &SeriesControl::default()).unwrap();
        assert_eq!(s.b_z, 0.0);
        assert!(s.e_r > 0.0);
    }
}
