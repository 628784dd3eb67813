//! The regularized ₂F̃₃ behind the cumulative azimuthal current, and ζ_ℓ.

use super::bessel::jn;
use super::ddouble::DoubleDouble;
use super::gamma::{factorial, ln_gamma};
use crate::error::{Error, Result};

/// Above this u = (k_r r)² the alternating series is abandoned for the Bessel-sum identity.
pub const SERIES_U_LIMIT: f64 = 400.0;

/// Truncation policy for the hypergeometric series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::config("SeriesControl.rel_tol must be > 0"));
        }
        if self.max_terms == 0 {
            return Err(Error::config("SeriesControl.max_terms must be ≥ 1"));
        }
        Ok(())
    }
}

/// Σ τ_n with τ_0 = 1 and the ₂F₃ term ratio, accumulated in double-double.
fn normalized_series(a: f64, u: f64, ctrl: &SeriesControl) -> Result<f64> {
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    if u == 0.0 {
        return Ok(1.0);
    }
    for n in 0..ctrl.max_terms {
        let nf = n as f64;
        term = (-term)
            .mul_f64(u)
            .mul_f64(a + nf)
            .mul_f64(a + 0.5 + nf)
            .div_f64(a + 1.0 + nf)
            .div_f64(a + 1.0 + nf)
            .div_f64(2.0 * a + 1.0 + nf)
            .div_f64(nf + 1.0);
        sum = sum + term;
        let past_peak = (nf + 1.0).powi(3) > u;
        if past_peak && term.hi.abs() <= 1e-3 * ctrl.rel_tol * sum.hi.abs() {
            return Ok(sum.to_f64());
        }
    }
    Err(Error::SeriesConvergence {
        partial_sum: sum.to_f64(),
        terms: ctrl.max_terms,
    })
}

/// 1/((a!)² (2a)!).
fn leading_coefficient(a: u32) -> f64 {
    let v = 1.0 / (factorial(a).powi(2) * factorial(2 * a));
    if v.is_finite() && v > 0.0 {
        v
    } else {
        (-(2.0 * ln_gamma(f64::from(a) + 1.0) + ln_gamma(2.0 * f64::from(a) + 1.0))).exp()
    }
}

/// 1 − J_0² − 2Σ_{k=1}^{a−1} J_k² − J_a² at x; free of cancellation for large x.
fn bessel_tail(a: u32, x: f64) -> f64 {
    let mut f = jn(0, x).powi(2) + jn(a as i32, x).powi(2);
    for k in 1..a {
        f += 2.0 * jn(k as i32, x).powi(2);
    }
    1.0 - f
}

/// ₂F̃₃({a, a+½}; {a+1, a+1, 2a+1}; −u) with a = `ell_abs`.
pub fn hyp_2f3_reg(ell_abs: u32, u: f64, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.validate()?;
    if ell_abs == 0 {
        return Err(Error::domain("hyp_2f3_reg requires |ℓ| ≥ 1"));
    }
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::domain(format!(
            "hyp_2f3_reg requires finite u ≥ 0, got {u}"
        )));
    }
    let a = f64::from(ell_abs);
    if u <= SERIES_U_LIMIT {
        return Ok(leading_coefficient(ell_abs) * normalized_series(a, u, ctrl)?);
    }
    let x = u.sqrt();
    let scale = (-(2.0 * a * (0.5 * x).ln() + ln_gamma(2.0 * a))).exp();
    Ok(bessel_tail(ell_abs, x) / (2.0 * a) * scale)
}

/// ζ_ℓ(r) = ℓ ∫_0^r J_ℓ(k_r t)²/t dt.
pub fn zeta_ell(ell: i32, kr: f64, r: f64, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.validate()?;
    if ell == 0 {
        return Err(Error::domain("zeta_ell requires ℓ ≠ 0"));
    }
    if !(kr > 0.0) || !kr.is_finite() {
        return Err(Error::domain(format!(
            "zeta_ell requires k_r > 0, got {kr}"
        )));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!(
            "zeta_ell requires finite r ≥ 0, got {r}"
        )));
    }
    let a = ell.unsigned_abs();
    let sign = f64::from(ell.signum());
    let x = kr * r;
    if x == 0.0 {
        return Ok(0.0);
    }
    let u = x * x;
    let magnitude = if u <= SERIES_U_LIMIT {
        // ℓ 4^{−a} u^a Γ(2a) F̃ = ((x/2)^a / a!)² S / (2a)
        let mut q = 1.0;
        for i in 1..=a {
            q *= 0.5 * x / f64::from(i);
        }
        q * q * normalized_series(f64::from(a), u, ctrl)? / 2.0
    } else {
        bessel_tail(a, x) / 2.0
    };
    Ok(sign * magnitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadControl};

    fn quad_zeta(ell: i32, x: f64) -> f64 {
        let f = |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                jn(ell, t).powi(2) / t
            }
        };
        // Split into unit-ish panels so the oscillatory tail stays well resolved.
        let panels = (x / 2.0).ceil().max(1.0) as usize;
        let h = x / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            s += integrate(f, i as f64 * h, (i + 1) as f64 * h, &QuadControl::default())
                .unwrap()
                .value;
        }
        f64::from(ell) * s
    }

    #[test]
    fn values_at_origin() {
        let c = SeriesControl::default();
        assert_eq!(hyp_2f3_reg(1, 0.0, &c).unwrap(), 0.5);
        assert!((hyp_2f3_reg(2, 0.0, &c).unwrap() - 1.0 / 96.0).abs() < 1e-17);
        assert_eq!(zeta_ell(1, 1.0, 0.0, &c).unwrap(), 0.0);
    }

    #[test]
    fn frozen_reference_values() {
        let c = SeriesControl::default();
        // 40-digit values of the regularized function and of ℓ∫_0^x J_ℓ²/t dt.
        let f = hyp_2f3_reg(1, 4.0, &c).unwrap();
        assert!((f - 0.308_630_707_566_663_932_803_120_287_262_002).abs() < 1e-15);
        let f = hyp_2f3_reg(2, 400.0, &c).unwrap();
        assert!((f / 3.906_083_664_130_048_348_590_716_170_538e-6 - 1.0).abs() < 1e-10);
        let table = [
            (1, 0.1, 0.001_248_438_584_594_869_085_218_312_796_788),
            (1, 5.0, 0.430_575_647_716_777_259_921_332_798_386_193),
            (2, 10.0, 0.435_449_621_898_711_734_238_861_138_096_236),
            (3, 20.0, 0.450_984_622_204_357_558_194_243_984_962_077),
            (3, 30.0, 0.467_666_102_004_248_460_610_569_648_712_199),
            (1, 50.0, 0.493_688_213_727_913_185_630_307_448_511_857),
            (1, 100.0, 0.496_824_580_225_117_952_863_411_154_390_316),
            (2, 100.0, 0.493_617_133_860_028_016_604_185_364_795_468),
        ];
        for (ell, x, want) in table {
            let got = zeta_ell(ell, 1.0, x, &c).unwrap();
            assert!(
                (got - want).abs() < 1e-13,
                "ζ_{ell}({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn small_argument_leading_order() {
        let z = zeta_ell(1, 1.0, 0.1, &SeriesControl::default()).unwrap();
        assert!((z - 0.01 / 8.0).abs() < 2e-6);
    }

    #[test]
    fn series_and_identity_agree_at_cutover() {
        let c = SeriesControl::default();
        for a in 1..=4u32 {
            let x = SERIES_U_LIMIT.sqrt();
            let series =
                leading_coefficient(a) * normalized_series(f64::from(a), x * x, &c).unwrap();
            let scale =
                (-(2.0 * f64::from(a) * (0.5 * x).ln() + ln_gamma(2.0 * f64::from(a)))).exp();
            let identity = bessel_tail(a, x) / (2.0 * f64::from(a)) * scale;
            assert!(
                (series / identity - 1.0).abs() < 1e-11,
                "a={a}: {series} vs {identity}"
            );
        }
    }

    #[test]
    fn matches_quadrature_identity() {
        let c = SeriesControl::default();
        for ell in [1, 2, 3, -2] {
            for i in 1..=25 {
                let x = 2.0 * i as f64;
                let got = zeta_ell(ell, 1.0, x, &c).unwrap();
                let want = quad_zeta(ell, x);
                assert!((got - want).abs() < 1e-10, "ℓ={ell} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn odd_in_ell() {
        let c = SeriesControl::default();
        for x in [0.3, 4.0, 19.0, 25.0, 200.0] {
            assert_eq!(
                zeta_ell(-3, 1.0, x, &c).unwrap(),
                -zeta_ell(3, 1.0, x, &c).unwrap()
            );
        }
    }

    #[test]
    fn convergence_failure_carries_partial_sum() {
        let c = SeriesControl {
            rel_tol: 1e-12,
            max_terms: 3,
        };
        match hyp_2f3_reg(1, 100.0, &c) {
            Err(Error::SeriesConvergence { terms, partial_sum }) => {
                assert_eq!(terms, 3);
                assert!(partial_sum.is_finite());
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_inputs() {
        let c = SeriesControl::default();
        assert!(zeta_ell(0, 1.0, 1.0, &c).is_err());
        assert!(zeta_ell(1, 0.0, 1.0, &c).is_err());
        assert!(zeta_ell(1, 1.0, -1.0, &c).is_err());
        assert!(hyp_2f3_reg(1, -1.0, &c).is_err());
        let bad = SeriesControl {
            rel_tol: 0.0,
            max_terms: 10,
        };
        assert!(hyp_2f3_reg(1, 1.0, &bad).is_err());
    }
}
