//! Nonlinear least-squares fit of the rotation law to a measured series.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::RotationSeries;
use crate::error::{Error, Result};
use crate::kinematics::unwrapped_atan_tan;

/// Upper bound imposed on D during the fit.
pub const D_MAX: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitControl {
    pub max_iterations: usize,
    /// Relative step and cost-change tolerance.
    pub tolerance: f64,
    pub d_starts: [f64; 4],
    pub phase_starts: usize,
    /// Multipliers applied to the slope-based Δk_z estimate.
    pub rate_starts: [f64; 3],
}

impl Default for FitControl {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-14,
            d_starts: [0.0, 0.25, 0.5, 0.75],
            phase_starts: 8,
            rate_starts: [1.0, 0.6, 1.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(rename = "D_fit")]
    pub d_fit: f64,
    pub dkz_fit: f64,
    /// Phase offset reduced to [0, π).
    pub phi0_fit: f64,
    /// Covariance of (D, Δk_z, φ0); absent when the normal matrix is singular.
    pub covariance: Option<[[f64; 3]; 3]>,
    pub residual_rms: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Model angle relative to the reference plane.
struct Problem {
    s: Vec<f64>,
    s_ref: f64,
    target: Vec<f64>,
    ell: f64,
}

impl Problem {
    fn model(&self, p: &[f64; 3], s: f64) -> f64 {
        let q = (1.0 + p[0]) / (1.0 - p[0]);
        -unwrapped_atan_tan(q, p[1] * s + p[2]) / self.ell
    }

    fn residuals(&self, p: &[f64; 3]) -> Vec<f64> {
        let m0 = self.model(p, self.s_ref);
        self.s
            .iter()
            .zip(&self.target)
            .map(|(&s, &t)| self.model(p, s) - m0 - t)
            .collect()
    }

    fn jacobian(&self, p: &[f64; 3]) -> Vec<[f64; 3]> {
        let mut jac = vec![[0.0; 3]; self.s.len()];
        for c in 0..3 {
            let h = 1e-7 * p[c].abs().max(1.0);
            let (mut lo, mut hi) = (*p, *p);
            lo[c] -= h;
            hi[c] += h;
            if c == 0 {
                lo[0] = lo[0].max(0.0);
                hi[0] = hi[0].min(D_MAX);
            }
            let span = hi[c] - lo[c];
            let (rl, rh) = (self.residuals(&lo), self.residuals(&hi));
            for (row, (a, b)) in jac.iter_mut().zip(rl.iter().zip(&rh)) {
                row[c] = (b - a) / span;
            }
        }
        jac
    }
}

fn cost(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

/// Solve a symmetric positive 3×3 system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            let pivot = a[c];
            for (x, y) in a[r][c..].iter_mut().zip(&pivot[c..]) {
                *x -= f * y;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn invert3(a: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let scale = (0..3).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let mut out = [[0.0; 3]; 3];
    for c in 0..3 {
        let mut e = [0.0; 3];
        e[c] = 1.0;
        let col = solve3(a, e)?;
        for r in 0..3 {
            out[r][c] = col[r];
        }
    }
    // reject numerically singular normal matrices
    let cond = (0..3).map(|i| out[i][i].abs()).fold(0.0, f64::max) * scale;
    (cond < 1e12).then_some(out)
}

struct Outcome {
    p: [f64; 3],
    cost: f64,
    iterations: usize,
    converged: bool,
}

fn clamp(mut p: [f64; 3]) -> [f64; 3] {
    p[0] = p[0].clamp(0.0, D_MAX);
    p
}

/// Projected Levenberg–Marquardt with Marquardt diagonal scaling.
fn levenberg_marquardt(prob: &Problem, start: [f64; 3], ctl: &FitControl) -> Outcome {
    let mut p = clamp(start);
    let mut r = prob.residuals(&p);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for it in 1..=ctl.max_iterations {
        let jac = prob.jacobian(&p);
        let mut a = [[0.0; 3]; 3];
        let mut g = [0.0; 3];
        for (row, ri) in jac.iter().zip(&r) {
            for i in 0..3 {
                g[i] += row[i] * ri;
                for k in 0..3 {
                    a[i][k] += row[i] * row[k];
                }
            }
        }
        if g.iter().all(|v| v.abs() <= 1e-300) || c == 0.0 {
            return Outcome {
                p,
                cost: c,
                iterations: it,
                converged: true,
            };
        }
        loop {
            let mut damped = a;
            for i in 0..3 {
                damped[i][i] += lambda * (a[i][i] + 1e-12);
            }
            let step = solve3(damped, [-g[0], -g[1], -g[2]]);
            let trial = step.map(|d| clamp([p[0] + d[0], p[1] + d[1], p[2] + d[2]]));
            if let Some(t) = trial {
                let rt = prob.residuals(&t);
                let ct = cost(&rt);
                if ct.is_finite() && ct <= c {
                    let moved = (0..3)
                        .map(|i| (t[i] - p[i]).abs() / (p[i].abs() + 1e-3))
                        .fold(0.0, f64::max);
                    let drop = (c - ct) / c.max(1e-300);
                    p = t;
                    r = rt;
                    c = ct;
                    lambda = (lambda / 3.0).max(1e-15);
                    if moved <= ctl.tolerance || drop <= ctl.tolerance {
                        return Outcome {
                            p,
                            cost: c,
                            iterations: it,
                            converged: true,
                        };
                    }
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                // no descent direction left at working precision
                return Outcome {
                    p,
                    cost: c,
                    iterations: it,
                    converged: true,
                };
            }
        }
    }
    Outcome {
        p,
        cost: c,
        iterations: ctl.max_iterations,
        converged: false,
    }
}

pub fn fit_rotation_curve(series: &RotationSeries, ell: u32) -> Result<FitResult> {
    fit_rotation_curve_with(series, ell, &FitControl::default())
}

/// Fit Φ(z) − Φ(z_ref) = −[U(Δk_z z + φ0) − U(Δk_z z_ref + φ0)]/ℓ, U the
/// continuous arctan(q tan x), q = (1+D)/(1−D), over a grid of starting points.
pub fn fit_rotation_curve_with(
    series: &RotationSeries,
    ell: u32,
    ctl: &FitControl,
) -> Result<FitResult> {
    series.validate(ell)?;
    let n = series.z_values.len();
    if n < 5 {
        return Err(Error::config(format!(
            "fit needs at least 5 points, got {n}"
        )));
    }
    let scale = series.z_values.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    let s: Vec<f64> = series.z_values.iter().map(|z| z / scale).collect();
    let a_ref = series.angles[series.reference_index];
    let prob = Problem {
        s_ref: s[series.reference_index],
        target: series.angles.iter().map(|a| a - a_ref).collect(),
        s: s.clone(),
        ell: f64::from(ell),
    };
    // mean slope of U is one per unit argument
    let slope = -(prob.target[n - 1] - prob.target[0]) * f64::from(ell) / (s[n - 1] - s[0]);
    let rate = if slope.abs() > 1e-6 { slope } else { 1.0 };
    let mut best: Option<Outcome> = None;
    for &m in &ctl.rate_starts {
        for &d0 in &ctl.d_starts {
            for k in 0..ctl.phase_starts {
                let p0 = PI * k as f64 / ctl.phase_starts as f64;
                let out = levenberg_marquardt(&prob, [d0, rate * m, p0], ctl);
                if best.as_ref().is_none_or(|b| out.cost < b.cost) {
                    best = Some(out);
                }
            }
        }
    }
    let best = best.ok_or_else(|| Error::config("empty multi-start grid"))?;
    let [d, kappa, p0] = best.p;
    let dkz = kappa / scale;
    if !best.converged || !best.cost.is_finite() {
        return Err(Error::FitConvergence {
            message: format!(
                "no start converged within {} iterations",
                ctl.max_iterations
            ),
            best_cost: best.cost,
            best_d: d,
            best_dkz: dkz,
            best_phi0: p0,
        });
    }
    let z_span = series.z_values[n - 1] - series.z_values[0];
    if (z_span * dkz).abs() < 0.5 * PI {
        return Err(Error::config(format!(
            "series spans {:.3} rad of Δk_z z, less than half a period of the fitted law",
            (z_span * dkz).abs()
        )));
    }
    let residuals = prob.residuals(&best.p);
    let rms = (2.0 * best.cost / n as f64).sqrt();
    let covariance = {
        let jac = prob.jacobian(&best.p);
        let mut a = [[0.0; 3]; 3];
        for row in &jac {
            for i in 0..3 {
                for k in 0..3 {
                    a[i][k] += row[i] * row[k];
                }
            }
        }
        let sigma2 = 2.0 * best.cost / (n as f64 - 3.0).max(1.0);
        invert3(a).map(|inv| {
            let unit = [1.0, 1.0 / scale, 1.0];
            let mut cov = [[0.0; 3]; 3];
            for i in 0..3 {
                for k in 0..3 {
                    cov[i][k] = sigma2 * inv[i][k] * unit[i] * unit[k];
                }
            }
            cov
        })
    };
    Ok(FitResult {
        d_fit: d,
        dkz_fit: dkz,
        phi0_fit: p0.rem_euclid(PI),
        covariance,
        residual_rms: rms,
        residuals,
        iterations: best.iterations,
    })
}

/// Best φ0 ∈ [0, π) with D and Δk_z held fixed, and the residuals at that offset.
pub fn fit_phase_offset(
    series: &RotationSeries,
    ell: u32,
    d: f64,
    dkz: f64,
) -> Result<(f64, Vec<f64>)> {
    series.validate(ell)?;
    if !(0.0..1.0).contains(&d) || !dkz.is_finite() {
        return Err(Error::domain(format!(
            "need D in [0, 1) and finite Δk_z, got D = {d}, Δk_z = {dkz}"
        )));
    }
    let a_ref = series.angles[series.reference_index];
    let prob = Problem {
        s: series.z_values.clone(),
        s_ref: series.z_values[series.reference_index],
        target: series.angles.iter().map(|a| a - a_ref).collect(),
        ell: f64::from(ell),
    };
    let f = |p0: f64| cost(&prob.residuals(&[d, dkz, p0]));
    let n = 720;
    let h = PI / n as f64;
    let k = (0..n)
        .min_by(|&a, &b| f(a as f64 * h).total_cmp(&f(b as f64 * h)))
        .unwrap_or(0);
    // golden-section refinement inside the bracketing grid cells
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
    for _ in 0..100 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1) <= f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let p0 = 0.5 * (lo + hi);
    Ok((p0.rem_euclid(PI), prob.residuals(&[d, dkz, p0])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::RotationLaw;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn synthetic(ell: u32, d: f64, dkz: f64, phi0: f64, n: usize) -> RotationSeries {
        let law = RotationLaw::new(ell, d, dkz, phi0).unwrap();
        let zmax = 0.6 * PI / dkz.abs();
        let z: Vec<f64> = (0..n)
            .map(|i| -zmax + 2.0 * zmax * i as f64 / (n - 1) as f64)
            .collect();
        let a: Vec<f64> = z
            .iter()
            .map(|&z| law.rotation(z) - law.rotation(-zmax))
            .collect();
        RotationSeries::new(z, a, 0, vec![0.0; n]).unwrap()
    }

    #[test]
    fn noiseless_round_trip() {
        let (d, dkz, phi0) = (0.158, 3.7, 0.4);
        let fit = fit_rotation_curve(&synthetic(1, d, dkz, phi0, 41), 1).unwrap();
        assert!((fit.d_fit - d).abs() < 1e-6, "{fit:?}");
        assert!((fit.dkz_fit - dkz).abs() < 1e-6 * dkz);
        assert!((fit.phi0_fit - phi0).abs() < 1e-6);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn higher_order_and_negative_rate() {
        let fit = fit_rotation_curve(&synthetic(2, 0.51, -12.0, 2.0, 41), 2).unwrap();
        assert!((fit.d_fit - 0.51).abs() < 1e-6, "{fit:?}");
        assert!((fit.dkz_fit + 12.0).abs() < 1e-5);
        assert!((fit.phi0_fit - 2.0).abs() < 1e-6);
    }

    #[test]
    fn isotropic_series_gives_small_d() {
        let fit = fit_rotation_curve(&synthetic(1, 0.0, 2.0, 0.0, 41), 1).unwrap();
        assert!(fit.d_fit < 0.02);
        assert!((fit.dkz_fit - 2.0).abs() < 1e-6);
    }

    #[test]
    fn deterministic() {
        let s = synthetic(1, 0.325, 1.3, 1.1, 31);
        assert_eq!(
            fit_rotation_curve(&s, 1).unwrap(),
            fit_rotation_curve(&s, 1).unwrap()
        );
    }

    #[test]
    fn scale_free_in_angle_noise_draws() {
        let base = synthetic(1, 0.51, 1.0, 0.7, 41);
        let noise = Normal::new(0.0, 2f64.to_radians()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let angles: Vec<f64> = base
            .angles
            .iter()
            .map(|a| a + noise.sample(&mut rng))
            .collect();
        let s = RotationSeries::new(
            base.z_values.clone(),
            angles,
            0,
            vec![2f64.to_radians(); 41],
        )
        .unwrap();
        let fit = fit_rotation_curve(&s, 1).unwrap();
        assert!((fit.d_fit - 0.51).abs() < 0.05, "{}", fit.d_fit);
        let cov = fit.covariance.unwrap();
        assert!(cov[0][0] > 0.0 && cov[0][0].sqrt() < 0.05);
    }

    #[test]
    fn phase_offset_with_known_law() {
        let s = synthetic(1, 0.325, 2.5, 1.9, 41);
        let (p0, res) = fit_phase_offset(&s, 1, 0.325, 2.5).unwrap();
        assert!((p0 - 1.9).abs() < 1e-7, "{p0}");
        assert!(res.iter().all(|r| r.abs() < 1e-7));
    }

    #[test]
    fn too_few_points() {
        let s = synthetic(1, 0.2, 1.0, 0.0, 4);
        assert!(matches!(fit_rotation_curve(&s, 1), Err(Error::Config(_))));
    }

    #[test]
    fn short_span_is_rejected() {
        let law = RotationLaw::new(1, 0.3, 1.0, 0.2).unwrap();
        let z: Vec<f64> = (0..9).map(|i| -0.2 + 0.05 * i as f64).collect();
        let a: Vec<f64> = z
            .iter()
            .map(|&z| law.rotation(z) - law.rotation(-0.2))
            .collect();
        let s = RotationSeries::new(z, a, 0, vec![0.0; 9]).unwrap();
        assert!(fit_rotation_curve(&s, 1).is_err());
    }

    #[test]
    fn non_convergence_reports_best_candidate() {
        let s = synthetic(1, 0.4, 1.0, 0.3, 21);
        let ctl = FitControl {
            max_iterations: 1,
            tolerance: 0.0,
            ..FitControl::default()
        };
        match fit_rotation_curve_with(&s, 1, &ctl) {
            Err(e @ Error::FitConvergence { .. }) => assert!(e.is_convergence()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_linear_solves() {
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let x = solve3(a, [1.0, 2.0, 3.0]).unwrap();
        for i in 0..3 {
            let s: f64 = (0..3).map(|k| a[i][k] * x[k]).sum();
            assert!((s - [1.0, 2.0, 3.0][i]).abs() < 1e-14);
        }
        assert!(invert3([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).is_none());
    }
}
