//! Unitary, centered two-dimensional DFT on row-major grids.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Planned transform for one grid shape. The zero frequency and the zero
/// coordinate both sit at index ⌊n/2⌋, matching the grid convention of
/// [`ComplexField`](crate::wavefield::ComplexField).
pub struct Fft2 {
    nx: usize,
    ny: usize,
    row: Arc<dyn Fft<f64>>,
    col: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize, direction: Direction) -> Self {
        let dir = match direction {
            Direction::Forward => FftDirection::Forward,
            Direction::Inverse => FftDirection::Inverse,
        };
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            row: planner.plan_fft(nx, dir),
            col: planner.plan_fft(ny, dir),
        }
    }

    /// Transform in place, scaled by 1/√(nx·ny).
    pub fn process(&self, data: &mut [Complex64]) {
        assert_eq!(
            data.len(),
            self.nx * self.ny,
            "buffer does not match the planned shape"
        );
        transform_rows(data, self.nx, &*self.row);
        let mut t = transpose(data, self.nx, self.ny);
        transform_rows(&mut t, self.ny, &*self.col);
        transpose_into(&t, self.ny, self.nx, data);
        let scale = 1.0 / ((self.nx * self.ny) as f64).sqrt();
        data.par_iter_mut().for_each(|v| *v *= scale);
    }
}

/// One-shot convenience wrapper around [`Fft2`].
pub fn fft2_centered(data: &mut [Complex64], nx: usize, ny: usize, direction: Direction) {
    Fft2::new(nx, ny, direction).process(data);
}

fn transform_rows(data: &mut [Complex64], n: usize, fft: &dyn Fft<f64>) {
    let half = n / 2;
    data.par_chunks_mut(n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
        |scratch, row| {
            row.rotate_left(half);
            fft.process_with_scratch(row, scratch);
            row.rotate_right(half);
        },
    );
}

fn transpose(src: &[Complex64], nx: usize, ny: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); nx * ny];
    transpose_into(src, nx, ny, &mut dst);
    dst
}

/// `src` is ny rows of nx; `dst` becomes nx rows of ny.
fn transpose_into(src: &[Complex64], nx: usize, ny: usize, dst: &mut [Complex64]) {
    const B: usize = 32;
    dst.par_chunks_mut(ny * B)
        .enumerate()
        .for_each(|(bi, block)| {
            let i0 = bi * B;
            let rows = block.len() / ny;
            for j0 in (0..ny).step_by(B) {
                for j in j0..(j0 + B).min(ny) {
                    let s = &src[j * nx..];
                    for di in 0..rows {
                        block[di * ny + j] = s[i0 + di];
                    }
                }
            }
        });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(data: &[Complex64], nx: usize, ny: usize, sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
        let (cx, cy) = ((nx / 2) as f64, (ny / 2) as f64);
        for v in 0..ny {
            for u in 0..nx {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..ny {
                    for i in 0..nx {
                        let ph = sign
                            * 2.0
                            * PI
                            * ((u as f64 - cx) * (i as f64 - cx) / nx as f64
                                + (v as f64 - cy) * (j as f64 - cy) / ny as f64);
                        acc += data[j * nx + i] * Complex64::from_polar(1.0, ph);
                    }
                }
                out[v * nx + u] = acc / ((nx * ny) as f64).sqrt();
            }
        }
        out
    }

    fn sample(nx: usize, ny: usize) -> Vec<Complex64> {
        (0..nx * ny)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos() - 0.2))
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        for (nx, ny) in [(8, 8), (6, 10), (7, 5)] {
            let data = sample(nx, ny);
            let mut fast = data.clone();
            fft2_centered(&mut fast, nx, ny, Direction::Forward);
            let slow = naive(&data, nx, ny, -1.0);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12, "{nx}×{ny}");
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let (nx, ny) = (48, 40);
        let data = sample(nx, ny);
        let mut f = data.clone();
        fft2_centered(&mut f, nx, ny, Direction::Forward);
        let p0: f64 = data.iter().map(|v| v.norm_sqr()).sum();
        let p1: f64 = f.iter().map(|v| v.norm_sqr()).sum();
        assert!((p0 - p1).abs() / p0 < 1e-13);
        fft2_centered(&mut f, nx, ny, Direction::Inverse);
        for (a, b) in f.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn centered_delta_is_flat() {
        let n = 16;
        let mut d = vec![Complex64::new(0.0, 0.0); n * n];
        d[(n / 2) * n + n / 2] = Complex64::new(1.0, 0.0);
        fft2_centered(&mut d, n, n, Direction::Forward);
        for v in d {
            assert!((v - Complex64::new(1.0 / n as f64, 0.0)).norm() < 1e-15);
        }
    }
}
