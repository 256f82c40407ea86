//! Complex FFT on the grid. Coefficients are normalized so that
//! `f(x) = sum_k c_k exp(2 pi i k.x / L)`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::TorusGrid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

fn transform(grid: &TorusGrid, buf: &mut [Complex64], inverse: bool) {
    let n = grid.n;
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // rows are contiguous chunks of length n
    fft.process_with_scratch(buf, &mut scratch);
    if grid.dim == 2 {
        transpose(buf, n);
        fft.process_with_scratch(buf, &mut scratch);
        transpose(buf, n);
    }
}

pub fn forward(grid: &TorusGrid, data: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(grid, &mut buf, false);
    let s = 1.0 / grid.len() as f64;
    for c in buf.iter_mut() {
        *c *= s;
    }
    buf
}

pub fn forward_complex(grid: &TorusGrid, data: &[Complex64]) -> Vec<Complex64> {
    let mut buf = data.to_vec();
    transform(grid, &mut buf, false);
    let s = 1.0 / grid.len() as f64;
    for c in buf.iter_mut() {
        *c *= s;
    }
    buf
}

/// Inverse transform; returns the real part.
pub fn inverse(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    transform(grid, &mut buf, true);
    buf.into_iter().map(|c| c.re).collect()
}

pub fn inverse_complex(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    transform(grid, &mut buf, true);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_has_unit_coefficient() {
        let g = TorusGrid::new(1, 32).unwrap();
        let data: Vec<f64> = (0..32).map(|j| (2.0 * std::f64::consts::PI * 3.0 * j as f64 / 32.0).cos()).collect();
        let c = forward(&g, &data);
        assert!((c[3].re - 0.5).abs() < 1e-14);
        assert!((c[29].re - 0.5).abs() < 1e-14);
        let back = inverse(&g, &c);
        for (a, b) in data.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn roundtrip_2d() {
        let g = TorusGrid::new(2, 32).unwrap();
        let data: Vec<f64> = (0..1024).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let back = inverse(&g, &forward(&g, &data));
        for (a, b) in data.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
