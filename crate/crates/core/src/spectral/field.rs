use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fft, TorusGrid};
use crate::error::{check_grids, Error, Result};

/// Real scalar field sampled on a torus grid (row-major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: TorusGrid,
    data: Vec<f64>,
}

/// Normalized Fourier coefficients of a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: TorusGrid,
    pub coeffs: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self { grid, data: vec![c; grid.len()] }
    }

    pub fn from_vec(grid: TorusGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("expected {} samples, got {}", grid.len(), data.len())));
        }
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, data }
    }

    /// Real part of a single Fourier mode `a cos(2 pi k.x / L + phase)`.
    pub fn mode(grid: TorusGrid, k: [i64; 2], amplitude: f64, phase: f64) -> Self {
        let w = 2.0 * std::f64::consts::PI / grid.length;
        Self::from_fn(grid, |x| amplitude * (w * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) + phase).cos())
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(integral |f|^2)^{1/2}` over the torus.
    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// `integral f g` over the torus.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        check_grids(&self.grid, &other.grid)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_volume())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        check_grids(&self.grid, &other.grid)?;
        Ok(Field { grid: self.grid, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() })
    }

    pub fn try_add(&self, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn try_mul(&self, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Field) -> Result<()> {
        check_grids(&self.grid, &other.grid)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum { grid: self.grid, coeffs: fft::forward(&self.grid, &self.data) }
    }

    /// Apply a real even Fourier multiplier given per flat spectral index.
    pub fn apply_multiplier(&self, m: impl Fn(usize) -> f64) -> Field {
        let mut s = self.spectrum();
        for (i, c) in s.coeffs.iter_mut().enumerate() {
            *c *= m(i);
        }
        s.to_field()
    }

    pub fn laplacian(&self) -> Field {
        let g = self.grid;
        self.apply_multiplier(|i| -g.neg_laplacian_symbol(i))
    }

    /// Spectral derivative along `axis`; the Nyquist mode is dropped.
    pub fn derivative(&self, axis: usize) -> Field {
        let mut s = self.spectrum();
        s.differentiate(axis);
        s.to_field()
    }

    pub fn dx(&self) -> Field {
        self.derivative(0)
    }

    /// Zero-mean part.
    pub fn centered(&self) -> Field {
        let m = self.mean();
        self.map(|v| v - m)
    }
}

impl Spectrum {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn to_field(&self) -> Field {
        Field { grid: self.grid, data: fft::inverse(&self.grid, &self.coeffs) }
    }

    pub fn differentiate(&mut self, axis: usize) {
        let g = self.grid;
        let w = 2.0 * std::f64::consts::PI / g.length;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            let j = g.unravel(i)[axis];
            if g.is_nyquist(j) {
                *c = Complex64::default();
            } else {
                *c *= Complex64::new(0.0, w * g.signed(j) as f64);
            }
        }
    }

    pub fn scale_by(&mut self, m: impl Fn(usize) -> f64) {
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c *= m(i);
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Field> for &Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                assert_eq!(self.grid, rhs.grid, "grid mismatch");
                Field {
                    grid: self.grid,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $tr<Field> for Field {
            type Output = Field;
            fn $method(self, rhs: Field) -> Field {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Field> for Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<&Field> for f64 {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        rhs.scale(self)
    }
}

impl Mul<Field> for f64 {
    type Output = Field;
    fn mul(self, rhs: Field) -> Field {
        rhs.scale(self)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let g = TorusGrid::new(1, 32).unwrap();
        let f = Field::mode(g, [3, 0], 1.0, -std::f64::consts::FRAC_PI_2);
        let df = f.dx();
        let w = 2.0 * std::f64::consts::PI * 3.0;
        let expect = Field::mode(g, [3, 0], w, 0.0);
        assert!((&df - &expect).sup_norm() < 1e-11);
    }

    #[test]
    fn laplacian_of_mode_2d() {
        let g = TorusGrid::new(2, 32).unwrap();
        let f = Field::mode(g, [2, 1], 1.0, 0.3);
        let lap = f.laplacian();
        let s = -4.0 * std::f64::consts::PI.powi(2) * 5.0;
        assert!((&lap - &f.scale(s)).sup_norm() < 1e-10);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = Field::zeros(TorusGrid::new(1, 32).unwrap());
        let b = Field::zeros(TorusGrid::new(1, 64).unwrap());
        assert!(a.try_add(&b).is_err());
    }
}
