//! Periodic fields on the torus `[0, 2π)²` and their spectral calculus.
//!
//! Physical samples are the source of truth; Fourier coefficients are built
//! on demand through [`Spectrum`] and dropped after use.

mod fft;
mod norms;
mod ops;

pub use fft::{deriv_wavenumber, wavenumber, Spectrum};
pub use norms::{norm_hs, norm_lp, norm_sobolev, Field};
pub use ops::{
    dealias, derivative, divergence, gradient, laplacian, leray_project, max_abs_divergence,
    scalar_curl,
};

pub(crate) use fft::{forward_pair, inverse_pair};
pub(crate) use ops::{derivative_spectrum, divergence_spectrum, leray_spectrum};

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("grid size {0} must be a power of two and at least 16")]
    InvalidGridSize(usize),
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids ({0} vs {1})")]
    GridMismatch(usize, usize),
    #[error("Lebesgue exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("Sobolev order {0} is not supported (max 3)")]
    UnsupportedOrder(u32),
    #[error("Sobolev smoothness must be nonnegative, got {0}")]
    NegativeSmoothness(f64),
}

/// Uniform periodic grid with `n` points per side on a `2π` period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    spacing: f64,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, FieldError> {
        if n < 16 || !n.is_power_of_two() {
            return Err(FieldError::InvalidGridSize(n));
        }
        let length = 2.0 * PI;
        Ok(Self {
            n,
            length,
            spacing: length / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Quadrature weight of one cell, `spacing²`.
    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    /// Physical coordinate of grid index `i`.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing
    }
}

/// Real samples of a periodic scalar, row-major with `y` outer and `x` inner.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::SampleCount {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness scan; used for internal results built from finite data.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..n {
            let y = grid.coord(j);
            for i in 0..n {
                values.push(f(grid.coord(i), y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Sample at `(i, j)` = (x index, y index).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.n + i]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoidal integral over the torus.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::forward(self)
    }
}

/// A planar vector field; both components share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    x: ScalarField,
    y: ScalarField,
}

impl VectorField2 {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self, FieldError> {
        if x.grid != y.grid {
            return Err(FieldError::GridMismatch(x.grid.n, y.grid.n));
        }
        Ok(Self { x, y })
    }

    pub(crate) fn from_parts(x: ScalarField, y: ScalarField) -> Self {
        debug_assert_eq!(x.grid, y.grid);
        Self { x, y }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_parts(ScalarField::zeros(grid), ScalarField::zeros(grid))
    }

    pub fn from_fn(
        grid: Grid,
        fx: impl Fn(f64, f64) -> f64,
        fy: impl Fn(f64, f64) -> f64,
    ) -> Self {
        Self::from_parts(ScalarField::from_fn(grid, fx), ScalarField::from_fn(grid, fy))
    }

    pub fn grid(&self) -> Grid {
        self.x.grid
    }

    pub fn x(&self) -> &ScalarField {
        &self.x
    }

    pub fn y(&self) -> &ScalarField {
        &self.y
    }

    pub fn into_components(self) -> (ScalarField, ScalarField) {
        (self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        self.x.zip_with(&self.y, f64::hypot)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.x
            .values
            .iter()
            .zip(&self.y.values)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::from_parts(f(&self.x), f(&self.y))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_components(|s| s.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_parts(self.x.add(&other.x), self.y.add(&other.y))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_parts(self.x.sub(&other.x), self.y.sub(&other.y))
    }

    /// Multiplies both components by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField) -> Self {
        self.map_components(|c| c.mul(s))
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &Self) -> ScalarField {
        self.x.mul(&other.x).add(&self.y.mul(&other.y))
    }

    /// `∫ a·b` by equal-weight quadrature.
    pub fn inner(&self, other: &Self) -> f64 {
        self.dot(other).integral()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.x
            .sub(&other.x)
            .max_abs()
            .max(self.y.sub(&other.y).max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid::new(8).is_err());
        assert!(Grid::new(48).is_err());
        assert!(Grid::new(16).is_ok());
    }

    #[test]
    fn spacing_times_n_is_period() {
        for n in [16, 32, 64, 128, 256] {
            let g = Grid::new(n).unwrap();
            let rel = (g.spacing() * n as f64 - g.length()).abs() / g.length();
            assert!(rel <= 1e-15, "n = {n}: {rel}");
        }
    }

    #[test]
    fn scalar_field_validates_samples() {
        let g = Grid::new(16).unwrap();
        assert!(matches!(
            ScalarField::new(g, vec![0.0; 10]),
            Err(FieldError::SampleCount { .. })
        ));
        let mut v = vec![0.0; 256];
        v[7] = f64::NAN;
        assert_eq!(ScalarField::new(g, v), Err(FieldError::NonFinite(7)));
    }

    #[test]
    fn row_major_layout() {
        let g = Grid::new(16).unwrap();
        let f = ScalarField::from_fn(g, |x, y| x + 10.0 * y);
        assert_eq!(f.at(3, 0), g.coord(3));
        assert_eq!(f.values()[2 * 16 + 1], g.coord(1) + 10.0 * g.coord(2));
    }
}
