//! Real fields and their complex spectral coefficients.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Real-valued samples on a grid.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                x: grid.x()[index],
                value: values[index],
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Sample a function of the physical coordinate on the grid.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Arc<Grid>, f: F) -> Result<Self> {
        let values = grid.x().iter().map(|&x| f(x)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.require_same_grid(other)?;
        Ok(Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add_scaled(&self, other: &Field, c: f64) -> Result<Field> {
        self.require_same_grid(other)?;
        Ok(Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn require_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid.same_as(other.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Complex coefficients on the frequency grid, in ascending mode order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at integer mode `m` (frequency `m` on the interval,
    /// `pi*m/L` on the line).
    pub fn coeff_for_mode(&self, m: i64) -> Complex64 {
        let i = m + (self.grid.len() / 2) as i64;
        self.coeffs[i as usize]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |mx, c| mx.max(c.norm()))
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        if !self.grid.same_as(other.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Largest deviation from the conjugate symmetry of a real field's
    /// coefficients. The unpaired mode at `-N/2` and the zero mode must be
    /// real; every other pair must be conjugate.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.coeffs.len();
        let mut worst = self.coeffs[0].im.abs();
        worst = worst.max(self.coeffs[n / 2].im.abs());
        for i in 1..n / 2 {
            let gap = (self.coeffs[i] - self.coeffs[n - i].conj()).norm();
            worst = worst.max(gap);
        }
        worst
    }

    /// Project onto the conjugate-symmetric subspace: average each pair and
    /// realify the self-paired modes. Exact for transforms of real data;
    /// removes round-off asymmetry that high-order multipliers amplify.
    pub(crate) fn symmetrize(&mut self) {
        let n = self.coeffs.len();
        self.coeffs[0] = Complex64::new(self.coeffs[0].re, 0.0);
        self.coeffs[n / 2] = Complex64::new(self.coeffs[n / 2].re, 0.0);
        for i in 1..n / 2 {
            let avg = 0.5 * (self.coeffs[i] + self.coeffs[n - i].conj());
            self.coeffs[i] = avg;
            self.coeffs[n - i] = avg.conj();
        }
    }

    pub(crate) fn map_indexed<F: FnMut(usize, Complex64) -> Complex64>(
        &self,
        mut f: F,
    ) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| f(i, c))
                .collect(),
        }
    }

    pub(crate) fn set(&mut self, i: usize, value: Complex64) {
        self.coeffs[i] = value;
    }
}
