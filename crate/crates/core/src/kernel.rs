//! Integral kernels: sampled values, cached spectrum, and the scalar
//! summaries (L1 norm, first moment, zero mode) that the solvability and
//! multiplier analysis consumes.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, SpectralField};
use crate::grid::Grid;
use crate::norms::{first_moment_l1, l1_norm};
use crate::transform::{forward_transform, inverse_transform};

/// A real convolution kernel together with its transform and the cached
/// quantities the analysis needs. The spectrum is always the forward
/// transform of the samples.
#[derive(Debug, Clone)]
pub struct Kernel {
    samples: Field,
    spectrum: SpectralField,
    l1: f64,
    moment1: Option<f64>,
    zero_mode: Complex64,
}

impl Kernel {
    pub fn from_field(samples: Field) -> Kernel {
        let spectrum = forward_transform(&samples);
        let l1 = l1_norm(&samples);
        let moment1 = if samples.grid().is_periodic() {
            None
        } else {
            Some(first_moment_l1(&samples))
        };
        let zero_mode = spectrum.coeffs()[samples.grid().zero_mode_index()];
        Kernel {
            samples,
            spectrum,
            l1,
            moment1,
            zero_mode,
        }
    }

    /// `A * exp(-((x - c)/w)^2)`, centred at 0 on the line and at pi on the
    /// interval so the samples are continuous across the period.
    pub fn gaussian(grid: &Arc<Grid>, amplitude: f64, width: f64) -> Result<Kernel> {
        check_shape_params(amplitude, width)?;
        let c = bump_center(grid);
        let f = Field::from_fn(grid, |x| {
            let t = (x - c) / width;
            amplitude * (-t * t).exp()
        })?;
        Ok(Kernel::from_field(f))
    }

    /// `A * x * exp(-((x - c)/w)^2)` (shifted argument on the interval); odd
    /// around its centre, hence zero mean.
    pub fn gaussian_derivative(grid: &Arc<Grid>, amplitude: f64, width: f64) -> Result<Kernel> {
        check_shape_params(amplitude, width)?;
        let c = bump_center(grid);
        let f = Field::from_fn(grid, |x| {
            let t = (x - c) / width;
            amplitude * (x - c) * (-t * t).exp()
        })?;
        Ok(Kernel::from_field(f))
    }

    /// `(A/pi) * cos(x)` on the periodic interval; a single-pair spectrum.
    pub fn cosine(grid: &Arc<Grid>, amplitude: f64) -> Result<Kernel> {
        if !grid.is_periodic() {
            return Err(Error::Config(
                "cosine kernel is only integrable on the periodic interval".into(),
            ));
        }
        check_shape_params(amplitude, 1.0)?;
        let f = Field::from_fn(grid, |x| amplitude / PI * x.cos())?;
        Ok(Kernel::from_field(f))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.samples.grid()
    }

    pub fn samples(&self) -> &Field {
        &self.samples
    }

    pub fn spectrum(&self) -> &SpectralField {
        &self.spectrum
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    /// First absolute moment; only meaningful on the truncated line.
    pub fn moment1(&self) -> Option<f64> {
        self.moment1
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.zero_mode
    }

    pub fn scaled(&self, c: f64) -> Kernel {
        Kernel::from_field(self.samples.scaled(c))
    }

    pub fn add_scaled(&self, other: &Kernel, c: f64) -> Result<Kernel> {
        Ok(Kernel::from_field(
            self.samples.add_scaled(&other.samples, c)?,
        ))
    }

    /// Gaussian smoothing of the given width, applied as a spectral filter
    /// `exp(-w^2 p^2 / 4)`; the mollifier has unit mass so the zero mode is
    /// preserved.
    pub fn mollified(&self, width: f64) -> Kernel {
        let freq = self.grid().freq().to_vec();
        let filtered = self
            .spectrum
            .map_indexed(|i, c| c * (-width * width * freq[i] * freq[i] / 4.0).exp());
        let samples = inverse_transform(&filtered).expect("filter preserves Hermitian symmetry");
        Kernel::from_field(samples)
    }

    /// Subtract the mean and pin the zero coefficient to exactly zero, so
    /// that resolvent division never amplifies a quadrature residue.
    pub fn project_zero_mean(&self) -> Kernel {
        let mean = self.samples.mean();
        let centred = self
            .samples
            .values()
            .iter()
            .map(|v| v - mean)
            .collect::<Vec<_>>();
        let field = Field::new(self.grid().clone(), centred).expect("finite by construction");
        let mut kernel = Kernel::from_field(field);
        let zero = kernel.grid().zero_mode_index();
        kernel.spectrum.set(zero, Complex64::new(0.0, 0.0));
        kernel.zero_mode = Complex64::new(0.0, 0.0);
        kernel
    }

    /// Limit of `G(p) / (p^4 - i b p)` at `p = 0` for a zero-mean kernel:
    /// the derivative of the transform at the origin divided by `-i b`,
    /// which reduces to `(dx * sum x_k G_k) / (b * sqrt(2*pi))`, a real
    /// number.
    pub fn resolvent_origin_limit(&self, b: f64) -> Complex64 {
        let dx = self.grid().dx();
        let weighted: f64 = self
            .grid()
            .x()
            .iter()
            .zip(self.samples.values())
            .map(|(x, g)| x * g)
            .sum();
        let signed_moment = dx * weighted / (2.0 * PI).sqrt();
        Complex64::new(signed_moment / b, 0.0)
    }
}

fn bump_center(grid: &Arc<Grid>) -> f64 {
    if grid.is_periodic() {
        PI
    } else {
        0.0
    }
}

fn check_shape_params(amplitude: f64, width: f64) -> Result<()> {
    if !amplitude.is_finite() {
        return Err(Error::Config(format!(
            "kernel amplitude {amplitude} must be finite"
        )));
    }
    if !width.is_finite() || width <= 0.0 {
        return Err(Error::Config(format!(
            "kernel width {width} must be positive and finite"
        )));
    }
    Ok(())
}
