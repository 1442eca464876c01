//! Forward and inverse transforms, spectral derivatives, and convolution.
//!
//! Coefficients follow the unitary angular-frequency convention
//!
//! ```text
//! c(p_j) = dx / sqrt(2*pi) * sum_k f(x_k) exp(-i p_j x_k)
//! ```
//!
//! discretizing `(1/sqrt(2*pi)) * integral f(x) exp(-i p x) dx`. Under this
//! convention a convolution transforms to `sqrt(2*pi) * G(p) * F(p)` and the
//! rectangle-rule L2 norm matches the weighted coefficient sum exactly
//! (Plancherel), so norms can move freely between the two representations.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{Field, SpectralField};
use crate::kernel::Kernel;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn run_fft(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let fft = if inverse {
            p.borrow_mut().plan_fft_inverse(buf.len())
        } else {
            p.borrow_mut().plan_fft_forward(buf.len())
        };
        fft.process(buf);
    });
}

fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

/// Discrete realization of the continuous transform on the grid's
/// frequencies. Exact inverse of [`inverse_transform`] up to round-off.
pub fn forward_transform(f: &Field) -> SpectralField {
    let grid = f.grid();
    let n = grid.len();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    run_fft(&mut buf, false);
    let scale = grid.dx() / sqrt_2pi();
    let line = !grid.is_periodic();
    let coeffs = (0..n)
        .map(|i| {
            let bin = (i + n / 2) % n;
            // On the centred line grid the sample phase exp(-i p_m x_0)
            // reduces to (-1)^m, and N/2 is even, so (-1)^m = (-1)^i.
            let sign = if line && i % 2 == 1 { -1.0 } else { 1.0 };
            buf[bin] * (scale * sign)
        })
        .collect();
    SpectralField::new(grid.clone(), coeffs).expect("coefficient length matches grid")
}

/// Reconstruct the real field; rejects coefficient sets that are not
/// conjugate-symmetric within tolerance, which signals an upstream bug.
pub fn inverse_transform(spectrum: &SpectralField) -> Result<Field> {
    let tolerance = 1e-8 * spectrum.max_abs().max(1e-300);
    let asymmetry = spectrum.hermitian_asymmetry();
    if asymmetry > tolerance {
        return Err(Error::NotHermitian {
            asymmetry,
            tolerance,
        });
    }
    let grid = spectrum.grid();
    let n = grid.len();
    let scale = grid.dx() / sqrt_2pi();
    let line = !grid.is_periodic();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, &c) in spectrum.coeffs().iter().enumerate() {
        let bin = (i + n / 2) % n;
        let sign = if line && i % 2 == 1 { -1.0 } else { 1.0 };
        buf[bin] = c * (sign / scale);
    }
    run_fft(&mut buf, true);
    let values = buf.iter().map(|c| c.re / n as f64).collect();
    Field::new(grid.clone(), values)
}

/// Multiply by `(i p)^order`. Odd orders zero the unpaired mode at `-N/2`,
/// which has no conjugate partner under the real transform. The result is
/// re-symmetrized: the multiplier scales input round-off by up to
/// `p_max^order`, and the amplified part has no symmetry to preserve.
pub fn spectral_derivative(spectrum: &SpectralField, order: u32) -> SpectralField {
    let freq = spectrum.grid().freq().to_vec();
    let mut out = spectrum.map_indexed(|i, c| {
        if order % 2 == 1 && i == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            c * Complex64::new(0.0, freq[i]).powu(order)
        }
    });
    out.symmetrize();
    out
}

/// Convolution `integral G(x - y) f(y) dy`, computed spectrally as
/// `sqrt(2*pi) * G(p) * F(p)`. Periodic on the interval; on the truncated
/// line the difference `x - y` wraps across `[-L, L)`, which is accurate
/// once kernel and field decay inside `[-L/2, L/2]`.
pub fn convolve(kernel: &Kernel, f: &Field) -> Result<Field> {
    if !kernel.grid().same_as(f.grid()) {
        return Err(Error::GridMismatch);
    }
    let fhat = forward_transform(f);
    let root = sqrt_2pi();
    let ghat = kernel.spectrum().coeffs();
    let product = fhat.map_indexed(|i, c| c * ghat[i] * root);
    inverse_transform(&product)
}
