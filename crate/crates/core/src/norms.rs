//! Rectangle-rule norms and their spectral counterparts.
//!
//! The uniform-grid rectangle rule is spectrally accurate for smooth periodic
//! or decaying data, and it is the quadrature under which the discrete
//! transform is exactly unitary, so `l2_norm` and `l2_norm_spectral` agree to
//! round-off. The fourth-order Sobolev norm weights coefficients by
//! `1 + p^8`.

use crate::field::{Field, SpectralField};
use crate::transform::forward_transform;

pub fn l2_norm(f: &Field) -> f64 {
    let sum: f64 = f.values().iter().map(|v| v * v).sum();
    (f.grid().dx() * sum).sqrt()
}

pub fn l1_norm(f: &Field) -> f64 {
    let sum: f64 = f.values().iter().map(|v| v.abs()).sum();
    f.grid().dx() * sum
}

/// `integral |x f(x)| dx`, the first absolute moment.
pub fn first_moment_l1(f: &Field) -> f64 {
    let sum: f64 = f
        .grid()
        .x()
        .iter()
        .zip(f.values())
        .map(|(x, v)| (x * v).abs())
        .sum();
    f.grid().dx() * sum
}

pub fn l2_norm_spectral(spectrum: &SpectralField) -> f64 {
    let sum: f64 = spectrum.coeffs().iter().map(|c| c.norm_sqr()).sum();
    (spectrum.grid().freq_weight() * sum).sqrt()
}

/// Sobolev norm `(||f||^2 + ||f''''||^2)^(1/2)` evaluated from coefficients.
pub fn h4_norm_spectral(spectrum: &SpectralField) -> f64 {
    let freq = spectrum.grid().freq();
    let sum: f64 = spectrum
        .coeffs()
        .iter()
        .zip(freq)
        .map(|(c, &p)| (1.0 + p.powi(8)) * c.norm_sqr())
        .sum();
    (spectrum.grid().freq_weight() * sum).sqrt()
}

pub fn h4_norm(f: &Field) -> f64 {
    h4_norm_spectral(&forward_transform(f))
}
