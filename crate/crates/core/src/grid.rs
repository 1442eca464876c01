//! Uniform grids and their frequency duals.
//!
//! The truncated line is sampled on `[-L, L)` and the periodic interval on
//! `[0, 2*pi)`, both with N points (N a power of two, N >= 16). Frequencies
//! are stored in ascending order, `p_j = pi*j/L` on the line and the integers
//! on the interval, with `j = -N/2 ..= N/2 - 1`; the mode at `-N/2` is the
//! single one without a conjugate partner.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Computational domain: a symmetric truncation of the real line, or the
/// fixed interval `[0, 2*pi)` with periodic boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    WholeLine { half_width: f64, points: usize },
    PeriodicInterval { points: usize },
}

impl DomainSpec {
    pub fn points(&self) -> usize {
        match *self {
            DomainSpec::WholeLine { points, .. } => points,
            DomainSpec::PeriodicInterval { points } => points,
        }
    }

    pub fn half_width(&self) -> Option<f64> {
        match *self {
            DomainSpec::WholeLine { half_width, .. } => Some(half_width),
            DomainSpec::PeriodicInterval { .. } => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, DomainSpec::PeriodicInterval { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points();
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidDomain(format!(
                "N = {n} must be a power of two with N >= 16"
            )));
        }
        if let DomainSpec::WholeLine { half_width, .. } = *self {
            if !half_width.is_finite() || half_width <= 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "half-width L = {half_width} must be positive and finite"
                )));
            }
        }
        Ok(())
    }

    /// Doubled resolution on the same physical domain.
    pub fn doubled(&self) -> DomainSpec {
        match *self {
            DomainSpec::WholeLine { half_width, points } => DomainSpec::WholeLine {
                half_width,
                points: 2 * points,
            },
            DomainSpec::PeriodicInterval { points } => {
                DomainSpec::PeriodicInterval { points: 2 * points }
            }
        }
    }
}

/// Physical sample points and their frequency dual, both uniformly spaced.
#[derive(Debug, Clone)]
pub struct Grid {
    domain: DomainSpec,
    x: Vec<f64>,
    freq: Vec<f64>,
    dx: f64,
}

/// Build the physical/frequency grid pair for a validated domain.
pub fn build_grid(domain: DomainSpec) -> Result<Grid> {
    domain.validate()?;
    let n = domain.points();
    let half = (n / 2) as i64;
    let (dx, x0, dp) = match domain {
        DomainSpec::WholeLine { half_width, .. } => {
            (2.0 * half_width / n as f64, -half_width, PI / half_width)
        }
        DomainSpec::PeriodicInterval { .. } => (2.0 * PI / n as f64, 0.0, 1.0),
    };
    let x = (0..n).map(|k| x0 + k as f64 * dx).collect();
    let freq = (0..n).map(|i| (i as i64 - half) as f64 * dp).collect();
    Ok(Grid {
        domain,
        x,
        freq,
        dx,
    })
}

impl Grid {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn freq(&self) -> &[f64] {
        &self.freq
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn is_periodic(&self) -> bool {
        self.domain.is_periodic()
    }

    pub fn half_width(&self) -> Option<f64> {
        self.domain.half_width()
    }

    /// Quadrature weight for sums over the frequency grid.
    pub fn freq_weight(&self) -> f64 {
        match self.domain {
            DomainSpec::WholeLine { half_width, .. } => PI / half_width,
            DomainSpec::PeriodicInterval { .. } => 1.0,
        }
    }

    /// Integer mode number for coefficient slot `i`, running `-N/2 ..= N/2-1`.
    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - (self.len() / 2) as i64
    }

    /// Coefficient slot of the zero frequency.
    pub fn zero_mode_index(&self) -> usize {
        self.len() / 2
    }

    pub fn max_freq(&self) -> f64 {
        -self.freq[0]
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.domain == other.domain
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_grid_spacing_and_modes() {
        let g = build_grid(DomainSpec::PeriodicInterval { points: 16 }).unwrap();
        assert_eq!(g.len(), 16);
        assert!((g.dx() - 2.0 * PI / 16.0).abs() < 1e-15);
        assert_eq!(g.freq()[0], -8.0);
        assert_eq!(g.freq()[15], 7.0);
        assert_eq!(g.mode(8), 0);
        assert_eq!(g.freq()[g.zero_mode_index()], 0.0);
        // dx * N recovers the interval length
        assert!((g.dx() * 16.0 - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn line_grid_frequencies() {
        let g = build_grid(DomainSpec::WholeLine {
            half_width: 10.0,
            points: 32,
        })
        .unwrap();
        assert!((g.dx() - 20.0 / 32.0).abs() < 1e-15);
        for (i, &p) in g.freq().iter().enumerate() {
            let j = i as i64 - 16;
            assert!((p - PI * j as f64 / 10.0).abs() < 1e-13);
        }
        assert!((g.dx() * 32.0 - 20.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(build_grid(DomainSpec::PeriodicInterval { points: 12 }).is_err());
        assert!(build_grid(DomainSpec::PeriodicInterval { points: 8 }).is_err());
        assert!(build_grid(DomainSpec::WholeLine {
            half_width: -1.0,
            points: 64,
        })
        .is_err());
        assert!(build_grid(DomainSpec::WholeLine {
            half_width: 0.0,
            points: 64,
        })
        .is_err());
    }

    #[test]
    fn frequencies_symmetric_except_most_negative() {
        let g = build_grid(DomainSpec::PeriodicInterval { points: 32 }).unwrap();
        let n = g.len();
        for i in 1..n {
            assert!((g.freq()[i] + g.freq()[n - i]).abs() < 1e-13);
        }
        // the unpaired mode sits at slot 0
        assert_eq!(g.freq()[0], -(g.max_freq()));
    }
}
