//! Nonlinear terms `F(u, x)` with declared growth and Lipschitz constants,
//! and the sampling audit that checks the declarations.
//!
//! Constants are declared, not derived: a black-box `F` admits no computable
//! global supremum, so the contract is "declare, then audit by sampling".
//! The built-in constructors ship constants that are exact analytically.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;

type EvalFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `F(u, x)` with certificates: `|F(u,x)| <= k|u| + h(x)` and
/// `|F(u1,x) - F(u2,x)| <= l |u1 - u2|`.
#[derive(Clone)]
pub struct NonlinearSpec {
    eval: EvalFn,
    lipschitz_l: f64,
    growth_k: f64,
    envelope_h: Field,
    periodic_compatible: bool,
    label: String,
}

impl std::fmt::Debug for NonlinearSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearSpec")
            .field("label", &self.label)
            .field("lipschitz_l", &self.lipschitz_l)
            .field("growth_k", &self.growth_k)
            .field("periodic_compatible", &self.periodic_compatible)
            .finish()
    }
}

impl NonlinearSpec {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        lipschitz_l: f64,
        growth_k: f64,
        envelope_h: Field,
        periodic_compatible: bool,
    ) -> Result<Self> {
        if !lipschitz_l.is_finite() || lipschitz_l < 0.0 {
            return Err(Error::Config(format!(
                "Lipschitz constant l = {lipschitz_l} must be finite and >= 0"
            )));
        }
        if !growth_k.is_finite() || growth_k < 0.0 {
            return Err(Error::Config(format!(
                "growth constant k = {growth_k} must be finite and >= 0"
            )));
        }
        if envelope_h.values().iter().any(|&h| h < 0.0) {
            return Err(Error::Config("envelope h(x) must be nonnegative".into()));
        }
        Ok(Self {
            eval: Arc::new(eval),
            lipschitz_l,
            growth_k,
            envelope_h,
            periodic_compatible,
            label: label.into(),
        })
    }

    /// `F = 0`.
    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self::new(
            "zero",
            |_, _| 0.0,
            0.0,
            0.0,
            Field::zeros(grid.clone()),
            true,
        )
        .expect("constants are valid")
    }

    /// `F = h(x)`, independent of `u`.
    pub fn source(
        grid: &Arc<Grid>,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        periodic_compatible: bool,
    ) -> Result<Self> {
        let envelope = Field::from_fn(grid, |x| h(x).abs())?;
        Self::new(
            "source",
            move |_, x| h(x),
            0.0,
            0.0,
            envelope,
            periodic_compatible,
        )
    }

    /// `F = mu * sin(u) + h(x)`, with `l = k = |mu|` exactly.
    pub fn sine(
        grid: &Arc<Grid>,
        mu: f64,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        periodic_compatible: bool,
    ) -> Result<Self> {
        let envelope = Field::from_fn(grid, |x| h(x).abs())?;
        Self::new(
            "sine",
            move |u: f64, x| mu * u.sin() + h(x),
            mu.abs(),
            mu.abs(),
            envelope,
            periodic_compatible,
        )
    }

    /// `F = mu * u / (1 + u^2) + h(x)`; the slope peaks at `u = 0`, so
    /// `l = k = |mu|`.
    pub fn saturating(
        grid: &Arc<Grid>,
        mu: f64,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        periodic_compatible: bool,
    ) -> Result<Self> {
        let envelope = Field::from_fn(grid, |x| h(x).abs())?;
        Self::new(
            "saturating",
            move |u: f64, x| mu * u / (1.0 + u * u) + h(x),
            mu.abs(),
            mu.abs(),
            envelope,
            periodic_compatible,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lipschitz_l(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn growth_k(&self) -> f64 {
        self.growth_k
    }

    pub fn envelope_h(&self) -> &Field {
        &self.envelope_h
    }

    pub fn periodic_compatible(&self) -> bool {
        self.periodic_compatible
    }

    pub fn eval(&self, u: f64, x: f64) -> f64 {
        (self.eval)(u, x)
    }
}

/// Pointwise `F(u(x_k), x_k)`; rejects non-finite output naming the node.
pub fn evaluate_field(spec: &NonlinearSpec, u: &Field) -> Result<Field> {
    if u.grid().is_periodic() && !spec.periodic_compatible {
        return Err(Error::Config(format!(
            "nonlinearity '{}' is not periodic-compatible",
            spec.label
        )));
    }
    let values: Vec<f64> = u
        .grid()
        .x()
        .iter()
        .zip(u.values())
        .map(|(&x, &v)| spec.eval(v, x))
        .collect();
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            index,
            x: u.grid().x()[index],
            value: values[index],
        });
    }
    Field::new(u.grid().clone(), values)
}

/// Sampling audit of the declared constants.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub declared_l: f64,
    pub max_lipschitz_ratio: f64,
    pub declared_k: f64,
    pub max_growth_ratio: f64,
    pub samples: usize,
}

/// Draw seeded `(u, u', x)` triples with `x` on the grid nodes, and compare
/// the observed difference and growth ratios against the declared constants
/// with relative slack `1e-9`.
pub fn verify_constants(
    spec: &NonlinearSpec,
    u_range: (f64, f64),
    samples: usize,
    seed: u64,
) -> VerificationReport {
    assert!(samples >= 1000, "audit needs at least 1000 samples");
    assert!(u_range.0 < u_range.1, "empty sampling range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = spec.envelope_h.grid().clone();
    let n = grid.len();
    let mut max_lipschitz_ratio = 0.0f64;
    let mut max_growth_ratio = 0.0f64;
    for _ in 0..samples {
        let u1 = rng.gen_range(u_range.0..u_range.1);
        let u2 = rng.gen_range(u_range.0..u_range.1);
        let node = rng.gen_range(0..n);
        let x = grid.x()[node];
        let f1 = spec.eval(u1, x);
        let f2 = spec.eval(u2, x);
        if (u1 - u2).abs() > 1e-12 {
            max_lipschitz_ratio = max_lipschitz_ratio.max((f1 - f2).abs() / (u1 - u2).abs());
        }
        let h = spec.envelope_h.values()[node];
        if u1.abs() > 1e-12 {
            max_growth_ratio = max_growth_ratio.max((f1.abs() - h) / u1.abs());
        }
    }
    let slack = 1.0 + 1e-9;
    let pass = max_lipschitz_ratio <= spec.lipschitz_l * slack + 1e-15
        && max_growth_ratio <= spec.growth_k * slack + 1e-15;
    VerificationReport {
        pass,
        declared_l: spec.lipschitz_l,
        max_lipschitz_ratio,
        declared_k: spec.growth_k,
        max_growth_ratio,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};
    use crate::norms::l2_norm;

    fn interval(n: usize) -> Arc<Grid> {
        Arc::new(build_grid(DomainSpec::PeriodicInterval { points: n }).unwrap())
    }

    #[test]
    fn zero_map_evaluates_to_zero() {
        let g = interval(32);
        let spec = NonlinearSpec::zero(&g);
        let u = Field::from_fn(&g, f64::cos).unwrap();
        assert_eq!(evaluate_field(&spec, &u).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn sine_of_zero_field_is_zero() {
        let g = interval(32);
        let spec = NonlinearSpec::sine(&g, 1.0, |_| 0.0, true).unwrap();
        let u = Field::zeros(g);
        assert_eq!(evaluate_field(&spec, &u).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn source_term_samples_directly() {
        let g = interval(64);
        let spec = NonlinearSpec::source(&g, f64::cos, true).unwrap();
        let out = evaluate_field(&spec, &Field::zeros(g.clone())).unwrap();
        for (&x, &v) in g.x().iter().zip(out.values()) {
            assert_eq!(v, x.cos());
        }
    }

    #[test]
    fn sine_audit_passes() {
        let g = interval(64);
        let spec = NonlinearSpec::sine(&g, 1.0, |_| 0.0, true).unwrap();
        let report = verify_constants(&spec, (-5.0, 5.0), 10_000, 7);
        assert!(report.pass, "{report:?}");
        assert!(report.max_lipschitz_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn quadratic_with_understated_constant_fails() {
        let g = interval(64);
        let spec = NonlinearSpec::new(
            "quadratic",
            |u, _| u * u,
            1.0,
            1.0,
            Field::zeros(g.clone()),
            true,
        )
        .unwrap();
        let report = verify_constants(&spec, (-10.0, 10.0), 10_000, 7);
        assert!(!report.pass);
        assert!(report.max_lipschitz_ratio > 5.0);
    }

    #[test]
    fn saturating_ratio_approaches_mu() {
        let g = interval(64);
        let spec = NonlinearSpec::saturating(&g, 0.2, f64::cos, true).unwrap();
        let report = verify_constants(&spec, (-3.0, 3.0), 60_000, 11);
        assert!(report.pass, "{report:?}");
        assert!(report.max_lipschitz_ratio <= 0.2 + 1e-12);
        assert!(report.max_lipschitz_ratio > 0.19);
    }

    #[test]
    fn lipschitz_carries_to_l2_between_fields() {
        let g = interval(128);
        let spec = NonlinearSpec::sine(&g, 0.4, f64::cos, true).unwrap();
        let u1 = Field::from_fn(&g, |x| x.sin() + 0.2 * (3.0 * x).cos()).unwrap();
        let u2 = Field::from_fn(&g, |x| 0.7 * x.cos()).unwrap();
        let f1 = evaluate_field(&spec, &u1).unwrap();
        let f2 = evaluate_field(&spec, &u2).unwrap();
        let lhs = l2_norm(&f1.sub(&f2).unwrap());
        let rhs = spec.lipschitz_l() * l2_norm(&u1.sub(&u2).unwrap());
        assert!(lhs <= rhs * (1.0 + 1e-9));
    }

    #[test]
    fn non_periodic_nonlinearity_rejected_on_interval() {
        let g = interval(32);
        let spec = NonlinearSpec::source(&g, |x| x, false).unwrap();
        let u = Field::zeros(g);
        assert!(evaluate_field(&spec, &u).is_err());
    }
}
