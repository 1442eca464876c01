//! Property tests for the spectral substrate: transform identities, norm
//! relations, and the convolution bounds that the solver's estimates rest on.

use std::sync::Arc;

use proptest::prelude::*;

use bidrift_core::oracle::direct_convolution;
use bidrift_core::{
    build_grid, convolve, evaluate_field, forward_transform, h4_norm, inverse_transform, l2_norm,
    l2_norm_spectral, DomainSpec, Field, Grid, Kernel, NonlinearSpec,
};

fn interval(n: usize) -> Arc<Grid> {
    Arc::new(build_grid(DomainSpec::PeriodicInterval { points: n }).unwrap())
}

fn line(l: f64, n: usize) -> Arc<Grid> {
    Arc::new(
        build_grid(DomainSpec::WholeLine {
            half_width: l,
            points: n,
        })
        .unwrap(),
    )
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n)
}

/// Smooth decaying line data: a Gaussian envelope times a low-order trig
/// packet, so both operands in a whole-line convolution vanish well inside
/// the truncation.
fn decaying_field(grid: &Arc<Grid>, coeffs: &[f64]) -> Field {
    let c = coeffs.to_vec();
    Field::from_fn(grid, move |x| {
        let packet: f64 = c
            .iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * 0.7 * x).cos())
            .sum();
        (-x * x).exp() * packet
    })
    .unwrap()
}

proptest! {
    #[test]
    fn roundtrip_interval(vals in values(128)) {
        let g = interval(128);
        let f = Field::new(g, vals).unwrap();
        let back = inverse_transform(&forward_transform(&f)).unwrap();
        let err = f.sub(&back).unwrap().max_abs();
        prop_assert!(err <= 1e-12 * f.max_abs().max(1e-30));
    }

    #[test]
    fn roundtrip_line(vals in values(128)) {
        let g = line(7.5, 128);
        let f = Field::new(g, vals).unwrap();
        let back = inverse_transform(&forward_transform(&f)).unwrap();
        let err = f.sub(&back).unwrap().max_abs();
        prop_assert!(err <= 1e-12 * f.max_abs().max(1e-30));
    }

    #[test]
    fn forward_transform_is_hermitian(vals in values(64)) {
        for g in [interval(64), line(5.0, 64)] {
            let f = Field::new(g, vals.clone()).unwrap();
            let spectrum = forward_transform(&f);
            prop_assert!(spectrum.hermitian_asymmetry() <= 1e-12 * spectrum.max_abs().max(1e-30));
        }
    }

    #[test]
    fn plancherel_consistency(vals in values(128)) {
        for g in [interval(128), line(9.0, 128)] {
            let f = Field::new(g, vals.clone()).unwrap();
            let physical = l2_norm(&f);
            let spectral = l2_norm_spectral(&forward_transform(&f));
            prop_assert!((physical - spectral).abs() <= 1e-10 * physical.max(1e-30));
        }
    }

    #[test]
    fn h4_dominates_l2(vals in values(64)) {
        let g = interval(64);
        let f = Field::new(g, vals).unwrap();
        prop_assert!(h4_norm(&f) >= l2_norm(&f) * (1.0 - 1e-12));
    }

    #[test]
    fn convolution_matches_oracle_on_interval(gv in values(128), fv in values(128)) {
        let g = interval(128);
        let kernel = Kernel::from_field(Field::new(g.clone(), gv).unwrap());
        let f = Field::new(g, fv).unwrap();
        let fast = convolve(&kernel, &f).unwrap();
        let slow = direct_convolution(&kernel, &f).unwrap();
        let scale = 1.0 + kernel.l1() * f.max_abs();
        prop_assert!(fast.sub(&slow).unwrap().max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn convolution_matches_oracle_on_line(gc in values(3), fc in values(3)) {
        let g = line(16.0, 128);
        let kernel = Kernel::from_field(decaying_field(&g, &gc));
        let f = decaying_field(&g, &fc);
        let fast = convolve(&kernel, &f).unwrap();
        let slow = direct_convolution(&kernel, &f).unwrap();
        let scale = 1.0 + kernel.l1() * f.max_abs();
        prop_assert!(fast.sub(&slow).unwrap().max_abs() <= 1e-6 * scale);
    }

    #[test]
    fn young_bound_for_convolution(gv in values(64), fv in values(64)) {
        let g = interval(64);
        let kernel = Kernel::from_field(Field::new(g.clone(), gv).unwrap());
        let f = Field::new(g, fv).unwrap();
        let conv = convolve(&kernel, &f).unwrap();
        prop_assert!(l2_norm(&conv) <= kernel.l1() * l2_norm(&f) + 1e-8);
    }

    #[test]
    fn nonlinearity_is_l2_lipschitz(u1 in values(64), u2 in values(64), mu in 0.05f64..2.0) {
        let g = interval(64);
        let spec = NonlinearSpec::sine(&g, mu, f64::cos, true).unwrap();
        let a = Field::new(g.clone(), u1).unwrap();
        let b = Field::new(g, u2).unwrap();
        let fa = evaluate_field(&spec, &a).unwrap();
        let fb = evaluate_field(&spec, &b).unwrap();
        let lhs = l2_norm(&fa.sub(&fb).unwrap());
        let rhs = spec.lipschitz_l() * l2_norm(&a.sub(&b).unwrap());
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-15);
    }

    #[test]
    fn scaling_a_kernel_scales_its_transform(gv in values(64), c in 0.1f64..5.0) {
        let g = interval(64);
        let base = Kernel::from_field(Field::new(g, gv).unwrap());
        let scaled = base.scaled(c);
        let gap = (scaled.spectrum().max_abs() - c * base.spectrum().max_abs()).abs();
        prop_assert!(gap <= 1e-12 * (1.0 + base.spectrum().max_abs()));
    }
}
