use proptest::prelude::*;

use ridgeless_core::index;
use ridgeless_core::model::{self, empirical_eigenfunction, kernel_matrix, project_target};
use ridgeless_core::mse;
use ridgeless_core::{Complex64, EigenStructure, Family, Grid, KernelSpec, Spectrum, TargetSpec};

fn kernel(family: Family, m: f64, d: usize) -> KernelSpec {
    match family {
        Family::Dirichlet => KernelSpec::dirichlet(m.round().max(1.0) as usize, d).unwrap(),
        f => KernelSpec::new(f, m, d).unwrap(),
    }
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Gaussian),
        Just(Family::Laplace),
        Just(Family::Dirichlet)
    ]
}

/// (family, M, N, d), kept small enough for d = 2.
fn config() -> impl Strategy<Value = (Family, f64, usize, usize)> {
    (family(), 0.5f64..4.0, 2usize..12, 1usize..=2).prop_map(|(f, m, n, d)| {
        if d == 2 {
            (f, m.min(2.0), n.min(6), d)
        } else {
            (f, m, n, d)
        }
    })
}

/// A real target with a few random cosine and sine terms inside the window.
fn target(d: usize, reach: i64) -> impl Strategy<Value = TargetSpec> {
    prop::collection::vec(
        (
            prop::collection::vec(-reach..=reach, d),
            -1.0f64..1.0,
            any::<bool>(),
        ),
        1..5,
    )
    .prop_map(move |terms| {
        let mut t = TargetSpec::zero("random", d);
        for (k, a, sine) in terms {
            t = if sine {
                t.with_sin(&k, a).unwrap()
            } else {
                t.with_cos(&k, a).unwrap()
            };
        }
        t
    })
}

fn scaled_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficients_are_even_and_symmetric((f, m, n, d) in config()) {
        let s = Spectrum::for_grid(&kernel(f, m, d), n).unwrap();
        let peak = s.get(&vec![0; d]).unwrap();
        for (k, g) in s.iter() {
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            prop_assert_eq!(s.get(&neg).unwrap(), g);
            if d == 2 {
                // axes are integrated in a fixed order, so swaps agree to rounding
                let swapped = s.get(&[k[1], k[0]]).unwrap();
                prop_assert!((swapped - g).abs() <= 1e-12 * peak);
            }
        }
    }

    #[test]
    fn classes_partition_the_window((f, m, n, d) in config()) {
        let s = Spectrum::for_grid(&kernel(f, m, d), n).unwrap();
        let table = s.hop_table(n).unwrap();
        let total: f64 = table.l1.iter().sum();
        prop_assert!(scaled_close(total, s.window_abs_sum(), 1e-12));
        let members: usize = table.members.iter().sum();
        prop_assert_eq!(members, s.window().len());
    }

    #[test]
    fn truncated_alias_sums_match_exact((f, m, n, d) in config()) {
        let k = kernel(f, m, d);
        let s = Spectrum::for_grid(&k, n).unwrap();
        let table = s.hop_table(n).unwrap();
        let exact = k.alias_sums(n);
        let slack = table.truncation.unwrap_or(0.0) + 1e-12;
        for (c, (a, e)) in table.signed_sum.iter().zip(&exact).enumerate() {
            prop_assert!((a - e).abs() <= slack, "class {}: {} vs {}", c, a, e);
        }
    }

    #[test]
    fn trace_is_grid_size_times_peak((f, m, n, d) in config()) {
        let k = kernel(f, m, d);
        let eig = EigenStructure::from_kernel(&k, n);
        let want = index::pow(n, d) as f64 * k.at_origin();
        prop_assert!(scaled_close(eig.trace(), want, 1e-11));
    }

    #[test]
    fn dft_vectors_are_eigenvectors((f, m, n, d) in config()) {
        let k = kernel(f, m, d);
        let grid = Grid::new(n, d).unwrap();
        let Ok(mat) = kernel_matrix(&k, &grid, 4096) else { return Ok(()) };
        let eig = EigenStructure::from_kernel(&k, n);
        let len = eig.len();
        let scale = eig.eigenvalues().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for c in 0..len {
            let u = eig.eigenvector(c);
            let lambda = eig.eigenvalue(c);
            for i in 0..len {
                let ku: Complex64 = (0..len).map(|j| u[j] * mat[i * len + j]).sum();
                let err = (ku - u[i] * lambda).norm();
                prop_assert!(err <= 1e-12 * scale, "class {} row {}: {}", c, i, err);
            }
        }
    }

    #[test]
    fn projection_is_pythagorean(((f, m, n, d), t) in config().prop_flat_map(|c| (Just(c), target(c.3, 8)))) {
        let s = Spectrum::for_grid(&kernel(f, m, d), n).unwrap();
        let p = project_target(&s, n, &t).unwrap();
        let sum = p.projected_norm_sq + p.residual_norm_sq();
        prop_assert!(scaled_close(sum, p.target_norm_sq, 1e-12));
        prop_assert!(p.projected_norm_sq <= p.target_norm_sq * (1.0 + 1e-12));
    }

    #[test]
    fn eigenfunctions_are_orthogonal((f, m, n, _d) in config()) {
        let s = Spectrum::for_grid(&kernel(f, m, 1), n).unwrap();
        let table = s.hop_table(n).unwrap();
        let psis: Vec<_> = (0..n)
            .map(|c| empirical_eigenfunction(&s, n, &[c]).ok())
            .collect();
        for a in 0..n {
            let Some(pa) = &psis[a] else { continue };
            let want = table.l2sq[a] / table.alias_sum[a].abs();
            prop_assert!(scaled_close(pa.norm_sq(), want, 1e-12));
            for pb in psis.iter().skip(a + 1).flatten() {
                prop_assert_eq!(pa.inner(pb), 0.0);
            }
        }
    }

    #[test]
    fn noisy_term_is_linear_in_sigma2((f, m, n, d) in config(), sigma2 in 0.0f64..10.0) {
        let s = Spectrum::for_grid(&kernel(f, m, d), n).unwrap();
        let Ok(unit) = mse::noisy_error(&s, n, 1.0) else { return Ok(()) };
        let scaled = mse::noisy_error(&s, n, sigma2).unwrap();
        prop_assert!(scaled_close(scaled.total, sigma2 * unit.total, 1e-13));
        let table = s.hop_table(n).unwrap();
        let nd = index::pow(n, d) as f64;
        for c in 0..table.len() {
            let want = table.l2sq[c] / (nd * table.alias_sum[c].powi(2));
            prop_assert!(scaled_close(unit.per_class[c], want, 1e-12));
        }
    }

    #[test]
    fn target_terms_scale_quadratically(
        (f, m, n, d) in config(),
        c in -5.0f64..5.0,
        k in prop::collection::vec(-6i64..=6, 2),
    ) {
        let s = Spectrum::for_grid(&kernel(f, m, d), n).unwrap();
        let t = TargetSpec::zero("t", d).with_cos(&k[..d], 1.0).unwrap();
        let Ok(base) = mse::full_mse(&s, n, &t, 0.0) else { return Ok(()) };
        let big = mse::full_mse(&s, n, &t.scaled(c), 0.0).unwrap();
        let c2 = c * c;
        prop_assert!(scaled_close(big.apx.total, c2 * base.apx.total, 1e-12));
        prop_assert!(scaled_close(big.free.total, c2 * base.free.total, 1e-12));
        prop_assert!(base.apx.total >= 0.0 && base.free.total >= 0.0);
    }

    #[test]
    fn target_terms_are_class_local(
        (f, m, n) in (family(), 0.5f64..4.0, 2usize..12),
        k1 in -15i64..=15,
        k2 in -15i64..=15,
    ) {
        let s = Spectrum::for_grid(&kernel(f, m, 1), n).unwrap();
        let base = TargetSpec::zero("a", 1).with_cos(&[k1], 1.0).unwrap();
        let extra = base.clone().with_sin(&[k2], 0.7).unwrap();
        let (Ok(a), Ok(b)) = (mse::full_mse(&s, n, &base, 0.0), mse::full_mse(&s, n, &extra, 0.0))
        else { return Ok(()) };
        let touched = [index::class_flat(&[k2], n), index::class_flat(&[-k2], n)];
        for c in 0..n {
            if touched.contains(&c) {
                continue;
            }
            prop_assert_eq!(a.apx.per_class[c], b.apx.per_class[c]);
            prop_assert_eq!(a.free.per_class[c], b.free.per_class[c]);
        }
    }

    #[test]
    fn separable_kernels_factor(m in 0.5f64..3.0, n in 2usize..7) {
        let k1 = KernelSpec::gaussian(m, 1).unwrap();
        let k2 = KernelSpec::gaussian(m, 2).unwrap();
        let s1 = k1.alias_sums(n);
        let s2 = k2.alias_sums(n);
        for a in 0..n {
            for b in 0..n {
                let got = s2[index::flatten(&[a, b], n)];
                prop_assert!(scaled_close(got, s1[a] * s1[b], 1e-12));
            }
        }
    }
}

#[test]
fn grid_points_are_centred() {
    let grid = Grid::new(4, 1).unwrap();
    let pts: Vec<f64> = (0..4).map(|i| grid.coordinate(i)).collect();
    let pi = std::f64::consts::PI;
    assert_eq!(pts[0], -pi);
    assert!((pts[2]).abs() < 1e-15);
}

#[test]
fn aliased_evaluation_matches_direct() {
    let grid = Grid::new(8, 1).unwrap();
    let t = TargetSpec::zero("t", 1)
        .with_cos(&[3], 1.0)
        .unwrap()
        .with_sin(&[11], 0.5)
        .unwrap();
    let direct = model::evaluate_on_grid(&t, &grid).unwrap();
    let aliased = model::evaluate_on_grid_aliased(&t, &grid).unwrap();
    for (a, b) in direct.iter().zip(&aliased) {
        assert!((a - b).abs() < 1e-13);
    }
}
