//! Values frozen from independent high-precision quadrature.

#![allow(clippy::excessive_precision)]

use ridgeless_core::mse;
use ridgeless_core::spectra::quadrature_coeff;
use ridgeless_core::{KernelSpec, Spectrum, TargetSpec};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

#[test]
fn laplace_dc_one_dimensional() {
    let k = KernelSpec::laplace(1.0, 1).unwrap();
    let g0 = k.closed_form_coeff(0).unwrap();
    assert!(close(g0, 0.304554468779694, 1e-13), "{g0}");
}

#[test]
fn laplace_two_dimensional_coefficients() {
    let cases: [(f64, [i64; 2], f64); 5] = [
        (1.0, [0, 0], 0.13718610403994161),
        (1.0, [1, 0], 0.059651170352920522),
        (1.0, [2, 3], 0.0030302532142947239),
        (2.0, [1, 1], 0.021759202377623025),
        (4.0, [5, 0], 0.0024249976885789092),
    ];
    for (m, k, want) in cases {
        let kernel = KernelSpec::laplace(m, 2).unwrap();
        let spectrum = Spectrum::build(&kernel, 6).unwrap();
        let got = spectrum.coeff(&k).unwrap();
        assert!(close(got, want, 1e-9), "M={m} k={k:?}: {got} vs {want}");
        // symmetric under swaps and sign flips
        let swapped = spectrum.coeff(&[-k[1], k[0]]).unwrap();
        assert!(close(swapped, want, 1e-9));
    }
}

#[test]
fn gaussian_coefficients_include_boundary_defect() {
    let cases: [(f64, i64, f64); 4] = [
        (1.0, 0, 0.28209228785921681),
        (1.0, 3, 0.029734678178452074),
        (0.5, 2, 0.0031275359020747979),
        (2.0, 7, 0.0065968744912687969),
    ];
    for (m, k, want) in cases {
        let kernel = KernelSpec::gaussian(m, 1).unwrap();
        let spectrum = Spectrum::build(&kernel, 16).unwrap();
        let got = spectrum.coeff(&[k]).unwrap();
        assert!(close(got, want, 1e-10), "M={m} k={k}: {got} vs {want}");
    }
}

#[test]
fn gaussian_closed_form_is_an_approximation() {
    // the free-space formula misses the periodisation term, visibly at M=0.5
    let kernel = KernelSpec::gaussian(0.5, 1).unwrap();
    let approx = kernel.closed_form_coeff(2).unwrap();
    let exact = 0.0031275359020747979;
    assert!((approx - exact).abs() / exact > 1e-3);
}

#[test]
fn laplace_alias_sums_n4() {
    let want = [
        0.36474326774132402,
        0.23919652043405694,
        0.15686369139056211,
        0.23919652043405694,
    ];
    let kernel = KernelSpec::laplace(1.0, 1).unwrap();
    let sums = kernel.alias_sums(4);
    for (g, w) in sums.iter().zip(want) {
        assert!(close(*g, w, 1e-13), "{g} vs {w}");
    }
}

#[test]
fn quadrature_agrees_with_closed_forms() {
    let nodes = 1 << 14;
    let h = 2.0 * std::f64::consts::PI / nodes as f64;
    for m in [0.5, 1.0, 3.0] {
        let kernel = KernelSpec::laplace(m, 1).unwrap();
        // the kink at the origin limits the trapezoid rule to O(h² M)
        let tol = h * h * m / (4.0 * std::f64::consts::PI);
        for k in [0i64, 1, 4, 11] {
            let cf = kernel.closed_form_coeff(k).unwrap();
            let q = quadrature_coeff(&kernel, &[k], nodes, 1e-6).unwrap();
            assert!((cf - q).abs() <= tol, "M={m} k={k}: {cf} vs {q}");
        }
    }
    let kernel = KernelSpec::dirichlet(3, 1).unwrap();
    for k in 0i64..6 {
        let cf = kernel.closed_form_coeff(k).unwrap();
        let q = quadrature_coeff(&kernel, &[k], 1 << 10, 1e-9).unwrap();
        assert!((cf - q).abs() <= 1e-9, "k={k}: {q}");
    }
}

#[test]
fn dirichlet_noisy_error_small_grid() {
    let kernel = KernelSpec::dirichlet(3, 1).unwrap();
    let spectrum = Spectrum::for_grid(&kernel, 4).unwrap();
    let noisy = mse::noisy_error(&spectrum, 4, 1.0).unwrap();
    let want = [0.25, 0.125, 0.125, 0.125];
    for (g, w) in noisy.per_class.iter().zip(want) {
        assert!((g - w).abs() < 1e-14);
    }
    assert!((noisy.total - 0.625).abs() < 1e-14);
    // the target plays no role in the noise term
    let report = mse::full_mse(&spectrum, 4, &TargetSpec::zero("zero", 1), 1.0).unwrap();
    assert!((report.total - 0.625).abs() < 1e-14);
}
