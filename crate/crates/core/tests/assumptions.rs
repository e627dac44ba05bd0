use ridgeless_core::assumptions::{
    certify, check_scale, lower_bounds, scale_cutoff, CertifyOptions, Verdict,
};
use ridgeless_core::{mse, KernelSpec, Spectrum, TabulatedProfile};

fn named(m: f64) -> Vec<KernelSpec> {
    vec![
        KernelSpec::laplace(m, 1).unwrap(),
        KernelSpec::gaussian(m, 1).unwrap(),
        KernelSpec::dirichlet(m as usize, 1).unwrap(),
    ]
}

#[test]
fn named_families_certify() {
    for m in [1.0, 3.0] {
        for k in named(m) {
            let r = certify(&k, &CertifyOptions::default()).unwrap();
            assert_eq!(r.verdict(), Verdict::Satisfied, "{:?} M={m}", k.family());
            assert!(r.c1().is_finite() && r.c1() >= 1.0);
            assert!(r.c3() >= 1.0);
            // the uniform constant covers every per-|k| constant
            for c in &r.tail.c1_per_k {
                assert!(*c <= r.c1());
            }
        }
    }
}

#[test]
fn gaussian_head_constant() {
    let r = certify(
        &KernelSpec::gaussian(1.0, 1).unwrap(),
        &CertifyOptions::default(),
    )
    .unwrap();
    // ratio G[0]/G[M'] of e^{-k²/4M²} at the smallest rung
    assert!((r.c3() - 0.25f64.exp()).abs() < 1e-6, "{}", r.c3());
}

#[test]
fn scale_window_grows_with_bandwidth() {
    assert_eq!(scale_cutoff(0.3), 128);
    assert_eq!(scale_cutoff(2.5), 384);
    let k = KernelSpec::laplace(2.0, 1).unwrap();
    let narrow = check_scale(&Spectrum::build(&k, 8).unwrap());
    let wide = check_scale(&Spectrum::build(&k, scale_cutoff(2.0)).unwrap());
    assert_eq!(narrow.verdict, Verdict::Inconclusive);
    assert_eq!(wide.verdict, Verdict::Satisfied);
}

#[test]
fn short_profile_is_inconclusive() {
    let samples: Vec<(f64, f64)> = (0..=40)
        .map(|i| {
            let t = i as f64 * 0.25;
            (t, (-t).exp())
        })
        .collect();
    let profile = TabulatedProfile::from_samples(&samples).unwrap();
    let k = KernelSpec::tabulated(profile, 1.0, 1).unwrap();
    let r = certify(&k, &CertifyOptions::default()).unwrap();
    assert_eq!(r.head.verdict(), Verdict::Inconclusive);
    assert_eq!(r.verdict(), Verdict::Inconclusive);
    assert!(r.c3().is_infinite());
}

#[test]
fn noisy_bound_is_sound() {
    for m in [1.0, 4.0] {
        for k in named(m) {
            let r = certify(&k, &CertifyOptions::default()).unwrap();
            for n in [2, 3, 4, 8, 16] {
                let s = Spectrum::for_grid(&k, n).unwrap();
                let lb = lower_bounds(&r, &s, n, 1.0).unwrap();
                // singular grids have no finite noisy error to compare with
                let Ok(noisy) = mse::noisy_error(&s, n, 1.0) else {
                    continue;
                };
                assert!(
                    noisy.total >= lb.noisy_bound,
                    "{:?} M={m} N={n}: {} < {}",
                    k.family(),
                    noisy.total,
                    lb.noisy_bound
                );
            }
        }
    }
    let k = KernelSpec::gaussian(1.0, 2).unwrap();
    let r = certify(&k, &CertifyOptions::default()).unwrap();
    for n in [2, 4] {
        let s = Spectrum::for_grid(&k, n).unwrap();
        let lb = lower_bounds(&r, &s, n, 2.0).unwrap();
        assert!(mse::noisy_error(&s, n, 2.0).unwrap().total >= lb.noisy_bound);
    }
}

#[test]
fn apx_bound_holds_when_bandwidth_exceeds_grid() {
    for m in [2.0, 4.0, 8.0] {
        for k in named(m) {
            let r = certify(&k, &CertifyOptions::default()).unwrap();
            let witness = r.witness_target();
            for n in [2usize, 3, 4, 8] {
                if n as f64 > m {
                    continue;
                }
                let s = Spectrum::for_grid(&k, n).unwrap();
                let lb = lower_bounds(&r, &s, n, 0.0).unwrap();
                let apx = mse::approximation_error(&s, n, &witness).unwrap().total;
                assert!(lb.apx_bound > 0.0);
                assert!(apx >= lb.apx_bound, "{:?} M={m} N={n}", k.family());
            }
        }
    }
}

#[test]
fn bounds_vanish_without_noise() {
    let k = KernelSpec::laplace(1.0, 1).unwrap();
    let r = certify(&k, &CertifyOptions::default()).unwrap();
    let s = Spectrum::for_grid(&k, 8).unwrap();
    let lb = lower_bounds(&r, &s, 8, 0.0).unwrap();
    assert_eq!(lb.noisy_bound, 0.0);
    assert_eq!(lb.classes, 8);
    assert!(lb.qualifying <= lb.classes);
}
