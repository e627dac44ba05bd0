//! Fourier coefficient tables `G[k] = (2π)^{-d} ∫ K(θ) e^{-j⟨k,θ⟩} dθ`.
//!
//! Every kernel here is even along each axis, so the coefficients are real and
//! `G[k] = π^{-d} ∫_{[0,π]^d} K(θ) Π cos(k_i θ_i) dθ`. Tables are indexed by
//! `|k_i|` in the non-negative orthant.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{Family, KernelSpec};
use crate::index;
use crate::numeric::{hermite, Composite, GaussLegendre};
use crate::{Error, Result};

const PANEL_NODES: usize = 16;
/// Above this frequency the Gaussian boundary correction switches from
/// quadrature to its asymptotic expansion.
const GAUSSIAN_DIRECT_LIMIT: usize = 4096;
/// Beyond `M·π` above this value `e^{-M²π²}` underflows.
const GAUSSIAN_WRAP_NEGLIGIBLE: f64 = 27.3;

fn panel_width(cutoff: usize) -> f64 {
    (PI / 4.0).min(6.0 / cutoff.max(1) as f64)
}

/// `(1/π) Σ_i w_i v_i cos(k θ_i)` for `k = 0..=cutoff`, by the three-term
/// cosine recurrence.
fn cosine_moments(nodes: &[f64], weights: &[f64], values: &[f64], cutoff: usize) -> Vec<f64> {
    let mut out = vec![0.0; cutoff + 1];
    for ((&t, &w), &v) in nodes.iter().zip(weights).zip(values) {
        let a = w * v / PI;
        if a == 0.0 {
            continue;
        }
        let c1 = libm::cos(t);
        let two_c1 = 2.0 * c1;
        let (mut prev, mut cur) = (c1, 1.0);
        for slot in out.iter_mut() {
            *slot += a * cur;
            let next = two_c1 * cur - prev;
            prev = cur;
            cur = next;
        }
    }
    out
}

// ---------------------------------------------------------------- Gaussian

/// Images `θ + 2πn`, `n = ±1..±4`, that make up the periodisation defect.
const GAUSSIAN_IMAGES: [f64; 8] = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0];

/// r-th derivative of `τ(θ) = Σ_{n≠0} e^{-M²(θ+2πn)²}`.
fn gaussian_tau(m: f64, r: usize, theta: f64) -> f64 {
    let scale = libm::pow(-m, r as f64);
    GAUSSIAN_IMAGES
        .iter()
        .map(|n| {
            let x = m * (theta + 2.0 * PI * n);
            scale * hermite(r, x) * libm::exp(-x * x)
        })
        .sum()
}

fn gaussian_wrap_is_negligible(m: f64) -> bool {
    m * PI > GAUSSIAN_WRAP_NEGLIGIBLE
}

/// `W[k] = e^{-k²/4M²} / (2M√π)`, the coefficients of the Gaussian periodised
/// over all of ℝ.
fn gaussian_wrapped(m: f64, k: f64) -> f64 {
    libm::exp(-k * k / (4.0 * m * m)) / (2.0 * m * libm::sqrt(PI))
}

/// Boundary correction `T[k] = (1/π) ∫_0^π τ(θ) cos(kθ) dθ` for `k = 0..=cutoff`.
fn gaussian_correction(m: f64, cutoff: usize) -> Vec<f64> {
    if gaussian_wrap_is_negligible(m) {
        return vec![0.0; cutoff + 1];
    }
    let direct = cutoff.min(GAUSSIAN_DIRECT_LIMIT);
    let rule = GaussLegendre::new(PANEL_NODES);
    let mut c = Composite::default();
    c.push_uniform(0.0, PI, panel_width(direct), &rule);
    let values: Vec<f64> = c.nodes.iter().map(|&t| gaussian_tau(m, 0, t)).collect();
    let mut out = cosine_moments(&c.nodes, &c.weights, &values, direct);
    if cutoff > direct {
        // T[k] = (-1)^k/(πk²) Σ_r (-1)^r τ^{(2r+1)}(π) / k^{2r}
        let derivs: Vec<f64> = (0..6).map(|r| gaussian_tau(m, 2 * r + 1, PI)).collect();
        for k in direct + 1..=cutoff {
            let kf = k as f64;
            let inv2 = 1.0 / (kf * kf);
            let mut acc = 0.0;
            let mut p = 1.0;
            for (r, dv) in derivs.iter().enumerate() {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * dv * p;
                p *= inv2;
            }
            let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
            out.push(parity * acc * inv2 / PI);
        }
    }
    out
}

/// One-dimensional Gaussian coefficient `G[k]` of `e^{-M²wrap(θ)²}`.
pub(crate) fn gaussian_1d(m: f64, k: i64) -> f64 {
    let k = k.unsigned_abs() as usize;
    let w = gaussian_wrapped(m, k as f64);
    if gaussian_wrap_is_negligible(m) {
        return w;
    }
    let rule = GaussLegendre::new(PANEL_NODES);
    let mut c = Composite::default();
    c.push_uniform(0.0, PI, panel_width(k + 1), &rule);
    let t = c.integrate(|t| gaussian_tau(m, 0, t) * libm::cos(k as f64 * t)) / PI;
    w - t
}

fn gaussian_1d_table(m: f64, cutoff: usize) -> Vec<f64> {
    let corr = gaussian_correction(m, cutoff);
    (0..=cutoff)
        .map(|k| gaussian_wrapped(m, k as f64) - corr[k])
        .collect()
}

/// Bound on `Σ_{|k|>K} |G[k]|` for the one-dimensional Gaussian.
fn gaussian_tail_bound(m: f64, cutoff: usize) -> f64 {
    let kf = cutoff as f64;
    let wrapped = libm::erfc(kf / (2.0 * m));
    if gaussian_wrap_is_negligible(m) {
        return wrapped;
    }
    let d1 = libm::fabs(gaussian_tau(m, 1, PI));
    let d3 = libm::fabs(gaussian_tau(m, 3, PI));
    let rule = GaussLegendre::new(PANEL_NODES);
    let mut c = Composite::default();
    c.push_uniform(0.0, PI, PI / 64.0, &rule);
    let d4 = c.integrate(|t| libm::fabs(gaussian_tau(m, 4, t)));
    wrapped + 2.0 * (d1 / (PI * kf) + (d3 + d4) / (3.0 * PI * kf * kf * kf))
}

// ---------------------------------------------------------------- Laplace

fn laplace_1d_table(kernel: &KernelSpec, cutoff: usize) -> Vec<f64> {
    (0..=cutoff as i64)
        .map(|k| {
            kernel
                .closed_form_coeff(k)
                .expect("laplace has a closed form")
        })
        .collect()
}

fn laplace_tail_bound_1d(m: f64, cutoff: usize) -> f64 {
    2.0 * (1.0 + libm::exp(-PI * m)) / PI * (PI / 2.0 - libm::atan(cutoff as f64 / m))
}

/// Estimate of the d-dimensional Laplace tail from the continuous asymptote
/// `G[k] ≈ c_d M / ‖k‖^{d+1}`. Not a certified bound.
fn laplace_tail_estimate(m: f64, d: usize, cutoff: usize) -> f64 {
    let df = d as f64;
    let c_d = libm::tgamma((df + 1.0) / 2.0) / libm::pow(PI, (df + 1.0) / 2.0);
    let sphere = 2.0 * libm::pow(PI, df / 2.0) / libm::tgamma(df / 2.0);
    let k = (cutoff as f64 - 1.0).max(0.5);
    c_d * m * sphere / k * (1.0 + libm::exp(-PI * m))
}

// ---------------------------------------------------------------- Dirichlet

fn dirichlet_1d_table(order: usize, cutoff: usize) -> Vec<f64> {
    (0..=cutoff)
        .map(|k| if k <= order { 1.0 } else { 0.0 })
        .collect()
}

// ---------------------------------------------------------------- Tabulated

fn tabulated_1d_table(kernel: &KernelSpec, cutoff: usize) -> Vec<f64> {
    let profile = kernel.profile().expect("tabulated kernel has a profile");
    let m = kernel.bandwidth();
    let rule = GaussLegendre::new(PANEL_NODES);
    let h = panel_width(cutoff);
    let mut breaks: Vec<f64> = profile
        .knots()
        .iter()
        .map(|t| t / m)
        .filter(|&t| t > 0.0 && t < PI)
        .collect();
    breaks.insert(0, 0.0);
    breaks.push(PI);
    let mut c = Composite::default();
    for w in breaks.windows(2) {
        c.push_uniform(w[0], w[1], h, &rule);
    }
    let values: Vec<f64> = c.nodes.iter().map(|&t| profile.eval(m * t)).collect();
    cosine_moments(&c.nodes, &c.weights, &values, cutoff)
}

// ---------------------------------------------------------------- radial tensor quadrature

/// Coefficients of a radial kernel `g(M‖θ‖)` in d ≥ 2 dimensions by tensor
/// Gauss–Legendre quadrature, returned over `[0..=K]^d`.
///
/// The cone at the origin is resolved by geometric grading; `reach` truncates
/// the integration cube where the profile is negligible.
fn radial_tensor_table<F: Fn(f64) -> f64>(
    g: F,
    m: f64,
    d: usize,
    cutoff: usize,
    reach: f64,
) -> Vec<f64> {
    let (levels, graded_nodes, uniform_nodes) = if d == 2 { (30, 10, 16) } else { (16, 8, 12) };
    let h = (PI / 4.0)
        .min(6.0 / cutoff.max(1) as f64)
        .min(6.0 / m)
        .min(reach);
    let mut axis = Composite::default();
    axis.push_graded(h, levels, &GaussLegendre::new(graded_nodes));
    axis.push_uniform(h, reach, h, &GaussLegendre::new(uniform_nodes));
    let n = axis.len();
    let kk = cutoff + 1;

    // C[k][i] = w_i cos(k θ_i) / π
    let mut cmat = vec![0.0; kk * n];
    for (i, (&t, &w)) in axis.nodes.iter().zip(&axis.weights).enumerate() {
        for k in 0..kk {
            cmat[k * n + i] = w * libm::cos(k as f64 * t) / PI;
        }
    }

    let mut dims = vec![n; d];
    let mut data = vec![0.0; index::pow(n, d)];
    for (flat, slot) in data.iter_mut().enumerate() {
        let idx = index::unflatten(flat, n, d);
        let r2: f64 = idx.iter().map(|&i| axis.nodes[i] * axis.nodes[i]).sum();
        *slot = g(m * libm::sqrt(r2));
    }
    for ax in (0..d).rev() {
        data = contract_axis(&data, &dims, ax, &cmat, kk, n);
        dims[ax] = kk;
    }
    data
}

/// Apply the `rows × cols` matrix `c` along `axis` of a row-major array.
fn contract_axis(
    data: &[f64],
    dims: &[usize],
    axis: usize,
    c: &[f64],
    rows: usize,
    cols: usize,
) -> Vec<f64> {
    debug_assert_eq!(dims[axis], cols);
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut out = vec![0.0; outer * rows * inner];
    for o in 0..outer {
        for r in 0..rows {
            let crow = &c[r * cols..(r + 1) * cols];
            let dst = &mut out[(o * rows + r) * inner..(o * rows + r + 1) * inner];
            for (i, &cv) in crow.iter().enumerate() {
                if cv == 0.0 {
                    continue;
                }
                let src = &data[(o * cols + i) * inner..(o * cols + i + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += cv * s;
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- assembly

/// Coefficients over the non-negative orthant `[0..=K]^d`, plus the tail
/// bound and whether that bound is certified.
pub(crate) struct OrthantTable {
    pub values: Vec<f64>,
    pub truncation: Option<f64>,
    pub certified: bool,
}

pub(crate) fn orthant_table(kernel: &KernelSpec, cutoff: usize) -> Result<OrthantTable> {
    let d = kernel.dim();
    let m = kernel.bandwidth();
    let separable = |one: Vec<f64>, tail: f64| {
        let s1: f64 = one[0] + 2.0 * one[1..].iter().map(|v| libm::fabs(*v)).sum::<f64>();
        let values = (0..index::pow(cutoff + 1, d))
            .map(|flat| {
                index::unflatten(flat, cutoff + 1, d)
                    .iter()
                    .map(|&k| one[k])
                    .product()
            })
            .collect();
        let truncation = libm::pow(s1 + tail, d as f64) - libm::pow(s1, d as f64);
        OrthantTable {
            values,
            truncation: Some(truncation.max(0.0)),
            certified: true,
        }
    };
    match kernel.family() {
        Family::Gaussian => Ok(separable(
            gaussian_1d_table(m, cutoff),
            gaussian_tail_bound(m, cutoff),
        )),
        Family::Dirichlet => {
            let order = kernel.dirichlet_order();
            let mut t = separable(dirichlet_1d_table(order, cutoff), 0.0);
            t.truncation = Some(if cutoff >= order {
                0.0
            } else {
                libm::pow((2 * order + 1) as f64, d as f64)
                    - libm::pow((2 * cutoff + 1) as f64, d as f64)
            });
            Ok(t)
        }
        Family::Laplace => match d {
            1 => Ok(OrthantTable {
                values: laplace_1d_table(kernel, cutoff),
                truncation: Some(laplace_tail_bound_1d(m, cutoff)),
                certified: true,
            }),
            2 | 3 => Ok(OrthantTable {
                values: radial_tensor_table(|t| libm::exp(-t), m, d, cutoff, PI.min(46.0 / m)),
                truncation: Some(laplace_tail_estimate(m, d, cutoff)),
                certified: false,
            }),
            _ => Err(Error::Unsupported(alloc::format!(
                "Laplace spectra are only computed for d <= 3, got d = {d}"
            ))),
        },
        Family::Tabulated => {
            let profile = kernel.profile().expect("tabulated kernel has a profile");
            match d {
                1 => Ok(OrthantTable {
                    values: tabulated_1d_table(kernel, cutoff),
                    truncation: None,
                    certified: false,
                }),
                2 | 3 => Ok(OrthantTable {
                    values: radial_tensor_table(|t| profile.eval(t), m, d, cutoff, PI),
                    truncation: None,
                    certified: false,
                }),
                _ => Err(Error::Unsupported(alloc::format!(
                    "tabulated spectra are only computed for d <= 3, got d = {d}"
                ))),
            }
        }
    }
}

/// Trapezoid-rule approximation of `G[k]` with `nodes` points per axis,
/// checked against the rule with half as many points.
pub fn quadrature_coeff(
    kernel: &KernelSpec,
    k: &[i64],
    nodes_per_axis: usize,
    tolerance: f64,
) -> Result<f64> {
    let d = kernel.dim();
    if k.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: k.len(),
        });
    }
    let kmax = k
        .iter()
        .map(|v| v.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    if nodes_per_axis < 4 * (kmax + 1) {
        return Err(Error::InvalidArgument(alloc::format!(
            "need at least 4(|k|+1) = {} nodes per axis, got {nodes_per_axis}",
            4 * (kmax + 1)
        )));
    }
    let coarse = trapezoid(kernel, k, nodes_per_axis / 2);
    let fine = trapezoid(kernel, k, nodes_per_axis);
    if libm::fabs(fine - coarse) > tolerance {
        return Err(Error::NoConvergence {
            coarse,
            fine,
            tolerance,
        });
    }
    Ok(fine)
}

fn trapezoid(kernel: &KernelSpec, k: &[i64], n: usize) -> f64 {
    let d = kernel.dim();
    let step = 2.0 * PI / n as f64;
    let theta: Vec<f64> = (0..n).map(|j| -PI + step * j as f64).collect();
    let cos: Vec<Vec<f64>> = k
        .iter()
        .map(|&ki| theta.iter().map(|&t| libm::cos(ki as f64 * t)).collect())
        .collect();
    let mut acc = crate::numeric::Neumaier::new();
    let mut point = vec![0.0; d];
    for flat in 0..index::pow(n, d) {
        let idx = index::unflatten(flat, n, d);
        let mut c = 1.0;
        for (axis, &i) in idx.iter().enumerate() {
            point[axis] = theta[i];
            c *= cos[axis][i];
        }
        acc.add(kernel.eval(&point) * c);
    }
    acc.value() / index::pow(n, d) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_correction_matches_direct_quadrature() {
        // Reference: composite GL of (1/π)∫_0^π e^{-M²θ²}cos(kθ)dθ.
        let rule = GaussLegendre::new(20);
        for &m in &[0.5, 1.0, 2.0] {
            let table = gaussian_1d_table(m, 40);
            for k in [0usize, 1, 2, 7, 40] {
                let mut c = Composite::default();
                c.push_uniform(0.0, PI, 0.02, &rule);
                let direct =
                    c.integrate(|t| libm::exp(-m * m * t * t) * libm::cos(k as f64 * t)) / PI;
                assert!((table[k] - direct).abs() < 1e-14, "m={m} k={k}");
                assert!((gaussian_1d(m, k as i64) - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gaussian_asymptotic_branch_is_continuous() {
        let m = 1.0;
        let corr = gaussian_correction(m, GAUSSIAN_DIRECT_LIMIT + 4);
        let a = corr[GAUSSIAN_DIRECT_LIMIT];
        let b = corr[GAUSSIAN_DIRECT_LIMIT + 2];
        assert!((a - b).abs() <= 1e-3 * a.abs());
    }

    #[test]
    fn gaussian_tail_bound_dominates_measured_tail() {
        for &m in &[0.5, 1.0, 3.0] {
            let big = gaussian_1d_table(m, 3000);
            for cutoff in [4usize, 16, 64] {
                let measured: f64 = 2.0 * big[cutoff + 1..].iter().map(|v| v.abs()).sum::<f64>();
                let bound = gaussian_tail_bound(m, cutoff);
                assert!(measured <= bound, "m={m} K={cutoff} {measured} > {bound}");
            }
        }
    }

    #[test]
    fn contract_axis_matches_matrix_product() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]; // 2 x 3
        let c = [1.0, 0.0, -1.0, 0.5, 0.5, 0.5]; // 2 x 3
        let out = contract_axis(&data, &[2, 3], 1, &c, 2, 3);
        assert_eq!(out, [-2.0, 3.0, -2.0, 7.5]);
    }
}
