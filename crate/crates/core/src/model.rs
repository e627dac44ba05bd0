//! Uniform grids, targets, the DFT eigenstructure of the kernel matrix and the
//! projection of a target onto the span of the representers.
//!
//! Grid points are `x_p = 2πp/N - π` for `p ∈ [N]^d`. Because of the `-π`
//! offset, `φ_k(x_p) = (-1)^{Σk} e^{j2π⟨k,p⟩/N}`, so members of a hop class
//! carry the relative sign `ε(k) = (-1)^{Σ(k_i - ℓ_i)}` (see
//! [`index::alias_phase`]). For even `N` it is identically 1.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::index;
use crate::numeric::wrap;
use crate::spectra::{HopTable, KernelSpec, Spectrum};
use crate::{Error, Result};

/// Default bound on the side of a dense kernel matrix.
pub const DENSE_LIMIT: usize = 4096;

/// Tolerance on imaginary parts of quantities that must be real.
pub const IMAG_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub n: usize,
    pub dim: usize,
}

impl Grid {
    pub fn new(n: usize, dim: usize) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "grid needs N >= 1 and d >= 1, got N = {n}, d = {dim}"
            )));
        }
        Ok(Self { n, dim })
    }

    /// Number of samples `N^d`.
    pub fn len(&self) -> usize {
        index::pow(self.n, self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.n as f64 - PI
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        index::unflatten(flat, self.n, self.dim)
            .into_iter()
            .map(|i| self.coordinate(i))
            .collect()
    }
}

/// A target `f* = Σ V[k] φ_k` given by sparse Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub id: String,
    dim: usize,
    coeffs: Vec<(Vec<i64>, Complex64)>,
    real_valued: bool,
    tail_l1: f64,
}

impl TargetSpec {
    /// The zero function, flagged real-valued.
    pub fn zero(id: &str, dim: usize) -> Self {
        Self {
            id: id.into(),
            dim,
            coeffs: Vec::new(),
            real_valued: true,
            tail_l1: 0.0,
        }
    }

    /// A target from explicit coefficients. When `real_valued` is set the
    /// coefficients must satisfy `V[-k] = conj(V[k])`.
    pub fn new(
        id: &str,
        dim: usize,
        coeffs: Vec<(Vec<i64>, Complex64)>,
        real_valued: bool,
    ) -> Result<Self> {
        let mut t = Self {
            id: id.into(),
            dim,
            coeffs: Vec::new(),
            real_valued,
            tail_l1: 0.0,
        };
        for (k, v) in coeffs {
            t.add(k, v)?;
        }
        t.validate()?;
        Ok(t)
    }

    fn add(&mut self, k: Vec<i64>, v: Complex64) -> Result<()> {
        if k.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: k.len(),
            });
        }
        match self.coeffs.binary_search_by(|(q, _)| q.cmp(&k)) {
            Ok(i) => self.coeffs[i].1 += v,
            Err(i) => self.coeffs.insert(i, (k, v)),
        }
        Ok(())
    }

    /// Add `a·cos(⟨k,x⟩)`.
    pub fn with_cos(mut self, k: &[i64], a: f64) -> Result<Self> {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        self.add(k.to_vec(), Complex64::new(a / 2.0, 0.0))?;
        self.add(neg, Complex64::new(a / 2.0, 0.0))?;
        Ok(self)
    }

    /// Add `a·sin(⟨k,x⟩)`.
    pub fn with_sin(mut self, k: &[i64], a: f64) -> Result<Self> {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        self.add(k.to_vec(), Complex64::new(0.0, -a / 2.0))?;
        self.add(neg, Complex64::new(0.0, a / 2.0))?;
        Ok(self)
    }

    /// Set `V[k] = V[-k] = a` (real, even).
    pub fn with_pair(mut self, k: &[i64], a: f64) -> Result<Self> {
        if k.iter().all(|&v| v == 0) {
            self.add(k.to_vec(), Complex64::new(a, 0.0))?;
        } else {
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            self.add(k.to_vec(), Complex64::new(a, 0.0))?;
            self.add(neg, Complex64::new(a, 0.0))?;
        }
        Ok(self)
    }

    /// Declare that the coefficients beyond those stored have `Σ|V[k]| ≤ tail`.
    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail_l1 = tail;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn real_valued(&self) -> bool {
        self.real_valued
    }

    pub fn tail_l1(&self) -> f64 {
        self.tail_l1
    }

    pub fn coeffs(&self) -> &[(Vec<i64>, Complex64)] {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        match self.coeffs.binary_search_by(|(q, _)| q.as_slice().cmp(k)) {
            Ok(i) => self.coeffs[i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|(_, v)| v.norm_sqr() == 0.0)
    }

    /// `‖f*‖² = Σ |V[k]|²` over the stored coefficients.
    pub fn norm_sq(&self) -> f64 {
        crate::numeric::neumaier_sum(self.coeffs.iter().map(|(_, v)| v.norm_sqr()))
    }

    /// Largest `|k_i|` in the support.
    pub fn max_frequency(&self) -> usize {
        self.coeffs
            .iter()
            .flat_map(|(k, _)| k.iter().map(|v| v.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// Multiply every coefficient by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut t = self.clone();
        for (_, v) in &mut t.coeffs {
            *v *= c;
        }
        t.tail_l1 *= libm::fabs(c);
        t
    }

    pub fn validate(&self) -> Result<()> {
        if !self.real_valued {
            return Ok(());
        }
        for (k, v) in &self.coeffs {
            let neg: Vec<i64> = k.iter().map(|q| -q).collect();
            let w = self.coeff(&neg);
            if (v - w.conj()).norm() > 1e-12 * (1.0 + v.norm()) {
                return Err(Error::NotRealValued { freq: k.clone() });
            }
        }
        Ok(())
    }

    /// The fixed six-target battery used across the test suite.
    ///
    /// For `d > 1` the first axis carries the one-dimensional pattern and some
    /// targets add mixed frequencies.
    pub fn battery(dim: usize) -> Vec<TargetSpec> {
        let e = |a: i64, b: i64| -> Vec<i64> {
            let mut k = vec![0i64; dim];
            k[0] = a;
            if dim > 1 {
                k[1] = b;
            }
            k
        };
        let build = || -> Result<Vec<TargetSpec>> {
            Ok(vec![
                TargetSpec::zero("cos1", dim).with_cos(&e(1, 0), 1.0)?,
                TargetSpec::zero("cos1_cos9", dim)
                    .with_pair(&e(1, 0), 0.5)?
                    .with_pair(&e(9, 0), 0.5)?,
                TargetSpec::zero("sin2", dim).with_sin(&e(2, 1), 1.0)?,
                TargetSpec::zero("cos135", dim)
                    .with_cos(&e(1, 0), 1.0)?
                    .with_cos(&e(3, -1), -0.6)?
                    .with_cos(&e(5, 2), 0.4)?,
                TargetSpec::zero("dc_cos17", dim)
                    .with_pair(&e(17, 1), 0.5)?
                    .with_pair(&e(0, 0), 0.3)?,
                TargetSpec::zero("cos2_unit", dim)
                    .with_pair(&e(2, 2), core::f64::consts::FRAC_1_SQRT_2)?,
            ])
        };
        build().expect("battery targets are well formed")
    }
}

/// Eigenvalues `λ_ℓ = N^d Σ_m G[mN + ℓ]` and eigenvectors
/// `u_ℓ[p] = N^{-d/2} e^{-j2π⟨ℓ,p⟩/N}` of the kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    pub n: usize,
    pub dim: usize,
    eigenvalues: Vec<f64>,
}

impl EigenStructure {
    pub fn from_table(table: &HopTable) -> Self {
        Self {
            n: table.n,
            dim: table.dim,
            eigenvalues: table.eigenvalues(),
        }
    }

    /// Eigenstructure straight from the kernel, without a spectrum table.
    pub fn from_kernel(kernel: &KernelSpec, n: usize) -> Self {
        let total = index::pow(n, kernel.dim()) as f64;
        Self {
            n,
            dim: kernel.dim(),
            eigenvalues: kernel
                .alias_sums(n)
                .into_iter()
                .map(|s| s * total)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, class: usize) -> f64 {
        self.eigenvalues[class]
    }

    /// The unit DFT vector `u_ℓ`.
    pub fn eigenvector(&self, class: usize) -> Vec<Complex64> {
        let ell = index::unflatten(class, self.n, self.dim);
        let scale = 1.0 / libm::sqrt(self.len() as f64);
        (0..self.len())
            .map(|flat| {
                let p = index::unflatten(flat, self.n, self.dim);
                let phase: usize = ell
                    .iter()
                    .zip(&p)
                    .map(|(l, q)| l * q % self.n)
                    .sum::<usize>()
                    % self.n;
                let a = -2.0 * PI * phase as f64 / self.n as f64;
                Complex64::new(libm::cos(a), libm::sin(a)) * scale
            })
            .collect()
    }

    /// `Σ_ℓ λ_ℓ`, which equals `N^d g(0)`.
    pub fn trace(&self) -> f64 {
        crate::numeric::neumaier_sum(self.eigenvalues.iter().copied())
    }
}

/// All `N^d` eigenpairs, computed from hop statistics without forming the
/// kernel matrix.
pub fn eigenstructure(spectrum: &Spectrum, n: usize) -> Result<EigenStructure> {
    Ok(EigenStructure::from_table(&spectrum.hop_table(n)?))
}

/// Kernel values `K(2πq/N)` for every offset `q ∈ [N]^d`.
fn kernel_offsets(kernel: &KernelSpec, n: usize) -> Vec<f64> {
    let d = kernel.dim();
    let step = 2.0 * PI / n as f64;
    let mut theta = vec![0.0; d];
    (0..index::pow(n, d))
        .map(|flat| {
            for (t, q) in theta.iter_mut().zip(index::unflatten(flat, n, d)) {
                *t = wrap(step * q as f64);
            }
            kernel.eval(&theta)
        })
        .collect()
}

/// Dense row-major kernel matrix `𝐊[p][q] = g(M·wrap(x_p - x_q))`, without a
/// singularity check.
pub fn kernel_matrix_unchecked(
    kernel: &KernelSpec,
    grid: &Grid,
    dense_limit: usize,
) -> Result<Vec<f64>> {
    if kernel.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: kernel.dim(),
            found: grid.dim,
        });
    }
    let n = grid.len();
    if n > dense_limit {
        return Err(Error::DenseLimit {
            n,
            limit: dense_limit,
        });
    }
    let offsets = kernel_offsets(kernel, grid.n);
    let idx: Vec<Vec<usize>> = (0..n)
        .map(|f| index::unflatten(f, grid.n, grid.dim))
        .collect();
    let mut out = vec![0.0; n * n];
    let mut diff = vec![0usize; grid.dim];
    for p in 0..n {
        for q in 0..n {
            for (dv, (a, b)) in diff.iter_mut().zip(idx[p].iter().zip(&idx[q])) {
                *dv = (a + grid.n - b) % grid.n;
            }
            out[p * n + q] = offsets[index::flatten(&diff, grid.n)];
        }
    }
    Ok(out)
}

/// Dense kernel matrix with the singularity check: fails when some
/// `|λ_ℓ| < 1e-12 · max |λ|`.
pub fn kernel_matrix(kernel: &KernelSpec, grid: &Grid, dense_limit: usize) -> Result<Vec<f64>> {
    let matrix = kernel_matrix_unchecked(kernel, grid, dense_limit)?;
    let sums = kernel.alias_sums(grid.n);
    let max = sums.iter().fold(0.0f64, |a, s| a.max(libm::fabs(*s)));
    if let Some((c, s)) = sums
        .iter()
        .enumerate()
        .find(|(_, s)| libm::fabs(**s) < 1e-12 * max)
    {
        return Err(Error::DegenerateClass {
            class: index::unflatten(c, grid.n, grid.dim),
            alias_sum: *s,
        });
    }
    Ok(matrix)
}

/// A function given by finitely many real Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSeries {
    pub dim: usize,
    pub terms: Vec<(Vec<i64>, f64)>,
}

impl SparseSeries {
    pub fn norm_sq(&self) -> f64 {
        crate::numeric::neumaier_sum(self.terms.iter().map(|(_, v)| v * v))
    }

    /// `⟨self, other⟩` in L².
    pub fn inner(&self, other: &SparseSeries) -> f64 {
        let mut acc = crate::numeric::Neumaier::new();
        for (k, v) in &self.terms {
            if let Some((_, w)) = other.terms.iter().find(|(q, _)| q == k) {
                acc.add(v * w);
            }
        }
        acc.value()
    }
}

/// Fourier coefficients of the empirical eigenfunction
/// `ψ_ℓ = |S_ℓ|^{-1/2} Σ_m ε(mN+ℓ) G[mN+ℓ] φ_{mN+ℓ}` over the stored window.
pub fn empirical_eigenfunction(
    spectrum: &Spectrum,
    n: usize,
    class: &[usize],
) -> Result<SparseSeries> {
    let table = spectrum.hop_table(n)?;
    let c = index::flatten(class, n);
    if table.is_degenerate(c) {
        return Err(Error::DegenerateClass {
            class: class.to_vec(),
            alias_sum: table.alias_sum[c],
        });
    }
    let scale = 1.0 / libm::sqrt(libm::fabs(table.alias_sum[c]));
    let terms = spectrum
        .iter()
        .filter(|(k, g)| *g != 0.0 && index::class_flat(k, n) == c)
        .map(|(k, g)| {
            let e = index::alias_phase(&k, n);
            (k, e * g * scale)
        })
        .collect();
    Ok(SparseSeries {
        dim: spectrum.dim(),
        terms,
    })
}

/// Projection of a target onto the span of `{K(x_p, ·)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub n: usize,
    pub dim: usize,
    /// `w_ℓ = Σ_m ε G[mN+ℓ] V[mN+ℓ] / ‖G_ℓ‖²`; zero for classes with `‖G_ℓ‖ = 0`.
    pub weights: Vec<Complex64>,
    /// `⟨G̃_ℓ, V_ℓ⟩` with `G̃ = εG`.
    pub inner: Vec<Complex64>,
    /// `‖G_ℓ‖²` over the window.
    pub l2sq: Vec<f64>,
    /// `‖V_ℓ‖²`.
    pub target_class_norm_sq: Vec<f64>,
    /// Signed aliased target sums `s_V(ℓ) = Σ_m ε V[mN+ℓ]`.
    pub target_alias_sum: Vec<Complex64>,
    /// `‖P_X f*‖² = Σ_ℓ |⟨G̃_ℓ, V_ℓ⟩|² / ‖G_ℓ‖²`.
    pub projected_norm_sq: f64,
    pub target_norm_sq: f64,
}

impl ProjectionResult {
    /// Fourier coefficient of `P_X f*` at `k`.
    pub fn projected_coeff(&self, spectrum: &Spectrum, k: &[i64]) -> Result<Complex64> {
        let g = spectrum.coeff(k)?;
        let c = index::class_flat(k, self.n);
        Ok(self.weights[c] * (index::alias_phase(k, self.n) * g))
    }

    /// Fourier coefficient of `f*_⊥ = f* - P_X f*` at `k`.
    pub fn residual_coeff(
        &self,
        spectrum: &Spectrum,
        target: &TargetSpec,
        k: &[i64],
    ) -> Result<Complex64> {
        Ok(target.coeff(k) - self.projected_coeff(spectrum, k)?)
    }

    /// `‖f*_⊥‖²`, accumulated per class.
    pub fn residual_norm_sq(&self) -> f64 {
        crate::numeric::neumaier_sum(self.class_residuals())
    }

    /// `‖V_ℓ‖² - |⟨G̃_ℓ,V_ℓ⟩|²/‖G_ℓ‖²` per class, clamped at 0.
    pub fn class_residuals(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.weights.len()).map(move |c| {
            let captured = if self.l2sq[c] > 0.0 {
                self.inner[c].norm_sqr() / self.l2sq[c]
            } else {
                0.0
            };
            (self.target_class_norm_sq[c] - captured).max(0.0)
        })
    }
}

pub(crate) fn check_target(spectrum: &Spectrum, target: &TargetSpec) -> Result<()> {
    if target.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.dim(),
            found: target.dim(),
        });
    }
    if let Some((k, _)) = target
        .coeffs()
        .iter()
        .find(|(k, _)| !spectrum.window().contains(k))
    {
        return Err(Error::OutsideWindow {
            freq: k.clone(),
            cutoff: spectrum.cutoff(),
        });
    }
    Ok(())
}

pub(crate) fn project_with_table(
    spectrum: &Spectrum,
    table: &HopTable,
    target: &TargetSpec,
) -> Result<ProjectionResult> {
    check_target(spectrum, target)?;
    let n = table.n;
    let classes = table.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut inner = vec![zero; classes];
    let mut vnorm = vec![0.0; classes];
    let mut alias = vec![zero; classes];
    for (k, v) in target.coeffs() {
        let c = index::class_flat(k, n);
        let e = index::alias_phase(k, n);
        let g = spectrum.get(k).expect("checked against window");
        inner[c] += v * (e * g);
        vnorm[c] += v.norm_sqr();
        alias[c] += v * e;
    }
    let weights: Vec<Complex64> = (0..classes)
        .map(|c| {
            if table.l2sq[c] > 0.0 {
                inner[c] / table.l2sq[c]
            } else {
                zero
            }
        })
        .collect();
    let projected = crate::numeric::neumaier_sum((0..classes).map(|c| {
        if table.l2sq[c] > 0.0 {
            inner[c].norm_sqr() / table.l2sq[c]
        } else {
            0.0
        }
    }));
    Ok(ProjectionResult {
        n,
        dim: table.dim,
        weights,
        inner,
        l2sq: table.l2sq.clone(),
        target_class_norm_sq: vnorm,
        target_alias_sum: alias,
        projected_norm_sq: projected,
        target_norm_sq: target.norm_sq(),
    })
}

/// Project `target` onto the span of the representers of an `N`-grid.
///
/// Classes with `‖G_ℓ‖ = 0` contribute nothing to the span; their weight is 0
/// and the target's mass there stays in the residual.
pub fn project_target(
    spectrum: &Spectrum,
    n: usize,
    target: &TargetSpec,
) -> Result<ProjectionResult> {
    let table = spectrum.hop_table(n)?;
    project_with_table(spectrum, &table, target)
}

/// `f*(x_p) = Σ_k V[k] e^{j⟨k,x_p⟩}`, complex.
pub fn evaluate_on_grid_complex(target: &TargetSpec, grid: &Grid) -> Result<Vec<Complex64>> {
    if target.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: grid.dim,
            found: target.dim(),
        });
    }
    Ok((0..grid.len())
        .map(|flat| {
            let x = grid.point(flat);
            target
                .coeffs()
                .iter()
                .map(|(k, v)| {
                    let a: f64 = k.iter().zip(&x).map(|(ki, xi)| *ki as f64 * xi).sum();
                    v * Complex64::new(libm::cos(a), libm::sin(a))
                })
                .sum()
        })
        .collect())
}

/// Real grid values `R_N f*`. Fails if an imaginary part exceeds
/// [`IMAG_TOLERANCE`] relative to `1 + Σ|V|`.
pub fn evaluate_on_grid(target: &TargetSpec, grid: &Grid) -> Result<Vec<f64>> {
    let values = evaluate_on_grid_complex(target, grid)?;
    real_parts(values, target)
}

fn real_parts(values: Vec<Complex64>, target: &TargetSpec) -> Result<Vec<f64>> {
    let scale = 1.0 + target.coeffs().iter().map(|(_, v)| v.norm()).sum::<f64>();
    let mut out = Vec::with_capacity(values.len());
    for z in values {
        if libm::fabs(z.im) > IMAG_TOLERANCE * scale {
            let freq = target
                .coeffs()
                .first()
                .map(|(k, _)| k.clone())
                .unwrap_or_default();
            return Err(Error::NotRealValued { freq });
        }
        out.push(z.re);
    }
    Ok(out)
}

/// Grid values through the aliased form
/// `f*(x_p) = Σ_ℓ (-1)^{Σℓ} s_V(ℓ) e^{j2π⟨ℓ,p⟩/N}`.
pub fn evaluate_on_grid_aliased(target: &TargetSpec, grid: &Grid) -> Result<Vec<f64>> {
    let n = grid.n;
    let mut alias = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, v) in target.coeffs() {
        let c = index::class_flat(k, n);
        alias[c] += v * index::alias_phase(k, n);
    }
    let values = (0..grid.len())
        .map(|flat| {
            let p = index::unflatten(flat, n, grid.dim);
            alias
                .iter()
                .enumerate()
                .filter(|(_, s)| s.norm_sqr() > 0.0)
                .map(|(c, s)| {
                    let ell = index::unflatten(c, n, grid.dim);
                    let sign = if ell.iter().sum::<usize>() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    let phase: usize =
                        ell.iter().zip(&p).map(|(l, q)| l * q % n).sum::<usize>() % n;
                    let a = 2.0 * PI * phase as f64 / n as f64;
                    s * Complex64::new(libm::cos(a), libm::sin(a)) * sign
                })
                .sum()
        })
        .collect();
    real_parts(values, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_points_lie_in_half_open_torus() {
        let g = Grid::new(4, 2).unwrap();
        for f in 0..g.len() {
            for x in g.point(f) {
                assert!((-PI..PI).contains(&x));
            }
        }
        assert_eq!(g.point(0), vec![-PI, -PI]);
    }

    #[test]
    fn real_valued_flag_is_enforced() {
        let bad = TargetSpec::new("bad", 1, vec![(vec![1], c(1.0))], true);
        assert!(matches!(bad, Err(Error::NotRealValued { .. })));
        assert!(TargetSpec::new("ok", 1, vec![(vec![1], c(1.0))], false).is_ok());
    }

    #[test]
    fn cosine_on_four_points() {
        let t = TargetSpec::zero("cos", 1).with_cos(&[1], 1.0).unwrap();
        let v = evaluate_on_grid(&t, &Grid::new(4, 1).unwrap()).unwrap();
        let want = [-1.0, 0.0, 1.0, 0.0];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn frequency_n_aliases_to_dc() {
        let g = Grid::new(5, 1).unwrap();
        let a = TargetSpec::new("n", 1, vec![(vec![5], c(1.0))], false).unwrap();
        let b = TargetSpec::new("0", 1, vec![(vec![0], c(1.0))], false).unwrap();
        let va = evaluate_on_grid_complex(&a, &g).unwrap();
        let vb = evaluate_on_grid_complex(&b, &g).unwrap();
        for (x, y) in va.iter().zip(&vb) {
            // N odd: φ_N(x_p) = (-1)^N = -1 on the grid.
            assert!((x + y).norm() < 1e-12);
        }
        let g = Grid::new(4, 1).unwrap();
        let a = TargetSpec::new("n", 1, vec![(vec![4], c(1.0))], false).unwrap();
        for z in evaluate_on_grid_complex(&a, &g).unwrap() {
            assert!((z - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn battery_is_real_valued() {
        for d in 1..=3 {
            let b = TargetSpec::battery(d);
            assert_eq!(b.len(), 6);
            for t in b {
                t.validate().unwrap();
                assert!(t.max_frequency() <= 17);
            }
        }
    }

    #[test]
    fn dirichlet_matrix_diagonal_is_two_m_plus_one() {
        let k = KernelSpec::dirichlet(1, 1).unwrap();
        let m = kernel_matrix(&k, &Grid::new(4, 1).unwrap(), DENSE_LIMIT);
        // N = 4 > 2M + 1: class 2 is empty.
        assert!(matches!(m, Err(Error::DegenerateClass { .. })));
        let m = kernel_matrix_unchecked(&k, &Grid::new(4, 1).unwrap(), DENSE_LIMIT).unwrap();
        for i in 0..4 {
            assert!((m[i * 4 + i] - 3.0).abs() < 1e-12);
        }
    }
}
