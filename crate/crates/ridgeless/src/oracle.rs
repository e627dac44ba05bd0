//! Brute-force references for the closed forms in `ridgeless_core::mse`.
//!
//! Interpolants are solved densely (Cholesky, LU fallback) or through the DFT
//! diagonalisation, and their error against a target is measured coefficient
//! by coefficient through Parseval. The noise term is evaluated exactly from
//! `𝐊⁻²` quadratic forms, or sampled.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use ridgeless_core::index::{self, Window};
use ridgeless_core::model::{self, Grid, TargetSpec};
use ridgeless_core::numeric::{neumaier_sum, Neumaier};
use ridgeless_core::{Complex64, Error, ErrorTerms, KernelSpec, Result, Spectrum};
use rustfft::{Fft, FftPlanner};

/// Backward-error tolerance `‖𝐊α - y‖∞ / (‖y‖∞ + ‖𝐊‖∞‖α‖∞)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Seed of the published random right-hand-side battery.
pub const BATTERY_SEED: u64 = 0x005e_ed0f_0ace;

/// Kernel weights `α` of an interpolant `f̂ = Σ_p α_p K(·, x_p)`.
#[derive(Debug, Clone)]
pub struct InterpolantCoeffs {
    pub kernel: KernelSpec,
    pub grid: Grid,
    pub alpha: Vec<f64>,
    /// Achieved backward error of the solve.
    pub residual: f64,
}

impl InterpolantCoeffs {
    /// `Â[ℓ] = Σ_p α_p e^{-j2π⟨ℓ,p⟩/N}`.
    pub fn alpha_dft(&self) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self.alpha.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        let plan = FftPlanner::new().plan_fft_forward(self.grid.n);
        fft_nd(&mut buf, self.grid.n, self.grid.dim, &plan);
        buf
    }

    /// Fourier coefficient `B[k] = (-1)^{Σk} G[k] Â[k mod N]` of the interpolant.
    pub fn fourier_coeff(&self, spectrum: &Spectrum, k: &[i64]) -> Result<Complex64> {
        let g = spectrum.coeff(k)?;
        let a = self.alpha_dft()[index::class_flat(k, self.grid.n)];
        Ok(a * (index::parity_sign(k) * g))
    }

    /// `f̂(x)` by direct summation over the grid.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut theta = vec![0.0; self.grid.dim];
        let mut acc = Neumaier::new();
        for (p, &a) in self.alpha.iter().enumerate() {
            for (t, (xi, pi)) in theta.iter_mut().zip(x.iter().zip(self.grid.point(p))) {
                *t = xi - pi;
            }
            acc.add(a * self.kernel.eval(&theta));
        }
        acc.value()
    }
}

fn check_rhs(grid: &Grid, y: &[f64]) -> Result<()> {
    if y.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: y.len(),
        });
    }
    Ok(())
}

fn backward_error(kmat: &DMatrix<f64>, alpha: &DVector<f64>, y: &DVector<f64>) -> (f64, f64) {
    let r = kmat * alpha - y;
    let knorm = kmat
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let scale = y.amax() + knorm * alpha.amax();
    let res = r.amax();
    (if scale > 0.0 { res / scale } else { res }, res)
}

fn dense_matrix(kernel: &KernelSpec, grid: &Grid, dense_limit: usize) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let k = model::kernel_matrix(kernel, grid, dense_limit)?;
    Ok(DMatrix::from_row_slice(n, n, &k))
}

enum Factor {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Factor {
    fn new(kmat: &DMatrix<f64>) -> Self {
        match kmat.clone().cholesky() {
            Some(c) => Factor::Cholesky(c),
            None => Factor::Lu(kmat.clone().lu()),
        }
    }

    fn solve(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            Factor::Cholesky(c) => Ok(c.solve(b)),
            Factor::Lu(l) => l.solve(b).ok_or(Error::Residual {
                residual: f64::INFINITY,
                tolerance: RESIDUAL_TOLERANCE,
            }),
        }
    }
}

const REFINEMENT_STEPS: usize = 4;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

/// `y_i - (𝐊α)_i` in doubled working precision.
fn residual_dot2(kmat: &DMatrix<f64>, alpha: &DVector<f64>, yi: f64, i: usize) -> f64 {
    let (mut s, mut c) = (yi, 0.0);
    for j in 0..alpha.len() {
        let p = -kmat[(i, j)] * alpha[j];
        let e = (-kmat[(i, j)]).mul_add(alpha[j], -p);
        let (t, q) = two_sum(s, p);
        s = t;
        c += q + e;
    }
    s + c
}

/// Dense solve of `𝐊α = y`, refined against the residual.
pub fn solve_dense(
    kernel: &KernelSpec,
    grid: &Grid,
    y: &[f64],
    dense_limit: usize,
) -> Result<InterpolantCoeffs> {
    check_rhs(grid, y)?;
    let kmat = dense_matrix(kernel, grid, dense_limit)?;
    let factor = Factor::new(&kmat);
    let b = DMatrix::from_column_slice(y.len(), 1, y);
    let mut alpha = DVector::from_column_slice(factor.solve(&b)?.as_slice());
    // refinement with a compensated residual recovers full accuracy for
    // condition numbers far beyond 1/ε^{1/2}
    for _ in 0..REFINEMENT_STEPS {
        let r = DMatrix::from_iterator(
            y.len(),
            1,
            (0..y.len()).map(|i| residual_dot2(&kmat, &alpha, y[i], i)),
        );
        let delta = factor.solve(&r)?;
        let step = delta.amax();
        alpha += DVector::from_column_slice(delta.as_slice());
        if step <= f64::EPSILON * alpha.amax() {
            break;
        }
    }
    let yv = DVector::from_column_slice(y);
    let (rel, _) = backward_error(&kmat, &alpha, &yv);
    if !(rel <= RESIDUAL_TOLERANCE) {
        return Err(Error::Residual {
            residual: rel,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    Ok(InterpolantCoeffs {
        kernel: kernel.clone(),
        grid: *grid,
        alpha: alpha.as_slice().to_vec(),
        residual: rel,
    })
}

/// Sorted eigenvalues of the dense kernel matrix (no singularity check).
pub fn dense_eigenvalues(kernel: &KernelSpec, grid: &Grid, dense_limit: usize) -> Result<Vec<f64>> {
    let n = grid.len();
    let k = model::kernel_matrix_unchecked(kernel, grid, dense_limit)?;
    let mut ev: Vec<f64> = DMatrix::from_row_slice(n, n, &k)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// In-place unnormalised multi-dimensional DFT along every axis.
pub fn fft_nd(data: &mut [Complex64], n: usize, d: usize, plan: &Arc<dyn Fft<f64>>) {
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    for axis in 0..d {
        let stride = index::pow(n, d - 1 - axis);
        for base in (0..total).filter(|b| (b / stride).is_multiple_of(n)) {
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[base + j * stride];
            }
            plan.process_with_scratch(&mut line, &mut scratch);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride] = *v;
            }
        }
    }
}

/// Eigenvalues `λ_ℓ = N^d S_ℓ`, failing on a degenerate class.
fn checked_eigenvalues(kernel: &KernelSpec, n: usize) -> Result<Vec<f64>> {
    let total = index::pow(n, kernel.dim()) as f64;
    let lambda: Vec<f64> = kernel
        .alias_sums(n)
        .into_iter()
        .map(|s| s * total)
        .collect();
    let max = lambda.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    if let Some((c, l)) = lambda
        .iter()
        .enumerate()
        .find(|(_, l)| l.abs() < 1e-12 * max)
    {
        return Err(Error::DegenerateClass {
            class: index::unflatten(c, n, kernel.dim()),
            alias_sum: l / total,
        });
    }
    Ok(lambda)
}

/// Solve `𝐊α = y` as `α = IDFT(DFT(y) / λ)`.
pub fn solve_fft(kernel: &KernelSpec, n: usize, y: &[f64]) -> Result<InterpolantCoeffs> {
    let grid = Grid::new(n, kernel.dim())?;
    check_rhs(&grid, y)?;
    let lambda = checked_eigenvalues(kernel, n)?;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let d = grid.dim;
    let scale = 1.0 / grid.len() as f64;

    let mut buf: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, n, d, &fwd);
    for (b, l) in buf.iter_mut().zip(&lambda) {
        *b /= *l;
    }
    fft_nd(&mut buf, n, d, &inv);
    let alpha: Vec<f64> = buf.iter().map(|z| z.re * scale).collect();

    // residual through the same diagonalisation
    let mut check: Vec<Complex64> = alpha.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    fft_nd(&mut check, n, d, &fwd);
    for (b, l) in check.iter_mut().zip(&lambda) {
        *b *= *l;
    }
    fft_nd(&mut check, n, d, &inv);
    let res = check
        .iter()
        .zip(y)
        .map(|(z, v)| (z.re * scale - v).abs())
        .fold(0.0, f64::max);
    let amax = alpha.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let ymax = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let lmax = lambda.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let denom = ymax + lmax * amax;
    let rel = if denom > 0.0 { res / denom } else { res };
    if !(rel <= RESIDUAL_TOLERANCE) {
        return Err(Error::Residual {
            residual: rel,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    Ok(InterpolantCoeffs {
        kernel: kernel.clone(),
        grid,
        alpha,
        residual: rel,
    })
}

/// `‖f̂ - f*‖²` measured through Parseval on a spectrum window.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsevalError {
    pub value: f64,
    pub per_class: Vec<f64>,
    /// Bound on the interpolant's energy outside the window, when the
    /// spectrum carries a truncation bound.
    pub tail_bound: Option<f64>,
}

/// Precomputed window data for repeated Parseval evaluations.
struct Probe {
    n: usize,
    classes: usize,
    /// `(class, (-1)^{Σk} G[k], V[k])` per window frequency.
    entries: Vec<(usize, f64, Complex64)>,
    truncation: Option<f64>,
}

impl Probe {
    fn new(spectrum: &Spectrum, n: usize, target: &TargetSpec) -> Result<Self> {
        let window: Window = spectrum.window();
        if target.dim() != spectrum.dim() {
            return Err(Error::DimensionMismatch {
                expected: spectrum.dim(),
                found: target.dim(),
            });
        }
        if let Some((k, _)) = target.coeffs().iter().find(|(k, _)| !window.contains(k)) {
            return Err(Error::OutsideWindow {
                freq: k.clone(),
                cutoff: spectrum.cutoff(),
            });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); window.len()];
        for (k, c) in target.coeffs() {
            v[window.flat(k).unwrap()] = *c;
        }
        let entries = spectrum
            .iter()
            .zip(v)
            .map(|((k, g), vk)| (index::class_flat(&k, n), index::parity_sign(&k) * g, vk))
            .collect();
        Ok(Self {
            n,
            classes: index::pow(n, spectrum.dim()),
            entries,
            truncation: spectrum.truncation_bound(),
        })
    }

    fn error(&self, a_hat: &[Complex64]) -> ParsevalError {
        let mut acc = vec![Neumaier::new(); self.classes];
        for &(c, sg, vk) in &self.entries {
            acc[c].add((a_hat[c] * sg - vk).norm_sqr());
        }
        let per_class: Vec<f64> = acc.iter().map(Neumaier::value).collect();
        let amax = a_hat.iter().fold(0.0f64, |m, a| m.max(a.norm()));
        ParsevalError {
            value: neumaier_sum(per_class.iter().copied()),
            per_class,
            tail_bound: self.truncation.map(|t| amax * amax * t * t),
        }
    }
}

/// `Σ_{|k|∞ ≤ K} |B[k] - V[k]|²` over the spectrum window, per class.
pub fn mse_noiseless(
    coeffs: &InterpolantCoeffs,
    spectrum: &Spectrum,
    target: &TargetSpec,
) -> Result<ParsevalError> {
    if spectrum.dim() != coeffs.grid.dim {
        return Err(Error::DimensionMismatch {
            expected: coeffs.grid.dim,
            found: spectrum.dim(),
        });
    }
    let probe = Probe::new(spectrum, coeffs.grid.n, target)?;
    debug_assert_eq!(probe.n, coeffs.grid.n);
    Ok(probe.error(&coeffs.alpha_dft()))
}

/// Dense solve of the noiseless labels `R_N f*` followed by [`mse_noiseless`].
pub fn noiseless_dense(
    spectrum: &Spectrum,
    n: usize,
    target: &TargetSpec,
    dense_limit: usize,
) -> Result<ParsevalError> {
    let grid = Grid::new(n, spectrum.dim())?;
    let y = model::evaluate_on_grid(target, &grid)?;
    let coeffs = solve_dense(spectrum.kernel(), &grid, &y, dense_limit)?;
    mse_noiseless(&coeffs, spectrum, target)
}

/// `σ² N^d ‖G_ℓ‖² u_ℓᴴ𝐊⁻²u_ℓ` per class, from a dense inverse.
pub fn noisy_error_deterministic(
    spectrum: &Spectrum,
    n: usize,
    sigma2: f64,
    dense_limit: usize,
) -> Result<ErrorTerms> {
    let kernel = spectrum.kernel();
    let grid = Grid::new(n, kernel.dim())?;
    let kmat = dense_matrix(kernel, &grid, dense_limit)?;
    let total = grid.len();
    let table = spectrum.hop_table(n)?;
    let idx: Vec<Vec<usize>> = (0..total)
        .map(|f| index::unflatten(f, n, grid.dim))
        .collect();
    let norm = 1.0 / (total as f64).sqrt();
    let mut cos = DMatrix::zeros(total, total);
    let mut sin = DMatrix::zeros(total, total);
    for (p, pi) in idx.iter().enumerate() {
        for (l, li) in idx.iter().enumerate() {
            let phase: usize = pi.iter().zip(li).map(|(a, b)| a * b % n).sum::<usize>() % n;
            let a = 2.0 * PI * phase as f64 / n as f64;
            cos[(p, l)] = a.cos() * norm;
            sin[(p, l)] = -a.sin() * norm;
        }
    }
    let factor = Factor::new(&kmat);
    let x = factor.solve(&cos)?;
    let y = factor.solve(&sin)?;
    let per_class: Vec<f64> = (0..total)
        .map(|l| {
            let q = neumaier_sum(x.column(l).iter().chain(y.column(l).iter()).map(|v| v * v));
            sigma2 * table.l2sq[l] * total as f64 * q
        })
        .collect();
    Ok(ErrorTerms {
        total: neumaier_sum(per_class.iter().copied()),
        per_class,
    })
}

/// Centred label-noise distributions with variance `σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    Gaussian,
    Rademacher,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarlo {
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
}

/// Per-trial generator: the base seed selects the key, the trial the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draw one noise vector of length `len`.
pub fn draw_noise(rng: &mut ChaCha8Rng, len: usize, sigma2: f64, noise: Noise) -> Vec<f64> {
    let sigma = sigma2.sqrt();
    match noise {
        Noise::Gaussian => {
            let dist = Normal::new(0.0, 1.0).expect("unit normal");
            (0..len).map(|_| sigma * dist.sample(rng)).collect()
        }
        Noise::Rademacher => (0..len)
            .map(|_| if rng.random::<bool>() { sigma } else { -sigma })
            .collect(),
    }
}

/// Mean and standard error of `‖f̂_ξ - f*‖²` over `trials` noise draws.
pub fn mse_monte_carlo(
    spectrum: &Spectrum,
    n: usize,
    target: &TargetSpec,
    sigma2: f64,
    trials: usize,
    seed: u64,
    noise: Noise,
) -> Result<MonteCarlo> {
    if trials < 100 {
        return Err(Error::InvalidArgument(format!(
            "at least 100 trials are required, got {trials}"
        )));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be non-negative, got {sigma2}"
        )));
    }
    let kernel = spectrum.kernel();
    let grid = Grid::new(n, kernel.dim())?;
    let lambda = checked_eigenvalues(kernel, n)?;
    let probe = Probe::new(spectrum, n, target)?;
    let clean = model::evaluate_on_grid(target, &grid)?;
    let plan = FftPlanner::new().plan_fft_forward(n);

    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let xi = draw_noise(&mut rng, clean.len(), sigma2, noise);
            let mut buf: Vec<Complex64> = clean
                .iter()
                .zip(&xi)
                .map(|(c, e)| Complex64::new(c + e, 0.0))
                .collect();
            fft_nd(&mut buf, n, grid.dim, &plan);
            for (b, l) in buf.iter_mut().zip(&lambda) {
                *b /= *l;
            }
            probe.error(&buf).value
        })
        .collect();

    // shifted accumulation keeps identical draws exact
    let base = values[0];
    let shift = neumaier_sum(values.iter().map(|v| v - base)) / trials as f64;
    let mean = base + shift;
    let var = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (trials - 1) as f64;
    Ok(MonteCarlo {
        trials,
        mean,
        std_error: (var / trials as f64).sqrt(),
    })
}

/// The seeded battery of right-hand sides, uniform on `[-1, 1]`.
pub fn random_rhs(len: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
        })
        .collect()
}
