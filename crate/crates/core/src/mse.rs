//! Exact decomposition of the expected L² error of the kernel interpolant into
//! approximation, noise-free estimation and noisy estimation terms.
//!
//! With `S_ℓ` the exact aliased kernel sum, `G̃ = εG` (see [`crate::model`]),
//! `w_ℓ = ⟨G̃_ℓ,V_ℓ⟩/‖G_ℓ‖²` and `s_V(ℓ) = Σ_m ε V[mN+ℓ]`:
//!
//! ```text
//! apx_ℓ   = ‖V_ℓ‖² - |⟨G̃_ℓ,V_ℓ⟩|² / ‖G_ℓ‖²
//! free_ℓ  = |s_V(ℓ)/S_ℓ - w_ℓ|² ‖G_ℓ‖²
//! noisy_ℓ = σ² ‖G_ℓ‖² / (N^d S_ℓ²)
//! ```

use alloc::string::String;
use alloc::vec::Vec;

use crate::index;
use crate::model::{project_with_table, ProjectionResult, TargetSpec};
use crate::numeric::neumaier_sum;
use crate::spectra::{Family, HopTable, Spectrum};
use crate::{Error, Result};

/// One error term, per hop class (flattened row-major over `[N]^d`) and total.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTerms {
    pub per_class: Vec<f64>,
    pub total: f64,
}

impl ErrorTerms {
    fn from_classes(per_class: Vec<f64>) -> Self {
        let total = neumaier_sum(per_class.iter().copied());
        Self { per_class, total }
    }
}

/// Closed-form expected MSE of the interpolant, with per-class detail.
#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    pub family: Family,
    pub dim: usize,
    pub n: usize,
    pub bandwidth: f64,
    pub sigma2: f64,
    pub target_id: String,
    pub apx: ErrorTerms,
    pub free: ErrorTerms,
    pub noisy: ErrorTerms,
    pub total: f64,
    /// `max|λ| / min|λ|`.
    pub condition: f64,
    pub truncation_bound: Option<f64>,
    /// Comparison tolerance `condition × truncation_bound × 10`.
    pub tolerance: Option<f64>,
    /// Interval holding the noiseless error `apx + free` once the target's
    /// declared coefficient tail is accounted for.
    pub target_tail_interval: Option<(f64, f64)>,
}

impl MseReport {
    pub fn classes(&self) -> usize {
        self.apx.per_class.len()
    }

    /// `apx + free + noisy` for one class.
    pub fn class_total(&self, c: usize) -> f64 {
        self.apx.per_class[c] + self.free.per_class[c] + self.noisy.per_class[c]
    }

    /// The class index `ℓ ∈ [N]^d` of a flat position.
    pub fn class_index(&self, c: usize) -> Vec<usize> {
        index::unflatten(c, self.n, self.dim)
    }
}

/// A spectrum paired with the hop table of one grid resolution, so that many
/// targets and noise levels can share the setup cost.
#[derive(Debug, Clone)]
pub struct Analysis<'a> {
    pub spectrum: &'a Spectrum,
    pub table: HopTable,
}

impl<'a> Analysis<'a> {
    pub fn new(spectrum: &'a Spectrum, n: usize) -> Result<Self> {
        Ok(Self {
            spectrum,
            table: spectrum.hop_table(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    pub fn project(&self, target: &TargetSpec) -> Result<ProjectionResult> {
        project_with_table(self.spectrum, &self.table, target)
    }

    pub fn approximation_error(&self, target: &TargetSpec) -> Result<ErrorTerms> {
        let p = self.project(target)?;
        Ok(ErrorTerms::from_classes(p.class_residuals().collect()))
    }

    pub fn noise_free_error(&self, target: &TargetSpec) -> Result<ErrorTerms> {
        self.table.check_nonsingular()?;
        let p = self.project(target)?;
        Ok(ErrorTerms::from_classes(self.free_terms(&p)))
    }

    fn free_terms(&self, p: &ProjectionResult) -> Vec<f64> {
        (0..self.table.len())
            .map(|c| {
                let s = self.table.alias_sum[c];
                let gap = p.target_alias_sum[c] / s - p.weights[c];
                gap.norm_sqr() * self.table.l2sq[c]
            })
            .collect()
    }

    pub fn noisy_error(&self, sigma2: f64) -> Result<ErrorTerms> {
        if !(sigma2 >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "noise variance must be non-negative, got {sigma2}"
            )));
        }
        self.table.check_nonsingular()?;
        let total = self.table.len() as f64;
        Ok(ErrorTerms::from_classes(
            (0..self.table.len())
                .map(|c| {
                    let s = self.table.alias_sum[c];
                    sigma2 * self.table.l2sq[c] / (total * s * s)
                })
                .collect(),
        ))
    }

    pub fn full_mse(&self, target: &TargetSpec, sigma2: f64) -> Result<MseReport> {
        let noisy = self.noisy_error(sigma2)?;
        let p = self.project(target)?;
        let apx = ErrorTerms::from_classes(p.class_residuals().collect());
        let free = ErrorTerms::from_classes(self.free_terms(&p));
        let condition = self.table.condition_number();
        let truncation_bound = self.spectrum.truncation_bound();
        let tolerance = truncation_bound.map(|t| condition * t * 10.0);
        let target_tail_interval = (target.tail_l1() > 0.0).then(|| {
            let kappa = 1.0
                + (0..self.table.len())
                    .map(|c| libm::sqrt(self.table.l2sq[c]) / libm::fabs(self.table.alias_sum[c]))
                    .fold(0.0, f64::max);
            let root = libm::sqrt(apx.total + free.total);
            let slack = target.tail_l1() * kappa;
            let lo = (root - slack).max(0.0);
            (lo * lo, (root + slack) * (root + slack))
        });
        let kernel = self.spectrum.kernel();
        Ok(MseReport {
            family: kernel.family(),
            dim: kernel.dim(),
            n: self.table.n,
            bandwidth: kernel.bandwidth(),
            sigma2,
            target_id: target.id.clone(),
            total: apx.total + free.total + noisy.total,
            apx,
            free,
            noisy,
            condition,
            truncation_bound,
            tolerance,
            target_tail_interval,
        })
    }
}

/// Approximation error `‖f* - P_X f*‖²`, per class.
pub fn approximation_error(
    spectrum: &Spectrum,
    n: usize,
    target: &TargetSpec,
) -> Result<ErrorTerms> {
    Analysis::new(spectrum, n)?.approximation_error(target)
}

/// Noise-free estimation error of interpolating exact labels, per class.
pub fn noise_free_error(spectrum: &Spectrum, n: usize, target: &TargetSpec) -> Result<ErrorTerms> {
    Analysis::new(spectrum, n)?.noise_free_error(target)
}

/// Expected error injected by centred label noise of variance `sigma2`.
pub fn noisy_error(spectrum: &Spectrum, n: usize, sigma2: f64) -> Result<ErrorTerms> {
    Analysis::new(spectrum, n)?.noisy_error(sigma2)
}

pub fn full_mse(
    spectrum: &Spectrum,
    n: usize,
    target: &TargetSpec,
    sigma2: f64,
) -> Result<MseReport> {
    Analysis::new(spectrum, n)?.full_mse(target, sigma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::KernelSpec;

    #[test]
    fn dirichlet_noisy_point() {
        let s = Spectrum::build(&KernelSpec::dirichlet(3, 1).unwrap(), 16).unwrap();
        let e = noisy_error(&s, 4, 1.0).unwrap();
        // Class 0 holds only k = 0; classes 1..3 hold two unit coefficients.
        assert_eq!(e.per_class, alloc::vec![0.25, 0.125, 0.125, 0.125]);
        assert_eq!(e.total, 0.625);
    }

    #[test]
    fn in_span_target_has_no_error() {
        let s = Spectrum::build(&KernelSpec::dirichlet(1, 1).unwrap(), 32).unwrap();
        let t = TargetSpec::zero("t", 1)
            .with_pair(&[1], core::f64::consts::FRAC_1_SQRT_2)
            .unwrap();
        // N = 3 keeps every class populated.
        let r = full_mse(&s, 3, &t, 0.0).unwrap();
        assert!(r.apx.total.abs() < 1e-15);
        assert!(r.free.total.abs() < 1e-15);
    }

    #[test]
    fn free_term_hand_computed() {
        // N = 2, Dirichlet M = 1, f* = cos 3x. By hand the interpolant is
        // exactly cos x, so the error is ‖cos 3x - cos x‖² = 1, split evenly.
        let s = Spectrum::build(&KernelSpec::dirichlet(1, 1).unwrap(), 8).unwrap();
        let t = TargetSpec::zero("cos3", 1).with_cos(&[3], 1.0).unwrap();
        let r = full_mse(&s, 2, &t, 0.0).unwrap();
        assert!((r.apx.total - 0.5).abs() < 1e-15);
        assert!((r.free.total - 0.5).abs() < 1e-15);
    }
}
