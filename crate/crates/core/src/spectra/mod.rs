//! Kernel families, Fourier coefficient tables and N-hop statistics.

mod coefficients;
mod hops;
mod kernel;
mod profile;

use alloc::vec::Vec;

pub use coefficients::quadrature_coeff;
pub use hops::{HopStats, HopTable};
pub use kernel::{dirichlet_1d, Family, KernelSpec};
pub use profile::{TabulatedProfile, SYMMETRY_TOLERANCE};

use crate::index::{self, Window};
use crate::{Error, Result};

/// Truncated coefficient table `G[k]` for `k ∈ {-K..K}^d`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    kernel: KernelSpec,
    window: Window,
    coeffs: Vec<f64>,
    truncation_bound: Option<f64>,
    truncation_certified: bool,
}

impl Spectrum {
    /// `max(8⌈M⌉, 4N)`.
    pub fn default_cutoff(bandwidth: f64, n: usize) -> usize {
        (8 * libm::ceil(bandwidth) as usize).max(4 * n)
    }

    pub fn build(kernel: &KernelSpec, cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::WindowTooSmall { cutoff, needed: 1 });
        }
        let d = kernel.dim();
        let table = coefficients::orthant_table(kernel, cutoff)?;
        let window = Window::new(cutoff, d);
        let mut coeffs = Vec::with_capacity(window.len());
        let mut k = alloc::vec![0i64; d];
        let mut orth = alloc::vec![0usize; d];
        for flat in 0..window.len() {
            window.freq_into(flat, &mut k);
            for (o, &ki) in orth.iter_mut().zip(&k) {
                *o = ki.unsigned_abs() as usize;
            }
            coeffs.push(table.values[index::flatten(&orth, cutoff + 1)]);
        }
        Ok(Self {
            kernel: kernel.clone(),
            window,
            coeffs,
            truncation_bound: table.truncation,
            truncation_certified: table.certified,
        })
    }

    /// Spectrum with the default cutoff for a grid of resolution `n`.
    pub fn for_grid(kernel: &KernelSpec, n: usize) -> Result<Self> {
        Self::build(kernel, Self::default_cutoff(kernel.bandwidth(), n))
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.window.dim
    }

    pub fn cutoff(&self) -> usize {
        self.window.cutoff
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Flat row-major coefficient storage over the window.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Upper bound on `Σ_{|k|∞ > K} |G[k]|`, when one is available.
    pub fn truncation_bound(&self) -> Option<f64> {
        self.truncation_bound
    }

    /// Whether [`Self::truncation_bound`] is a proven bound rather than an
    /// asymptotic estimate (d-dimensional Laplace).
    pub fn truncation_certified(&self) -> bool {
        self.truncation_certified
    }

    pub fn get(&self, k: &[i64]) -> Option<f64> {
        self.window.flat(k).map(|f| self.coeffs[f])
    }

    pub fn coeff(&self, k: &[i64]) -> Result<f64> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: k.len(),
            });
        }
        self.get(k).ok_or_else(|| Error::OutsideWindow {
            freq: k.to_vec(),
            cutoff: self.cutoff(),
        })
    }

    /// `Σ_{|k|∞ ≤ K} |G[k]|`.
    pub fn window_abs_sum(&self) -> f64 {
        crate::numeric::neumaier_sum(self.coeffs.iter().map(|v| libm::fabs(*v)))
    }

    /// Iterate `(k, G[k])` over the window.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(f, &g)| (self.window.freq(f), g))
    }

    /// Statistics of one hop class `ℓ ∈ [N]^d`.
    pub fn hop_stats(&self, n: usize, class: &[usize]) -> Result<HopStats> {
        if class.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: class.len(),
            });
        }
        if let Some(&bad) = class.iter().find(|&&c| c >= n) {
            return Err(Error::InvalidArgument(alloc::format!(
                "class index {bad} is not in [0, {n})"
            )));
        }
        Ok(self.hop_table(n)?.get(index::flatten(class, n)))
    }

    /// Statistics of every hop class `ℓ ∈ [N]^d`.
    pub fn hop_table(&self, n: usize) -> Result<HopTable> {
        HopTable::build(self, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_window_has_seven_ones() {
        let s = Spectrum::build(&KernelSpec::dirichlet(3, 1).unwrap(), 10).unwrap();
        let ones = s.coeffs().iter().filter(|&&v| v == 1.0).count();
        let zeros = s.coeffs().iter().filter(|&&v| v == 0.0).count();
        assert_eq!((ones, zeros), (7, 14));
        assert_eq!(s.truncation_bound(), Some(0.0));
    }

    #[test]
    fn gaussian_2d_is_product_of_axes() {
        let k1 = KernelSpec::gaussian(1.0, 1).unwrap();
        let k2 = KernelSpec::gaussian(1.0, 2).unwrap();
        let s1 = Spectrum::build(&k1, 4).unwrap();
        let s2 = Spectrum::build(&k2, 4).unwrap();
        let g1 = s1.coeff(&[1]).unwrap();
        assert_eq!(s2.coeff(&[1, 1]).unwrap(), g1 * g1);
        assert_eq!(s2.coeff(&[-1, 2]).unwrap(), g1 * s1.coeff(&[2]).unwrap());
    }

    #[test]
    fn outside_window_is_an_error() {
        let s = Spectrum::build(&KernelSpec::laplace(1.0, 1).unwrap(), 4).unwrap();
        assert!(matches!(s.coeff(&[5]), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn laplace_rejects_high_dimension() {
        let k = KernelSpec::laplace(1.0, 4).unwrap();
        assert!(matches!(Spectrum::build(&k, 4), Err(Error::Unsupported(_))));
    }
}
