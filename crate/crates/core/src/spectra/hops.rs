use alloc::vec::Vec;

use super::Spectrum;
use crate::index;
use crate::numeric::Neumaier;
use crate::{Error, Result};

/// Statistics of the N-hop subsequence `G_ℓ = {G[mN + ℓ]}_m`.
///
/// `l1`, `l2sq` and `signed_sum` run over the stored window; `alias_sum` is the
/// exact `Σ_m G[mN + ℓ]` over all of ℤ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct HopStats {
    pub n: usize,
    pub class: Vec<usize>,
    pub l1: f64,
    pub l2sq: f64,
    pub signed_sum: f64,
    pub alias_sum: f64,
    /// `|G[ℓ]|` for the representative `ℓ ∈ [N]^d`.
    pub head: f64,
    pub members: usize,
    pub truncation: Option<f64>,
}

impl HopStats {
    /// `Δ_ℓ = ‖G_ℓ‖₁ - |G[ℓ]|` over the window.
    pub fn delta(&self) -> f64 {
        self.l1 - self.head
    }

    /// Interval containing the untruncated `‖G_ℓ‖₁`.
    pub fn l1_interval(&self) -> (f64, f64) {
        match self.truncation {
            Some(t) => (self.l1, self.l1 + t),
            None => (self.l1, f64::INFINITY),
        }
    }
}

/// Hop statistics for every class of an N-point grid, flattened row-major.
#[derive(Debug, Clone)]
pub struct HopTable {
    pub n: usize,
    pub dim: usize,
    pub l1: Vec<f64>,
    pub l2sq: Vec<f64>,
    pub signed_sum: Vec<f64>,
    pub alias_sum: Vec<f64>,
    pub head: Vec<f64>,
    pub members: Vec<usize>,
    pub truncation: Option<f64>,
}

impl HopTable {
    pub(crate) fn build(spectrum: &Spectrum, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "grid resolution must be positive".into(),
            ));
        }
        if spectrum.cutoff() < n {
            return Err(Error::WindowTooSmall {
                cutoff: spectrum.cutoff(),
                needed: n,
            });
        }
        let d = spectrum.dim();
        let classes = index::pow(n, d);
        let mut l1 = alloc::vec![Neumaier::new(); classes];
        let mut l2 = alloc::vec![Neumaier::new(); classes];
        let mut signed = alloc::vec![Neumaier::new(); classes];
        let mut members = alloc::vec![0usize; classes];
        let window = spectrum.window();
        let mut k = alloc::vec![0i64; d];
        for (flat, &g) in spectrum.coeffs().iter().enumerate() {
            window.freq_into(flat, &mut k);
            let c = index::class_flat(&k, n);
            l1[c].add(libm::fabs(g));
            l2[c].add(g * g);
            signed[c].add(g);
            members[c] += 1;
        }
        let head = (0..classes)
            .map(|c| {
                let rep: Vec<i64> = index::unflatten(c, n, d)
                    .iter()
                    .map(|&v| v as i64)
                    .collect();
                libm::fabs(
                    spectrum
                        .get(&rep)
                        .expect("cutoff >= N covers representatives"),
                )
            })
            .collect();
        Ok(Self {
            n,
            dim: d,
            l1: l1.iter().map(Neumaier::value).collect(),
            l2sq: l2.iter().map(Neumaier::value).collect(),
            signed_sum: signed.iter().map(Neumaier::value).collect(),
            alias_sum: spectrum.kernel().alias_sums(n),
            head,
            members,
            truncation: spectrum.truncation_bound(),
        })
    }

    pub fn len(&self) -> usize {
        self.l1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l1.is_empty()
    }

    pub fn get(&self, class: usize) -> HopStats {
        HopStats {
            n: self.n,
            class: index::unflatten(class, self.n, self.dim),
            l1: self.l1[class],
            l2sq: self.l2sq[class],
            signed_sum: self.signed_sum[class],
            alias_sum: self.alias_sum[class],
            head: self.head[class],
            members: self.members[class],
            truncation: self.truncation,
        }
    }

    /// Eigenvalues `λ_ℓ = N^d Σ_m G[mN + ℓ]` of the kernel matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let scale = index::pow(self.n, self.dim) as f64;
        self.alias_sum.iter().map(|s| s * scale).collect()
    }

    /// Largest `|S_ℓ|` over the classes.
    pub fn max_alias(&self) -> f64 {
        self.alias_sum
            .iter()
            .fold(0.0, |a, s| a.max(libm::fabs(*s)))
    }

    /// Whether class `c` makes the kernel matrix numerically singular:
    /// `|λ_ℓ| < 1e-12 · max |λ|`.
    pub fn is_degenerate(&self, c: usize) -> bool {
        libm::fabs(self.alias_sum[c]) < 1e-12 * self.max_alias()
    }

    /// The first degenerate class, if any, as an error.
    pub fn check_nonsingular(&self) -> Result<()> {
        match (0..self.len()).find(|&c| self.is_degenerate(c)) {
            Some(c) => Err(Error::DegenerateClass {
                class: index::unflatten(c, self.n, self.dim),
                alias_sum: self.alias_sum[c],
            }),
            None => Ok(()),
        }
    }

    /// `max |λ| / min |λ|`.
    pub fn condition_number(&self) -> f64 {
        let min = self
            .alias_sum
            .iter()
            .fold(f64::INFINITY, |a, s| a.min(libm::fabs(*s)));
        self.max_alias() / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::KernelSpec;

    #[test]
    fn dirichlet_hops() {
        let s = Spectrum::build(&KernelSpec::dirichlet(3, 1).unwrap(), 10).unwrap();
        let h = s.hop_stats(4, &[1]).unwrap();
        assert_eq!(
            (h.l1, h.l2sq, h.signed_sum, h.alias_sum),
            (2.0, 2.0, 2.0, 2.0)
        );
        let h = s.hop_stats(8, &[0]).unwrap();
        assert_eq!((h.l1, h.l2sq), (1.0, 1.0));
        let h = s.hop_stats(8, &[5]).unwrap();
        assert_eq!(h.head, 0.0);
        assert_eq!(h.l1, 1.0); // k = -3
    }

    #[test]
    fn single_class_holds_everything() {
        let s = Spectrum::build(&KernelSpec::laplace(1.0, 1).unwrap(), 16).unwrap();
        let h = s.hop_stats(1, &[0]).unwrap();
        assert!((h.l1 - s.window_abs_sum()).abs() < 1e-14);
    }

    #[test]
    fn window_must_cover_grid() {
        let s = Spectrum::build(&KernelSpec::laplace(1.0, 1).unwrap(), 4).unwrap();
        assert!(matches!(s.hop_table(8), Err(Error::WindowTooSmall { .. })));
    }
}
