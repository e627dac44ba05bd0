use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use super::coefficients::gaussian_1d;
use super::TabulatedProfile;
use crate::index;
use crate::numeric::wrap;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    Laplace,
    Dirichlet,
    Tabulated,
}

impl Family {
    pub const NAMED: [Family; 3] = [Family::Gaussian, Family::Laplace, Family::Dirichlet];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Laplace => "laplace",
            Family::Dirichlet => "dirichlet",
            Family::Tabulated => "tabulated",
        }
    }

    /// Families whose d-dimensional coefficients factor over the axes.
    pub fn is_separable(self) -> bool {
        matches!(self, Family::Gaussian | Family::Dirichlet)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Ok(Family::Gaussian),
            "laplace" => Ok(Family::Laplace),
            "dirichlet" => Ok(Family::Dirichlet),
            "tabulated" => Ok(Family::Tabulated),
            other => Err(Error::InvalidKernel(format!(
                "unknown kernel family {other:?}"
            ))),
        }
    }
}

/// A shift-invariant kernel `K(x, x') = g(M·wrap(x - x'))` on the d-torus.
///
/// For the Dirichlet family the bandwidth is the integer order and the kernel
/// is `Π_i D_M(θ_i)` with `D_M(t) = sin((M + ½)t) / sin(t/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: Family,
    bandwidth: f64,
    dim: usize,
    profile: Option<Arc<TabulatedProfile>>,
    gaussian_g0: f64,
}

impl KernelSpec {
    pub fn new(family: Family, bandwidth: f64, dim: usize) -> Result<Self> {
        if family == Family::Tabulated {
            return Err(Error::InvalidKernel(
                "tabulated kernels need a profile, use KernelSpec::tabulated".into(),
            ));
        }
        Self::validate(family, bandwidth, dim)?;
        let gaussian_g0 = if family == Family::Gaussian {
            gaussian_1d(bandwidth, 0)
        } else {
            0.0
        };
        Ok(Self {
            family,
            bandwidth,
            dim,
            profile: None,
            gaussian_g0,
        })
    }

    pub fn gaussian(bandwidth: f64, dim: usize) -> Result<Self> {
        Self::new(Family::Gaussian, bandwidth, dim)
    }

    pub fn laplace(bandwidth: f64, dim: usize) -> Result<Self> {
        Self::new(Family::Laplace, bandwidth, dim)
    }

    pub fn dirichlet(order: usize, dim: usize) -> Result<Self> {
        Self::new(Family::Dirichlet, order as f64, dim)
    }

    /// A radial kernel `g(M‖θ‖)` with a tabulated profile. The profile must be
    /// sampled at least up to `M·π·√d`, the largest radius on the torus.
    pub fn tabulated(profile: TabulatedProfile, bandwidth: f64, dim: usize) -> Result<Self> {
        Self::validate(Family::Tabulated, bandwidth, dim)?;
        let reach = bandwidth * PI * libm::sqrt(dim as f64);
        if profile.t_max() < reach * (1.0 - 1e-12) {
            return Err(Error::InvalidProfile(format!(
                "profile is sampled up to t = {} but the torus reaches t = M·π·√d = {reach}",
                profile.t_max()
            )));
        }
        Ok(Self {
            family: Family::Tabulated,
            bandwidth,
            dim,
            profile: Some(Arc::new(profile)),
            gaussian_g0: 0.0,
        })
    }

    fn validate(family: Family, bandwidth: f64, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidKernel("dimension must be at least 1".into()));
        }
        if !bandwidth.is_finite() {
            return Err(Error::InvalidKernel(format!(
                "bandwidth {bandwidth} is not finite"
            )));
        }
        if family == Family::Dirichlet {
            if bandwidth < 0.0 || libm::fmod(bandwidth, 1.0) != 0.0 {
                return Err(Error::InvalidKernel(format!(
                    "Dirichlet order must be a non-negative integer, got {bandwidth}"
                )));
            }
        } else if bandwidth <= 0.0 {
            return Err(Error::InvalidKernel(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> Option<&TabulatedProfile> {
        self.profile.as_deref()
    }

    pub(crate) fn dirichlet_order(&self) -> usize {
        self.bandwidth as usize
    }

    /// The base kernel: the same family at bandwidth 1.
    pub fn base(&self) -> Result<Self> {
        self.with_bandwidth(1.0)
    }

    /// Same kernel at another bandwidth (Dirichlet: another order).
    pub fn with_bandwidth(&self, bandwidth: f64) -> Result<Self> {
        match self.family {
            Family::Tabulated => {
                let profile = self.profile.as_deref().unwrap().clone();
                Self::tabulated(profile, bandwidth, self.dim)
            }
            f => Self::new(f, bandwidth, self.dim),
        }
    }

    /// The profile `g(t)` at a radius `t`. Dirichlet kernels are not of the
    /// form `g(M t)`; for them this returns the one-dimensional `D_M(t)`.
    pub fn profile_value(&self, t: f64) -> f64 {
        match self.family {
            Family::Gaussian => libm::exp(-t * t),
            Family::Laplace => libm::exp(-libm::fabs(t)),
            Family::Dirichlet => dirichlet_1d(self.dirichlet_order(), t),
            Family::Tabulated => self.profile.as_deref().unwrap().eval(t),
        }
    }

    /// `K(θ) = g(M·wrap(θ))` for a difference vector `θ`.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.dim);
        let m = self.bandwidth;
        match self.family {
            Family::Gaussian => {
                let r2: f64 = theta.iter().map(|&t| wrap(t) * wrap(t)).sum();
                libm::exp(-m * m * r2)
            }
            Family::Laplace => {
                let r2: f64 = theta.iter().map(|&t| wrap(t) * wrap(t)).sum();
                libm::exp(-m * libm::sqrt(r2))
            }
            Family::Dirichlet => theta
                .iter()
                .map(|&t| dirichlet_1d(self.dirichlet_order(), wrap(t)))
                .product(),
            Family::Tabulated => {
                let r2: f64 = theta.iter().map(|&t| wrap(t) * wrap(t)).sum();
                self.profile.as_deref().unwrap().eval(m * libm::sqrt(r2))
            }
        }
    }

    /// `K(0) = g(0)`, the diagonal of every kernel matrix.
    pub fn at_origin(&self) -> f64 {
        self.eval(&alloc::vec![0.0; self.dim])
    }

    /// Closed-form coefficient `G[k]` in one dimension.
    ///
    /// Laplace: `M(1 - (-1)^k e^{-πM}) / (π(M² + k²))`. Dirichlet: `1{|k| ≤ M}`.
    /// Gaussian: `G[0]·e^{-k²/4M²}`, which neglects the periodisation boundary
    /// term and so is only an approximation for small `M`.
    pub fn closed_form_coeff(&self, k: i64) -> Result<f64> {
        let m = self.bandwidth;
        let kf = k as f64;
        match self.family {
            Family::Gaussian => Ok(self.gaussian_g0 * libm::exp(-kf * kf / (4.0 * m * m))),
            Family::Laplace => {
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                Ok(m * (1.0 - sign * libm::exp(-PI * m)) / (PI * (m * m + kf * kf)))
            }
            Family::Dirichlet => Ok(if k.unsigned_abs() as usize <= self.dirichlet_order() {
                1.0
            } else {
                0.0
            }),
            Family::Tabulated => Err(Error::NoClosedForm("tabulated")),
        }
    }

    /// Exact aliased sums `S_ℓ = Σ_m G[mN + ℓ]` for every class `ℓ ∈ [N]^d`,
    /// flattened row-major.
    ///
    /// By Poisson summation `N^d S_ℓ` is the DFT of the kernel sampled on the
    /// grid, so no spectral truncation is involved.
    pub fn alias_sums(&self, n: usize) -> Vec<f64> {
        let d = self.dim;
        let total = index::pow(n, d);
        if self.family == Family::Dirichlet {
            return dirichlet_alias_sums(self.dirichlet_order(), n, d);
        }
        let step = 2.0 * PI / n as f64;
        let mut data = alloc::vec![0.0; total];
        let mut theta = alloc::vec![0.0; d];
        for (flat, slot) in data.iter_mut().enumerate() {
            let q = index::unflatten(flat, n, d);
            for (t, &qi) in theta.iter_mut().zip(&q) {
                *t = step * qi as f64;
            }
            *slot = self.eval(&theta);
        }
        cosine_transform(&mut data, n, d);
        let scale = 1.0 / total as f64;
        for v in &mut data {
            *v *= scale;
        }
        data
    }
}

/// `D_M(t) = sin((M + ½)t) / sin(t/2)`, evaluated as `1 + 2Σ cos(mt)` near 0.
pub fn dirichlet_1d(order: usize, t: f64) -> f64 {
    let s = libm::sin(0.5 * t);
    if libm::fabs(s) < 1e-4 {
        let mut acc = 1.0;
        for m in 1..=order {
            acc += 2.0 * libm::cos(m as f64 * t);
        }
        acc
    } else {
        libm::sin((order as f64 + 0.5) * t) / s
    }
}

fn dirichlet_alias_sums(order: usize, n: usize, d: usize) -> Vec<f64> {
    let mut per_axis = alloc::vec![0.0; n];
    let m = order as i64;
    for k in -m..=m {
        per_axis[k.rem_euclid(n as i64) as usize] += 1.0;
    }
    (0..index::pow(n, d))
        .map(|flat| {
            index::unflatten(flat, n, d)
                .iter()
                .map(|&l| per_axis[l])
                .product()
        })
        .collect()
}

/// In-place separable transform `X[ℓ] = Σ_q x[q] Π_i cos(2π ℓ_i q_i / N)`.
/// This is the DFT of data that is even along every axis.
pub(crate) fn cosine_transform(data: &mut [f64], n: usize, d: usize) {
    let table: Vec<f64> = (0..n)
        .map(|j| libm::cos(2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut line = alloc::vec![0.0; n];
    let mut out = alloc::vec![0.0; n];
    for axis in 0..d {
        let stride = index::pow(n, d - 1 - axis);
        let outer = index::pow(n, axis);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * n * stride + inner;
                for (q, v) in line.iter_mut().enumerate() {
                    *v = data[base + q * stride];
                }
                for (l, slot) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    let mut idx = 0usize;
                    for v in line.iter() {
                        acc += v * table[idx];
                        idx += l;
                        if idx >= n {
                            idx -= n;
                        }
                    }
                    *slot = acc;
                }
                for (l, v) in out.iter().enumerate() {
                    data[base + l * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_limit_at_zero() {
        assert_eq!(dirichlet_1d(3, 0.0), 7.0);
        assert!((dirichlet_1d(3, 1e-9) - 7.0).abs() < 1e-12);
        let t = 0.8;
        let direct = libm::sin(3.5 * t) / libm::sin(0.5 * t);
        assert!((dirichlet_1d(3, t) - direct).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_order_must_be_integer() {
        assert!(KernelSpec::new(Family::Dirichlet, 2.5, 1).is_err());
        assert!(KernelSpec::new(Family::Dirichlet, 0.0, 1).is_ok());
        assert!(KernelSpec::new(Family::Laplace, 0.0, 1).is_err());
        assert!(KernelSpec::new(Family::Gaussian, 1.0, 0).is_err());
    }

    #[test]
    fn family_roundtrip() {
        for f in [
            Family::Gaussian,
            Family::Laplace,
            Family::Dirichlet,
            Family::Tabulated,
        ] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn dirichlet_alias_sums_count_members() {
        let k = KernelSpec::dirichlet(3, 1).unwrap();
        assert_eq!(k.alias_sums(4), alloc::vec![1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn laplace_closed_form_dc() {
        let k = KernelSpec::laplace(1.0, 1).unwrap();
        let want = (1.0 - libm::exp(-PI)) / PI;
        assert!((k.closed_form_coeff(0).unwrap() - want).abs() < 1e-15);
        // mpmath: 0.304554468779694
        assert!((want - 0.304_554_468_779_694).abs() < 1e-15);
    }
}
