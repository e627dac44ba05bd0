//! Numerical certification of the spectral scale, tail and head conditions on
//! a finite window, and the lower bounds they imply.
//!
//! * Scale: `Σ_k |G[k]| < ∞`.
//! * Tail: `|G[M'k + i]| ≤ C₁ |G[i]| / Π(1 + k_j²)` for `k ≥ 0, k ≠ 0`, every
//!   `M' ≥ M` and all but a vanishing fraction of `i ∈ [0, M']^d`.
//! * Head: some `i*` (and mask `m*` for d > 1) with
//!   `|G_M[i*]| ≤ C₃ |G_M[i* + M'm*]|` for all `M' < M` once `M ≥ C₂`, and
//!   `G₀[i*] > 0` for the base kernel.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::fmt;

use crate::index;
use crate::model::TargetSpec;
use crate::numeric::percentile;
use crate::spectra::{Family, KernelSpec, Spectrum};
use crate::{Error, Result};

/// Largest head constant accepted before the head condition counts as violated.
pub const HEAD_CONSTANT_LIMIT: f64 = 1e6;
/// Exception fraction allowed at the top of the tail ladder.
pub const TAIL_EXCEPTION_BUDGET: f64 = 0.05;
/// Per-`i` tail constants above this multiple of the 95th percentile are
/// counted as exceptions rather than fitted.
pub const TAIL_OUTLIER_FACTOR: f64 = 10.0;
/// Tail bound must stay below this fraction of the window sum.
pub const SCALE_TAIL_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "SATISFIED",
            Verdict::Violated => "VIOLATED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// The worst of two verdicts: violated beats inconclusive beats satisfied.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Satisfied,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleCheck {
    pub window_sum: f64,
    pub tail_bound: Option<f64>,
    pub verdict: Verdict,
}

pub fn check_scale(spectrum: &Spectrum) -> ScaleCheck {
    let window_sum = spectrum.window_abs_sum();
    let tail_bound = spectrum.truncation_bound();
    let verdict = match tail_bound {
        None => Verdict::Inconclusive,
        Some(t)
            if window_sum.is_finite() && t.is_finite() && t < SCALE_TAIL_FRACTION * window_sum =>
        {
            Verdict::Satisfied
        }
        Some(_) => Verdict::Inconclusive,
    };
    ScaleCheck {
        window_sum,
        tail_bound,
        verdict,
    }
}

/// Window used for the scale check: the Laplace tail decays like `M/K`, so
/// the window must reach about `128M` before the tail bound drops under
/// [`SCALE_TAIL_FRACTION`] of the sum.
pub fn scale_cutoff(bandwidth: f64) -> usize {
    128 * (libm::ceil(bandwidth) as usize).max(1)
}

/// Tail fit at one `M'`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailRung {
    pub m_prime: usize,
    /// Largest per-`i` constant among the non-exceptional `i`.
    pub c1: f64,
    /// 95th percentile of the per-`i` constants.
    pub p95: f64,
    /// `i` that were checked (excluding vacuous ones with both sides 0).
    pub checked: usize,
    /// `G[i] = 0` with a non-zero alias.
    pub hard_violations: usize,
    /// Hard violations plus constants above the outlier cut.
    pub exceptions: usize,
    pub exception_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailCheck {
    pub k_max: usize,
    pub rungs: Vec<TailRung>,
    /// Uniform constant: the largest rung constant.
    pub c1: f64,
    /// Constant needed at each `‖k‖∞ = 1..=k_max` separately.
    pub c1_per_k: Vec<f64>,
    pub verdict: Verdict,
}

/// Default `M'` ladder `{2M, 4M, 6M, 8M}`.
pub fn default_tail_ladder(bandwidth: f64) -> Vec<usize> {
    [2.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|f| (libm::ceil(f * bandwidth) as usize).max(1))
        .collect()
}

/// Window cutoff needed by [`check_tail`] for a given ladder.
pub fn tail_cutoff(ladder: &[usize], k_max: usize) -> usize {
    ladder.iter().copied().max().unwrap_or(1) * (k_max + 1)
}

pub fn check_tail(spectrum: &Spectrum, ladder: &[usize], k_max: usize) -> Result<TailCheck> {
    if k_max < 3 {
        return Err(Error::InvalidArgument(alloc::format!(
            "k_max must be at least 3, got {k_max}"
        )));
    }
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("tail ladder is empty".into()));
    }
    let needed = tail_cutoff(ladder, k_max);
    if spectrum.cutoff() < needed {
        return Err(Error::WindowTooSmall {
            cutoff: spectrum.cutoff(),
            needed,
        });
    }
    let d = spectrum.dim();
    let ks: Vec<Vec<usize>> = (1..index::pow(k_max + 1, d))
        .map(|f| index::unflatten(f, k_max + 1, d))
        .collect();
    let mut c1_per_k = vec![0.0f64; k_max];
    let mut rungs = Vec::with_capacity(ladder.len());
    let mut ladder_sorted = ladder.to_vec();
    ladder_sorted.sort_unstable();
    for &mp in &ladder_sorted {
        let mut constants = Vec::new();
        let mut per_k_rung = vec![0.0f64; k_max];
        let mut hard = 0usize;
        let mut alias = vec![0i64; d];
        for flat in 0..index::pow(mp + 1, d) {
            let i = index::unflatten(flat, mp + 1, d);
            let i64s: Vec<i64> = i.iter().map(|&v| v as i64).collect();
            let gi = libm::fabs(spectrum.get(&i64s).expect("window covers the scan"));
            let mut c = 1.0f64;
            let mut violated = false;
            let mut any_alias = false;
            for k in &ks {
                for ((a, &kj), &ij) in alias.iter_mut().zip(k).zip(&i) {
                    *a = (mp * kj + ij) as i64;
                }
                let ga = libm::fabs(spectrum.get(&alias).expect("window covers the scan"));
                if ga == 0.0 {
                    continue;
                }
                any_alias = true;
                if gi == 0.0 {
                    violated = true;
                    continue;
                }
                let weight: f64 = k.iter().map(|&kj| 1.0 + (kj * kj) as f64).product();
                let r = weight * ga / gi;
                c = c.max(r);
                let level = *k.iter().max().unwrap();
                per_k_rung[level - 1] = per_k_rung[level - 1].max(r);
            }
            if gi == 0.0 && !any_alias {
                continue;
            }
            if violated {
                hard += 1;
                constants.push(f64::INFINITY);
            } else {
                constants.push(c);
            }
        }
        let finite: Vec<f64> = constants
            .iter()
            .copied()
            .filter(|c| c.is_finite())
            .collect();
        let p95 = percentile(&finite, 0.95);
        let cut = TAIL_OUTLIER_FACTOR * p95;
        let outliers = finite.iter().filter(|&&c| c > cut).count();
        let c1 = finite
            .iter()
            .copied()
            .filter(|&c| c <= cut)
            .fold(0.0, f64::max);
        let checked = constants.len();
        let exceptions = hard + outliers;
        for (a, b) in c1_per_k.iter_mut().zip(&per_k_rung) {
            *a = a.max(*b);
        }
        rungs.push(TailRung {
            m_prime: mp,
            c1,
            p95,
            checked,
            hard_violations: hard,
            exceptions,
            exception_fraction: if checked == 0 {
                0.0
            } else {
                exceptions as f64 / checked as f64
            },
        });
    }
    let c1 = rungs.iter().map(|r| r.c1).fold(0.0, f64::max).max(1e-12);
    let top = rungs.last().unwrap().exception_fraction;
    let monotone = rungs
        .windows(2)
        .all(|w| w[1].exception_fraction <= w[0].exception_fraction);
    let verdict = if top <= TAIL_EXCEPTION_BUDGET && monotone {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    Ok(TailCheck {
        k_max,
        rungs,
        c1,
        c1_per_k,
        verdict,
    })
}

/// Fit of the head condition over one range of `M'`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadFit {
    pub i_star: Vec<usize>,
    pub m_star: Vec<usize>,
    pub c3: f64,
    pub c2: f64,
    /// `max_{M'} |G_M[i*]| / |G_M[i* + M'm*]|` at each ladder bandwidth.
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadCheck {
    pub ladder: Vec<f64>,
    /// `M' < M`.
    pub open: HeadFit,
    /// `M' ≤ M`.
    pub closed: HeadFit,
    /// `G₀[i*]` of the base kernel for the reported witness.
    pub base_coeff: f64,
}

impl HeadCheck {
    /// The fit used downstream: the closed range when it holds, otherwise the
    /// open range of the assumption as stated.
    pub fn fit(&self) -> &HeadFit {
        if self.closed.verdict == Verdict::Satisfied {
            &self.closed
        } else {
            &self.open
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.open.verdict
    }

    /// A head check that could not be run on the given ladder.
    pub fn inconclusive(ladder: Vec<f64>, dim: usize) -> Self {
        let fit = HeadFit {
            i_star: vec![0; dim],
            m_star: masks(dim).remove(0),
            c3: f64::INFINITY,
            c2: f64::INFINITY,
            ratios: vec![f64::NAN; ladder.len()],
            verdict: Verdict::Inconclusive,
        };
        Self {
            ladder,
            open: fit.clone(),
            closed: fit,
            base_coeff: f64::NAN,
        }
    }
}

pub fn default_head_ladder(dim: usize) -> Vec<f64> {
    if dim == 1 {
        vec![4.0, 8.0, 16.0, 32.0, 64.0]
    } else {
        vec![2.0, 4.0, 8.0, 16.0]
    }
}

/// Candidate witness masks `m* ∈ {0,1}^d \ {0}` restricted to unit-coordinate
/// directions plus the all-ones diagonal.
fn masks(d: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![1]];
    }
    let mut out: Vec<Vec<usize>> = (0..d)
        .map(|a| {
            let mut m = vec![0; d];
            m[a] = 1;
            m
        })
        .collect();
    out.push(vec![1; d]);
    out
}

const HEAD_SEARCH: usize = 9;

pub fn check_head(kernel: &KernelSpec, ladder: &[f64]) -> Result<HeadCheck> {
    if ladder.len() < 4 {
        return Err(Error::InvalidArgument(alloc::format!(
            "head ladder needs at least 4 bandwidths, got {}",
            ladder.len()
        )));
    }
    let mut ladder = ladder.to_vec();
    ladder.sort_by(f64::total_cmp);
    let d = kernel.dim();
    let base = Spectrum::build(&kernel.base()?, HEAD_SEARCH + 1)?;
    let spectra: Vec<Spectrum> = ladder
        .iter()
        .map(|&m| {
            let k = kernel.with_bandwidth(m)?;
            Spectrum::build(&k, libm::ceil(m) as usize + HEAD_SEARCH + 1)
        })
        .collect::<Result<_>>()?;

    let candidates: Vec<(Vec<usize>, Vec<usize>)> = (0..index::pow(HEAD_SEARCH, d))
        .flat_map(|f| {
            let p = index::unflatten(f, HEAD_SEARCH, d);
            masks(d).into_iter().map(move |m| (p.clone(), m))
        })
        .filter(|(p, _)| {
            let k: Vec<i64> = p.iter().map(|&v| v as i64).collect();
            base.get(&k).unwrap_or(0.0) > 0.0
        })
        .collect();

    let fit_range = |closed: bool| -> HeadFit {
        let mut best: Option<HeadFit> = None;
        for (p, m) in &candidates {
            let ratios: Vec<f64> = ladder
                .iter()
                .zip(&spectra)
                .map(|(&bw, s)| head_ratio(s, p, m, bw, closed))
                .collect();
            let upper = &ratios[ratios.len() / 2..];
            let c3 = upper.iter().copied().fold(0.0, f64::max);
            let c2 = (0..ladder.len())
                .find(|&j| ratios[j..].iter().all(|&r| r <= c3))
                .map(|j| ladder[j])
                .unwrap_or(f64::INFINITY);
            let above = ladder.iter().filter(|&&bw| bw >= c2).count();
            let verdict = if !(c3 <= HEAD_CONSTANT_LIMIT) {
                Verdict::Violated
            } else if above < 4 {
                Verdict::Inconclusive
            } else {
                Verdict::Satisfied
            };
            let fit = HeadFit {
                i_star: p.clone(),
                m_star: m.clone(),
                c3: c3.max(1e-12),
                c2,
                ratios,
                verdict,
            };
            let better = match &best {
                None => true,
                Some(b) => rank(&fit) < rank(b),
            };
            if better {
                best = Some(fit);
            }
        }
        best.unwrap_or(HeadFit {
            i_star: vec![0; d],
            m_star: masks(d).remove(0),
            c3: f64::INFINITY,
            c2: f64::INFINITY,
            ratios: vec![f64::INFINITY; ladder.len()],
            verdict: Verdict::Violated,
        })
    };
    let open = fit_range(false);
    let closed = fit_range(true);
    let witness: Vec<i64> = (if closed.verdict == Verdict::Satisfied {
        &closed
    } else {
        &open
    })
    .i_star
    .iter()
    .map(|&v| v as i64)
    .collect();
    let base_coeff = base.get(&witness).unwrap_or(0.0);
    Ok(HeadCheck {
        ladder,
        open,
        closed,
        base_coeff,
    })
}

fn rank(f: &HeadFit) -> (u8, f64) {
    let v = match f.verdict {
        Verdict::Satisfied => 0,
        Verdict::Inconclusive => 1,
        Verdict::Violated => 2,
    };
    (v, if f.c3.is_nan() { f64::INFINITY } else { f.c3 })
}

fn head_ratio(s: &Spectrum, p: &[usize], m: &[usize], bandwidth: f64, closed: bool) -> f64 {
    let kp: Vec<i64> = p.iter().map(|&v| v as i64).collect();
    let num = libm::fabs(s.get(&kp).unwrap_or(0.0));
    let mut worst = 0.0f64;
    for mp in 1usize.. {
        let mpf = mp as f64;
        if mpf > bandwidth || (!closed && mpf >= bandwidth) {
            break;
        }
        let k: Vec<i64> = p
            .iter()
            .zip(m)
            .map(|(&pi, &mi)| (pi + mp * mi) as i64)
            .collect();
        let den = libm::fabs(s.get(&k).unwrap_or(0.0));
        let r = if den == 0.0 {
            if num == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            num / den
        };
        worst = worst.max(r);
    }
    worst
}

/// Everything [`certify`] found for one kernel family and dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub family: Family,
    pub dim: usize,
    pub bandwidth: f64,
    pub scale: ScaleCheck,
    pub tail: TailCheck,
    pub head: HeadCheck,
}

impl AssumptionReport {
    pub fn verdict(&self) -> Verdict {
        self.scale
            .verdict
            .and(self.tail.verdict)
            .and(self.head.verdict())
    }

    pub fn c1(&self) -> f64 {
        self.tail.c1
    }

    pub fn c3(&self) -> f64 {
        self.head.fit().c3
    }

    /// The large-bandwidth witness `f*` with `V[±i*] = 1/√2`. When `i* = 0` only the
    /// DC coefficient is set.
    pub fn witness_target(&self) -> TargetSpec {
        let k: Vec<i64> = self.head.fit().i_star.iter().map(|&v| v as i64).collect();
        TargetSpec::zero("witness", self.dim)
            .with_pair(&k, FRAC_1_SQRT_2)
            .expect("witness has the report's dimension")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub tail_ladder: Option<Vec<usize>>,
    pub k_max: usize,
    pub head_ladder: Option<Vec<f64>>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            tail_ladder: None,
            k_max: 3,
            head_ladder: None,
        }
    }
}

/// Run the scale, tail and head checks for `kernel` at its bandwidth.
pub fn certify(kernel: &KernelSpec, options: &CertifyOptions) -> Result<AssumptionReport> {
    let ladder = options
        .tail_ladder
        .clone()
        .unwrap_or_else(|| default_tail_ladder(kernel.bandwidth().max(1.0)));
    let cutoff = tail_cutoff(&ladder, options.k_max).max(scale_cutoff(kernel.bandwidth()));
    let spectrum = Spectrum::build(kernel, cutoff)?;
    let scale = check_scale(&spectrum);
    let tail = check_tail(&spectrum, &ladder, options.k_max)?;
    let mut head_ladder = options
        .head_ladder
        .clone()
        .unwrap_or_else(|| default_head_ladder(kernel.dim()));
    if let Some(profile) = kernel.profile() {
        // a tabulated profile only reaches bandwidths it was sampled for
        let reach = profile.t_max() / (PI * libm::sqrt(kernel.dim() as f64));
        head_ladder.retain(|&m| m <= reach);
    }
    let head = if head_ladder.len() < 4 {
        HeadCheck::inconclusive(head_ladder, kernel.dim())
    } else {
        check_head(kernel, &head_ladder)?
    };
    Ok(AssumptionReport {
        family: kernel.family(),
        dim: kernel.dim(),
        bandwidth: kernel.bandwidth(),
        scale,
        tail,
        head,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBounds {
    /// `σ² · q / (2(1 + (4^d C₁)²))` with `q` the qualifying class fraction.
    pub noisy_bound: f64,
    /// `min(1/(2π(1+C₃)), 1/(2(1+C₃²)))` for the large-bandwidth witness target.
    pub apx_bound: f64,
    pub qualifying: usize,
    pub classes: usize,
    pub qualifying_fraction: f64,
}

/// Lower bounds on the noisy and approximation errors implied by the fitted
/// constants. A bound whose assumption is not satisfied is reported as 0.
pub fn lower_bounds(
    report: &AssumptionReport,
    spectrum: &Spectrum,
    n: usize,
    sigma2: f64,
) -> Result<LowerBounds> {
    let table = spectrum.hop_table(n)?;
    let d = spectrum.dim() as i32;
    let factor = libm::pow(4.0, d as f64) * report.c1();
    let tail_ok = report.tail.verdict == Verdict::Satisfied;
    let qualifying = match table.truncation {
        Some(t) if tail_ok => (0..table.len())
            .filter(|&c| {
                let head = table.head[c];
                head > 0.0 && table.l1[c] + t - head <= factor * head
            })
            .count(),
        _ => 0,
    };
    let classes = table.len();
    let qualifying_fraction = qualifying as f64 / classes as f64;
    let noisy_bound = sigma2 * qualifying_fraction / (2.0 * (1.0 + factor * factor));
    let apx_bound = if report.head.verdict() == Verdict::Satisfied {
        let c3 = report.c3();
        (1.0 / (2.0 * PI * (1.0 + c3))).min(1.0 / (2.0 * (1.0 + c3 * c3)))
    } else {
        0.0
    };
    Ok(LowerBounds {
        noisy_bound,
        apx_bound,
        qualifying,
        classes,
        qualifying_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_scale_is_exact() {
        let s = Spectrum::build(&KernelSpec::dirichlet(3, 1).unwrap(), 12).unwrap();
        let c = check_scale(&s);
        assert_eq!(c.window_sum, 7.0);
        assert_eq!(c.tail_bound, Some(0.0));
        assert_eq!(c.verdict, Verdict::Satisfied);
    }

    #[test]
    fn dirichlet_tail_constant_is_one() {
        let k = KernelSpec::dirichlet(4, 1).unwrap();
        let ladder = default_tail_ladder(4.0);
        let s = Spectrum::build(&k, tail_cutoff(&ladder, 3)).unwrap();
        let t = check_tail(&s, &ladder, 3).unwrap();
        assert_eq!(t.c1, 1.0);
        assert_eq!(t.verdict, Verdict::Satisfied);
    }

    #[test]
    fn verdict_ordering() {
        use Verdict::*;
        assert_eq!(Satisfied.and(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.and(Violated), Violated);
        assert_eq!(Satisfied.and(Satisfied), Satisfied);
    }
}
