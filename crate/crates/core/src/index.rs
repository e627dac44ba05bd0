//! Flat row-major indexing of `[N]^d` class indices and of the symmetric
//! frequency window `{-K..K}^d`. The last axis varies fastest.

use alloc::vec;
use alloc::vec::Vec;

/// `n^d`, panicking on overflow.
pub fn pow(n: usize, d: usize) -> usize {
    (0..d).fold(1usize, |acc, _| {
        acc.checked_mul(n).expect("index space overflows usize")
    })
}

pub fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

pub fn unflatten(mut flat: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    out
}

/// The hop class `k mod N` of a frequency, per axis.
pub fn class_of(k: &[i64], n: usize) -> Vec<usize> {
    k.iter()
        .map(|&ki| ki.rem_euclid(n as i64) as usize)
        .collect()
}

pub fn class_flat(k: &[i64], n: usize) -> usize {
    k.iter()
        .fold(0, |acc, &ki| acc * n + ki.rem_euclid(n as i64) as usize)
}

/// Sign `(-1)^{Σ(k_i - ℓ_i)}` relating a frequency to its class representative.
/// It is identically 1 when `N` is even.
pub fn alias_phase(k: &[i64], n: usize) -> f64 {
    let s: i64 = k.iter().map(|&ki| ki - ki.rem_euclid(n as i64)).sum();
    if s.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^{Σ k_i}`.
pub fn parity_sign(k: &[i64]) -> f64 {
    if k.iter().sum::<i64>().rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The symmetric frequency window `{-K..K}^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub cutoff: usize,
    pub dim: usize,
}

impl Window {
    pub fn new(cutoff: usize, dim: usize) -> Self {
        Self { cutoff, dim }
    }

    pub fn width(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn len(&self) -> usize {
        pow(self.width(), self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.len() == self.dim
            && k.iter()
                .all(|&ki| ki.unsigned_abs() as usize <= self.cutoff)
    }

    pub fn flat(&self, k: &[i64]) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let c = self.cutoff as i64;
        let w = self.width();
        Some(k.iter().fold(0, |acc, &ki| acc * w + (ki + c) as usize))
    }

    pub fn freq(&self, mut flat: usize) -> Vec<i64> {
        let w = self.width();
        let c = self.cutoff as i64;
        let mut out = vec![0i64; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = (flat % w) as i64 - c;
            flat /= w;
        }
        out
    }

    /// Write the frequency of `flat` into `out` without allocating.
    pub fn freq_into(&self, mut flat: usize, out: &mut [i64]) {
        let w = self.width();
        let c = self.cutoff as i64;
        for slot in out.iter_mut().rev() {
            *slot = (flat % w) as i64 - c;
            flat /= w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_roundtrip() {
        for f in 0..pow(5, 3) {
            assert_eq!(flatten(&unflatten(f, 5, 3), 5), f);
        }
    }

    #[test]
    fn window_roundtrip() {
        let w = Window::new(3, 2);
        assert_eq!(w.len(), 49);
        for f in 0..w.len() {
            assert_eq!(w.flat(&w.freq(f)), Some(f));
        }
        assert_eq!(w.flat(&[4, 0]), None);
    }

    #[test]
    fn phase_is_trivial_for_even_n() {
        for k in -20..20 {
            assert_eq!(alias_phase(&[k], 8), 1.0);
        }
        assert_eq!(alias_phase(&[4], 3), -1.0);
        assert_eq!(alias_phase(&[7], 3), 1.0);
        assert_eq!(alias_phase(&[-1], 3), -1.0);
    }
}
