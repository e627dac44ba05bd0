use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Asymmetry tolerated between `g(-t)` and `g(t)` in a tabulated profile.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// An even kernel profile `g` given by samples, interpolated by a cubic spline
/// with `g'(0) = 0` and a natural right end.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl TabulatedProfile {
    /// Build from `(t, g(t))` samples. Samples at negative `t` are allowed and
    /// must mirror a sample at `-t` within [`SYMMETRY_TOLERANCE`].
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self> {
        if samples
            .iter()
            .any(|(t, v)| !t.is_finite() || !v.is_finite())
        {
            return Err(Error::InvalidProfile("samples must be finite".into()));
        }
        let mut pos: Vec<(f64, f64)> = samples.iter().copied().filter(|(t, _)| *t >= 0.0).collect();
        pos.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(t, v) in samples.iter().filter(|(t, _)| *t < 0.0) {
            let mirror = pos
                .iter()
                .find(|(s, _)| libm::fabs(s + t) <= SYMMETRY_TOLERANCE);
            match mirror {
                Some(&(_, w)) if libm::fabs(w - v) <= SYMMETRY_TOLERANCE => {}
                Some(&(_, w)) => {
                    return Err(Error::InvalidProfile(format!(
                        "profile is not symmetric: g({t}) = {v} but g({}) = {w}",
                        -t
                    )))
                }
                None => {
                    return Err(Error::InvalidProfile(format!(
                        "profile is not symmetric: sample at t = {t} has no mirror at t = {}",
                        -t
                    )))
                }
            }
        }
        if pos.len() < 2 {
            return Err(Error::InvalidProfile(
                "at least two samples with t >= 0 are required".into(),
            ));
        }
        if pos[0].0 != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "first sample must be at t = 0, found t = {}",
                pos[0].0
            )));
        }
        for w in pos.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidProfile(format!(
                    "sample abscissae must be distinct, t = {} repeats",
                    w[1].0
                )));
            }
        }
        let knots: Vec<f64> = pos.iter().map(|p| p.0).collect();
        let values: Vec<f64> = pos.iter().map(|p| p.1).collect();
        let second = spline_second_derivatives(&knots, &values);
        Ok(Self {
            knots,
            values,
            second,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t_max(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// `g(t)` for `|t| <= t_max`; beyond the last knot the end value is held.
    pub fn eval(&self, t: f64) -> f64 {
        let t = libm::fabs(t);
        let n = self.knots.len();
        if t >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = match self.knots.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }
}

/// Second derivatives of the spline through `(x, y)` with clamped slope 0 at
/// the left end and a natural right end.
fn spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut diag = alloc::vec![0.0; n];
    let mut upper = alloc::vec![0.0; n];
    let mut lower = alloc::vec![0.0; n];
    let mut rhs = alloc::vec![0.0; n];

    let h0 = x[1] - x[0];
    diag[0] = 2.0 * h0;
    upper[0] = h0;
    rhs[0] = 6.0 * (y[1] - y[0]) / h0;
    for i in 1..n - 1 {
        let hl = x[i] - x[i - 1];
        let hr = x[i + 1] - x[i];
        lower[i] = hl;
        diag[i] = 2.0 * (hl + hr);
        upper[i] = hr;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl);
    }
    diag[n - 1] = 1.0;
    rhs[n - 1] = 0.0;

    // Thomas algorithm.
    for i in 1..n {
        let m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    let mut out = alloc::vec![0.0; n];
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_smooth_profile() {
        let samples: Vec<(f64, f64)> = (0..=400)
            .map(|i| {
                let t = core::f64::consts::PI * i as f64 / 400.0;
                (t, libm::exp(-t * t))
            })
            .collect();
        let p = TabulatedProfile::from_samples(&samples).unwrap();
        for j in 0..97 {
            let t = 3.1 * j as f64 / 97.0;
            assert!((p.eval(t) - libm::exp(-t * t)).abs() < 1e-7, "t={t}");
            assert_eq!(p.eval(-t), p.eval(t));
        }
    }

    #[test]
    fn mirrored_samples_are_accepted() {
        let p = TabulatedProfile::from_samples(&[(-1.0, 0.5), (0.0, 1.0), (1.0, 0.5)]).unwrap();
        assert_eq!(p.knots(), &[0.0, 1.0]);
    }

    #[test]
    fn asymmetric_samples_are_rejected() {
        let err =
            TabulatedProfile::from_samples(&[(-1.0, 0.4), (0.0, 1.0), (1.0, 0.5)]).unwrap_err();
        assert!(matches!(err, Error::InvalidProfile(ref m) if m.contains("not symmetric")));
    }

    #[test]
    fn profile_must_start_at_zero() {
        assert!(TabulatedProfile::from_samples(&[(0.5, 1.0), (1.0, 0.5)]).is_err());
    }
}
