//! Small numerical building blocks: Gauss–Legendre rules, compensated sums,
//! torus wrapping and physicists' Hermite polynomials.

use alloc::vec::Vec;
use core::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// Reduce an angle to `[-π, π)`.
#[inline]
pub fn wrap(theta: f64) -> f64 {
    let t = theta + PI;
    let r = t - TAU * libm::floor(t / TAU) - PI;
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`, appended to the output vectors.
    pub fn map_into(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(c + h * x);
            ws.push(h * w);
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut acc = Neumaier::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(c + h * x));
        }
        h * acc.value()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A composite quadrature rule, stored as flat node and weight lists.
#[derive(Debug, Clone, Default)]
pub struct Composite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Composite {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform panels of width at most `h` on `[a, b]`, `q` nodes each.
    pub fn push_uniform(&mut self, a: f64, b: f64, h: f64, rule: &GaussLegendre) {
        if b <= a {
            return;
        }
        let panels = libm::ceil((b - a) / h).max(1.0) as usize;
        let w = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + w * p as f64;
            let hi = if p + 1 == panels { b } else { lo + w };
            rule.map_into(lo, hi, &mut self.nodes, &mut self.weights);
        }
    }

    /// Panels on `[0, b]` refined geometrically towards 0 with ratio 1/2.
    pub fn push_graded(&mut self, b: f64, levels: usize, rule: &GaussLegendre) {
        let mut hi = b;
        let mut cuts = Vec::with_capacity(levels + 1);
        cuts.push(hi);
        for _ in 0..levels {
            hi *= 0.5;
            cuts.push(hi);
        }
        rule.map_into(0.0, hi, &mut self.nodes, &mut self.weights);
        for w in cuts.windows(2).rev() {
            rule.map_into(w[1], w[0], &mut self.nodes, &mut self.weights);
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = Neumaier::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.value()
    }
}

/// Physicists' Hermite polynomial `H_r(x)`.
pub fn hermite(r: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if r == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..r {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// 95th percentile by the nearest-rank rule; `values` need not be sorted.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let rank = libm::ceil(q * v.len() as f64) as usize;
    v[rank.clamp(1, v.len()) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in 1..=20 {
            let gl = GaussLegendre::new(n);
            for p in 0..2 * n {
                let got = gl.integrate(-1.0, 1.0, |x| libm::pow(x, p as f64));
                let want = if p % 2 == 1 {
                    0.0
                } else {
                    2.0 / (p as f64 + 1.0)
                };
                assert!((got - want).abs() < 1e-13, "n={n} p={p} got={got}");
            }
        }
    }

    #[test]
    fn graded_rule_integrates_sqrt() {
        let mut c = Composite::default();
        c.push_graded(1.0, 30, &GaussLegendre::new(10));
        let got = c.integrate(libm::sqrt);
        assert!((got - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn wrap_lands_in_half_open_interval() {
        assert_eq!(wrap(PI), -PI);
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap(-7.0) - (-7.0 + TAU)).abs() < 1e-15);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = neumaier_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn hermite_low_orders() {
        let x = 0.7;
        assert_eq!(hermite(0, x), 1.0);
        assert!((hermite(3, x) - (8.0 * x * x * x - 12.0 * x)).abs() < 1e-14);
        assert!((hermite(4, x) - (16.0 * x.powi(4) - 48.0 * x * x + 12.0)).abs() < 1e-13);
    }
}
