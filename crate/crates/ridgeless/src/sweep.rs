//! Sweep configuration and the grid runner.
//!
//! Config grammar, one setting per line:
//!
//! ```text
//! # comment
//! family    = laplace          # gaussian | laplace | dirichlet | tabulated
//! bandwidth = fixed:1          # fixed:<c> | sqrt | linear | pow1.5 (M as a function of N)
//! N         = 8
//! N         = 16               # repeated keys form lists
//! d         = 1
//! sigma2    = 1
//! target    = zero             # zero or a battery id
//! trials    = 0                # Monte Carlo trials per point, 0 to skip
//! seed      = 1
//! profile   = kernel.txt       # required for tabulated
//! output    = sweep.csv
//! ```
//!
//! `RIDGELESS_OUTPUT_DIR`, when set, replaces the directory of `output`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use ridgeless_core::model::TargetSpec;
use ridgeless_core::mse::Analysis;
use ridgeless_core::{Error, Family, KernelSpec, Result, Spectrum, TabulatedProfile};

use crate::io::{num, row};
use crate::oracle::{mse_monte_carlo, MonteCarlo, Noise};

pub const OUTPUT_DIR_ENV: &str = "RIDGELESS_OUTPUT_DIR";

pub const HEADER: &str =
    "family,d,N,M_rule,M,sigma2,target,apx,free,noisy,total,mc_mean,mc_stderr,verdict";
pub const SUMMARY_HEADER: &str = "family,d,M_rule,sigma2,target,min_total,argmin_N,points";

/// Bandwidth as a function of the grid resolution `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    Fixed(f64),
    Sqrt,
    Linear,
    Pow15,
}

impl BandwidthRule {
    pub fn eval(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            BandwidthRule::Fixed(c) => c,
            BandwidthRule::Sqrt => n.sqrt(),
            BandwidthRule::Linear => n,
            BandwidthRule::Pow15 => n.powf(1.5),
        }
    }

    /// Bandwidth for a family: Dirichlet orders are rounded to integers.
    pub fn bandwidth(self, family: Family, n: usize) -> f64 {
        let m = self.eval(n);
        if family == Family::Dirichlet {
            m.round()
        } else {
            m
        }
    }
}

impl fmt::Display for BandwidthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthRule::Fixed(c) => write!(f, "fixed:{c}"),
            BandwidthRule::Sqrt => f.write_str("sqrt"),
            BandwidthRule::Linear => f.write_str("linear"),
            BandwidthRule::Pow15 => f.write_str("pow1.5"),
        }
    }
}

impl std::str::FromStr for BandwidthRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sqrt" => Ok(BandwidthRule::Sqrt),
            "linear" => Ok(BandwidthRule::Linear),
            "pow1.5" => Ok(BandwidthRule::Pow15),
            _ => {
                let c = s.strip_prefix("fixed:").unwrap_or(s);
                match c.parse::<f64>() {
                    Ok(v) if v > 0.0 && v.is_finite() => Ok(BandwidthRule::Fixed(v)),
                    _ => Err(Error::InvalidArgument(format!(
                        "unknown bandwidth rule {s:?}"
                    ))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub rules: Vec<BandwidthRule>,
    pub ns: Vec<usize>,
    pub dims: Vec<usize>,
    pub sigma2: Vec<f64>,
    pub targets: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub profile: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("line {line}: bad value {v:?} for {key}")))
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig {
            families: vec![],
            rules: vec![],
            ns: vec![],
            dims: vec![],
            sigma2: vec![],
            targets: vec![],
            trials: 0,
            seed: 0,
            profile: None,
            output: None,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("line {line}: expected `key = value`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "family" => cfg.families.push(value.parse()?),
                "bandwidth" | "M" => cfg.rules.push(value.parse()?),
                "N" => cfg.ns.push(parse_value(key, value, line)?),
                "d" => cfg.dims.push(parse_value(key, value, line)?),
                "sigma2" => cfg.sigma2.push(parse_value(key, value, line)?),
                "target" => cfg.targets.push(value.to_string()),
                "trials" => cfg.trials = parse_value(key, value, line)?,
                "seed" => cfg.seed = parse_value(key, value, line)?,
                "profile" => cfg.profile = Some(PathBuf::from(value)),
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "line {line}: unknown key {other:?}"
                    )));
                }
            }
        }
        if cfg.dims.is_empty() {
            cfg.dims.push(1);
        }
        if cfg.sigma2.is_empty() {
            cfg.sigma2.push(1.0);
        }
        if cfg.targets.is_empty() {
            cfg.targets.push("zero".into());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.families.is_empty() {
            return usage("no kernel family given");
        }
        if self.rules.is_empty() {
            return usage("no bandwidth rule given");
        }
        if self.ns.is_empty() {
            return usage("the N list is empty");
        }
        if let Some(n) = self.ns.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!(
                "N must be at least 2, got {n}"
            )));
        }
        if self.dims.contains(&0) {
            return usage("d must be at least 1");
        }
        if let Some(s) = self.sigma2.iter().find(|&&s| !(s >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "sigma2 must be non-negative, got {s}"
            )));
        }
        if self.trials > 0 && self.trials < 100 {
            return usage("Monte Carlo needs at least 100 trials");
        }
        if self.families.contains(&Family::Tabulated) && self.profile.is_none() {
            return usage("tabulated family needs a profile");
        }
        for t in &self.targets {
            resolve_target(t, 1)?;
        }
        Ok(())
    }

    /// Output path after the `RIDGELESS_OUTPUT_DIR` override.
    pub fn output_path(&self) -> Option<PathBuf> {
        let out = self.output.clone()?;
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) => Some(PathBuf::from(dir).join(out.file_name()?)),
            None => Some(out),
        }
    }
}

/// `zero` or a battery id, in dimension `d`.
pub fn resolve_target(id: &str, d: usize) -> Result<TargetSpec> {
    if id == "zero" {
        return Ok(TargetSpec::zero("zero", d));
    }
    TargetSpec::battery(d)
        .into_iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown target {id:?}")))
}

/// Kernel for a family at bandwidth `m`.
pub fn make_kernel(
    family: Family,
    m: f64,
    d: usize,
    profile: Option<&TabulatedProfile>,
) -> Result<KernelSpec> {
    match family {
        Family::Tabulated => {
            let p = profile
                .ok_or_else(|| Error::InvalidArgument("tabulated family needs a profile".into()))?;
            KernelSpec::tabulated(p.clone(), m, d)
        }
        f => KernelSpec::new(f, m, d),
    }
}

/// Spectrum window large enough for the default cutoff and the target.
pub fn analysis_spectrum(
    kernel: &KernelSpec,
    n: usize,
    targets: &[TargetSpec],
) -> Result<Spectrum> {
    let need = targets
        .iter()
        .map(TargetSpec::max_frequency)
        .max()
        .unwrap_or(0);
    Spectrum::build(
        kernel,
        Spectrum::default_cutoff(kernel.bandwidth(), n).max(need),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub apx: f64,
    pub free: f64,
    pub noisy: f64,
    pub total: f64,
    pub monte_carlo: Option<MonteCarlo>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub dim: usize,
    pub n: usize,
    pub rule: BandwidthRule,
    pub bandwidth: f64,
    pub sigma2: f64,
    pub target: String,
    pub result: std::result::Result<PointResult, String>,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        let mut f = vec![
            self.family.name().to_string(),
            self.dim.to_string(),
            self.n.to_string(),
            self.rule.to_string(),
            num(self.bandwidth),
            num(self.sigma2),
            self.target.clone(),
        ];
        match &self.result {
            Ok(r) => {
                f.extend([num(r.apx), num(r.free), num(r.noisy), num(r.total)]);
                match &r.monte_carlo {
                    Some(mc) => f.extend([num(mc.mean), num(mc.std_error)]),
                    None => f.extend([String::new(), String::new()]),
                }
                f.push("OK".into());
            }
            Err(_) => {
                f.extend(std::iter::repeat_n(String::new(), 6));
                f.push("ERROR".into());
            }
        }
        row(&f)
    }
}

struct Group {
    family: Family,
    rule: BandwidthRule,
    dim: usize,
    n: usize,
}

fn run_group(cfg: &SweepConfig, g: &Group, profile: Option<&TabulatedProfile>) -> Vec<SweepRow> {
    let m = g.rule.bandwidth(g.family, g.n);
    let targets: Vec<Result<TargetSpec>> = cfg
        .targets
        .iter()
        .map(|t| resolve_target(t, g.dim))
        .collect();
    let ok_targets: Vec<TargetSpec> = targets
        .iter()
        .filter_map(|t| t.as_ref().ok().cloned())
        .collect();
    let setup = make_kernel(g.family, m, g.dim, profile)
        .and_then(|k| analysis_spectrum(&k, g.n, &ok_targets));
    let mut rows = Vec::new();
    for &sigma2 in &cfg.sigma2 {
        for (id, target) in cfg.targets.iter().zip(&targets) {
            let result = match (&setup, target) {
                (Ok(spectrum), Ok(target)) => evaluate(cfg, spectrum, g.n, target, sigma2),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            rows.push(SweepRow {
                family: g.family,
                dim: g.dim,
                n: g.n,
                rule: g.rule,
                bandwidth: m,
                sigma2,
                target: id.clone(),
                result: result.map_err(|e| e.to_string()),
            });
        }
    }
    rows
}

fn evaluate(
    cfg: &SweepConfig,
    spectrum: &Spectrum,
    n: usize,
    target: &TargetSpec,
    sigma2: f64,
) -> Result<PointResult> {
    let report = Analysis::new(spectrum, n)?.full_mse(target, sigma2)?;
    let monte_carlo = if cfg.trials > 0 {
        Some(mse_monte_carlo(
            spectrum,
            n,
            target,
            sigma2,
            cfg.trials,
            cfg.seed,
            Noise::Gaussian,
        )?)
    } else {
        None
    };
    Ok(PointResult {
        apx: report.apx.total,
        free: report.free.total,
        noisy: report.noisy.total,
        total: report.total,
        monte_carlo,
    })
}

/// Evaluate every grid point. Rows come back in config order:
/// family, bandwidth rule, d, N, σ², target.
pub fn run_sweep(cfg: &SweepConfig, profile: Option<&TabulatedProfile>) -> Vec<SweepRow> {
    let mut groups = Vec::new();
    for &family in &cfg.families {
        for &rule in &cfg.rules {
            for &dim in &cfg.dims {
                for &n in &cfg.ns {
                    groups.push(Group {
                        family,
                        rule,
                        dim,
                        n,
                    });
                }
            }
        }
    }
    groups
        .par_iter()
        .map(|g| run_group(cfg, g, profile))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// Minimum total over `N` for each (family, d, rule, σ², target).
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauRow {
    pub family: Family,
    pub dim: usize,
    pub rule: BandwidthRule,
    pub sigma2: f64,
    pub target: String,
    pub min_total: f64,
    pub argmin_n: usize,
    pub points: usize,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<PlateauRow> {
    let mut order: Vec<(String, PlateauRow)> = Vec::new();
    let mut slot: BTreeMap<String, usize> = BTreeMap::new();
    for r in rows {
        let Ok(res) = &r.result else { continue };
        let key = format!(
            "{}|{}|{}|{}|{}",
            r.family,
            r.dim,
            r.rule,
            num(r.sigma2),
            r.target
        );
        let idx = *slot.entry(key.clone()).or_insert_with(|| {
            order.push((
                key,
                PlateauRow {
                    family: r.family,
                    dim: r.dim,
                    rule: r.rule,
                    sigma2: r.sigma2,
                    target: r.target.clone(),
                    min_total: f64::INFINITY,
                    argmin_n: r.n,
                    points: 0,
                },
            ));
            order.len() - 1
        });
        let p = &mut order[idx].1;
        p.points += 1;
        if res.total < p.min_total {
            p.min_total = res.total;
            p.argmin_n = r.n;
        }
    }
    order.into_iter().map(|(_, p)| p).collect()
}

pub fn render_summary(rows: &[PlateauRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for p in rows {
        out.push_str(&row(&[
            p.family.name().to_string(),
            p.dim.to_string(),
            p.rule.to_string(),
            num(p.sigma2),
            p.target.clone(),
            num(p.min_total),
            p.argmin_n.to_string(),
            p.points.to_string(),
        ]));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_repeated_keys() {
        let c = SweepConfig::parse(
            "family = laplace\nbandwidth = fixed:1\nbandwidth = sqrt\nN = 8\nN = 16 # two\n",
        )
        .unwrap();
        assert_eq!(
            c.rules,
            vec![BandwidthRule::Fixed(1.0), BandwidthRule::Sqrt]
        );
        assert_eq!(c.ns, vec![8, 16]);
        assert_eq!(c.dims, vec![1]);
    }

    #[test]
    fn empty_n_list_is_rejected() {
        let e = SweepConfig::parse("family = laplace\nbandwidth = 1\n").unwrap_err();
        assert!(e.to_string().contains("N list is empty"));
    }

    #[test]
    fn dirichlet_rules_round() {
        assert_eq!(BandwidthRule::Sqrt.bandwidth(Family::Dirichlet, 8), 3.0);
        assert_eq!(BandwidthRule::Pow15.eval(4), 8.0);
    }
}
