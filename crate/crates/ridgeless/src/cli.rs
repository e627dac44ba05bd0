//! Command-line front end.
//!
//! Exit codes: 0 success, 1 an assumption is violated, 2 usage error,
//! 3 inconclusive, 4 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ridgeless_core::assumptions::{self, CertifyOptions, Verdict};
use ridgeless_core::model::{Grid, DENSE_LIMIT};
use ridgeless_core::mse::Analysis;
use ridgeless_core::{index, Error, Family, KernelSpec, Spectrum, TabulatedProfile};

use crate::io::{multi_index, num, read_profile, row};
use crate::oracle;
use crate::sweep::{self, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Largest scaled discrepancy `|a - b| / max(1, |b|)` accepted by `--verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-7;

pub const MSE_HEADER: &str = "family,d,N,M,sigma2,target,class,apx,free,noisy,total";

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateClass { .. }
            | Error::NoConvergence { .. }
            | Error::Residual { .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: format!("io error: {e}"),
        }
    }
}

type CliResult = Result<i32, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "ridgeless",
    version,
    about = "Exact MSE of kernel interpolation on uniform torus grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump Fourier coefficients, or hop statistics with --N.
    Spectrum(SpectrumArgs),
    /// Closed-form MSE decomposition, one row per hop class.
    Mse(MseArgs),
    /// Run a sweep described by a config file.
    Sweep(SweepArgs),
    /// Certify the scale, tail and head conditions.
    Assume(AssumeArgs),
    /// Cross-check the closed forms against dense, FFT and Monte Carlo oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Bandwidth (Dirichlet: integer order).
    #[arg(long = "M", default_value_t = 1.0)]
    pub m: f64,
    #[arg(long = "d", default_value_t = 1)]
    pub d: usize,
    /// Profile file for the tabulated family: `t value` per line.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl KernelArgs {
    fn profile(&self) -> Result<Option<TabulatedProfile>, CliError> {
        match &self.profile {
            Some(p) => Ok(Some(read_profile(p)?)),
            None if self.family == Family::Tabulated => Err(CliError {
                code: EXIT_USAGE,
                message: "tabulated family needs --profile".into(),
            }),
            None => Ok(None),
        }
    }

    fn kernel(&self) -> Result<KernelSpec, CliError> {
        let profile = self.profile()?;
        Ok(sweep::make_kernel(
            self.family,
            self.m,
            self.d,
            profile.as_ref(),
        )?)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Window half-width K.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Grid resolution: emit hop statistics instead of coefficients.
    #[arg(long = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MseArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub sigma2: f64,
    /// `zero` or a battery id.
    #[arg(long, default_value = "zero")]
    pub target: String,
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Append dense-oracle columns and a max-discrepancy line.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// Overrides `output` in the config.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssumeArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Evaluate the lower bounds on this grid.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Write the report as CSV rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Monte Carlo trials per target, 0 to skip.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = oracle::BATTERY_SEED)]
    pub seed: u64,
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, out, err),
        Command::Mse(a) => cmd_mse(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Assume(a) => cmd_assume(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

pub fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let kernel = a.kernel.kernel()?;
    let cutoff = a
        .cutoff
        .unwrap_or_else(|| Spectrum::default_cutoff(kernel.bandwidth(), a.n.unwrap_or(0)));
    let s = Spectrum::build(&kernel, cutoff)?;
    writeln!(err, "window_sum: {}", num(s.window_abs_sum()))?;
    match s.truncation_bound() {
        Some(t) => writeln!(
            err,
            "truncation_bound: {} (certified: {})",
            num(t),
            s.truncation_certified()
        )?,
        None => writeln!(err, "truncation_bound: unavailable")?,
    }
    match a.n {
        None => {
            writeln!(out, "k,G")?;
            for (k, g) in s.iter() {
                writeln!(out, "{}", row(&[multi_index(&k), num(g)]))?;
            }
        }
        Some(n) => {
            let t = s.hop_table(n)?;
            writeln!(
                out,
                "class,members,l1,l1_upper,l2sq,signed_sum,alias_sum,head"
            )?;
            for c in 0..t.len() {
                let h = t.get(c);
                let (_, hi) = h.l1_interval();
                writeln!(
                    out,
                    "{}",
                    row(&[
                        multi_index(&index::unflatten(c, n, kernel.dim())),
                        h.members.to_string(),
                        num(h.l1),
                        num(hi),
                        num(h.l2sq),
                        num(h.signed_sum),
                        num(h.alias_sum),
                        num(h.head),
                    ])
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_mse(a: &MseArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let kernel = a.kernel.kernel()?;
    let target = sweep::resolve_target(&a.target, kernel.dim())?;
    let spectrum = match a.cutoff {
        Some(c) => Spectrum::build(&kernel, c)?,
        None => sweep::analysis_spectrum(&kernel, a.n, std::slice::from_ref(&target))?,
    };
    let report = Analysis::new(&spectrum, a.n)?.full_mse(&target, a.sigma2)?;
    let oracle_cols = if a.verify {
        let noiseless = oracle::noiseless_dense(&spectrum, a.n, &target, DENSE_LIMIT)?;
        let noisy = oracle::noisy_error_deterministic(&spectrum, a.n, a.sigma2, DENSE_LIMIT)?;
        Some((noiseless, noisy))
    } else {
        None
    };

    let mut text = String::from(MSE_HEADER);
    if oracle_cols.is_some() {
        text.push_str(",oracle_noiseless,oracle_noisy");
    }
    text.push('\n');
    let prefix = [
        kernel.family().name().to_string(),
        kernel.dim().to_string(),
        a.n.to_string(),
        num(kernel.bandwidth()),
        num(a.sigma2),
        target.id.clone(),
    ];
    let mut worst = 0.0f64;
    let scaled = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
    for c in 0..report.classes() {
        let mut f: Vec<String> = prefix.to_vec();
        f.push(multi_index(&report.class_index(c)));
        f.extend([
            num(report.apx.per_class[c]),
            num(report.free.per_class[c]),
            num(report.noisy.per_class[c]),
            num(report.class_total(c)),
        ]);
        if let Some((nl, ny)) = &oracle_cols {
            f.extend([num(nl.per_class[c]), num(ny.per_class[c])]);
            worst = worst
                .max(scaled(
                    report.apx.per_class[c] + report.free.per_class[c],
                    nl.per_class[c],
                ))
                .max(scaled(report.noisy.per_class[c], ny.per_class[c]));
        }
        text.push_str(&row(&f));
        text.push('\n');
    }
    let mut f: Vec<String> = prefix.to_vec();
    f.push("total".into());
    f.extend([
        num(report.apx.total),
        num(report.free.total),
        num(report.noisy.total),
        num(report.total),
    ]);
    if let Some((nl, ny)) = &oracle_cols {
        f.extend([num(nl.value), num(ny.total)]);
        worst = worst
            .max(scaled(report.apx.total + report.free.total, nl.value))
            .max(scaled(report.noisy.total, ny.total));
    }
    text.push_str(&row(&f));
    text.push('\n');
    if oracle_cols.is_some() {
        text.push_str(&format!("# max_discrepancy={}\n", num(worst)));
    }
    match &a.output {
        Some(p) => std::fs::write(p, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    if oracle_cols.is_some() && !(worst <= VERIFY_TOLERANCE) {
        writeln!(
            err,
            "oracle discrepancy {worst:e} exceeds {VERIFY_TOLERANCE:e}"
        )?;
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn load_config(path: &Path) -> Result<SweepConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(SweepConfig::parse(&text)?)
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut cfg = load_config(&a.config)?;
    if let Some(o) = &a.output {
        cfg.output = Some(o.clone());
    }
    let profile = match &cfg.profile {
        Some(p) => Some(read_profile(p)?),
        None => None,
    };
    let rows = sweep::run_sweep(&cfg, profile.as_ref());
    let csv = sweep::render_csv(&rows);
    let summary = sweep::render_summary(&sweep::summarize(&rows));
    for r in &rows {
        if let Err(e) = &r.result {
            writeln!(
                err,
                "{} d={} N={} M={}: {e}",
                r.family, r.dim, r.n, r.bandwidth
            )?;
        }
    }
    match cfg.output_path() {
        Some(p) => {
            std::fs::write(&p, csv)?;
            out.write_all(summary.as_bytes())?;
        }
        None => {
            out.write_all(csv.as_bytes())?;
            err.write_all(summary.as_bytes())?;
        }
    }
    Ok(if rows.iter().any(|r| r.result.is_err()) {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    })
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Satisfied => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

pub fn cmd_assume(a: &AssumeArgs, out: &mut dyn Write) -> CliResult {
    let kernel = a.kernel.kernel()?;
    let r = assumptions::certify(&kernel, &CertifyOptions::default())?;
    let fit = r.head.fit();
    let fmt_opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "unavailable".into());
    writeln!(out, "kernel: {} d={} M={}", r.family, r.dim, r.bandwidth)?;
    writeln!(
        out,
        "scale: {} window_sum={} tail_bound={}",
        r.scale.verdict,
        num(r.scale.window_sum),
        fmt_opt(r.scale.tail_bound)
    )?;
    writeln!(
        out,
        "tail: {} C1={} k_max={}",
        r.tail.verdict,
        num(r.tail.c1),
        r.tail.k_max
    )?;
    for (k, c) in r.tail.c1_per_k.iter().enumerate() {
        writeln!(out, "  C1(|k|={})={}", k + 1, num(*c))?;
    }
    for rung in &r.tail.rungs {
        writeln!(
            out,
            "  M'={} C1={} p95={} checked={} exceptions={} fraction={}",
            rung.m_prime,
            num(rung.c1),
            num(rung.p95),
            rung.checked,
            rung.exceptions,
            num(rung.exception_fraction)
        )?;
    }
    writeln!(
        out,
        "head: {} (M'<M) / {} (M'<=M) C3={} C2={} i*={} m*={} G0[i*]={}",
        r.head.open.verdict,
        r.head.closed.verdict,
        num(fit.c3),
        num(fit.c2),
        multi_index(&fit.i_star),
        multi_index(&fit.m_star),
        num(r.head.base_coeff)
    )?;
    let bounds = match a.n {
        Some(n) => {
            let s = Spectrum::build(&kernel, Spectrum::default_cutoff(kernel.bandwidth(), n))?;
            let b = assumptions::lower_bounds(&r, &s, n, a.sigma2)?;
            writeln!(
                out,
                "bounds: N={n} sigma2={} noisy_bound={} apx_bound={} qualifying={}/{}",
                num(a.sigma2),
                num(b.noisy_bound),
                num(b.apx_bound),
                b.qualifying,
                b.classes
            )?;
            Some(b)
        }
        None => None,
    };
    writeln!(out, "verdict: {}", r.verdict())?;
    if let Some(p) = &a.csv {
        let mut text = String::from("family,d,M,assumption,verdict,constant\n");
        let prefix = [
            r.family.name().to_string(),
            r.dim.to_string(),
            num(r.bandwidth),
        ];
        let mut push = |name: &str, v: Verdict, c: String| {
            let mut f = prefix.to_vec();
            f.extend([name.to_string(), v.to_string(), c]);
            text.push_str(&row(&f));
            text.push('\n');
        };
        push("scale", r.scale.verdict, num(r.scale.window_sum));
        push("tail", r.tail.verdict, num(r.tail.c1));
        push("head", r.head.verdict(), num(fit.c3));
        if let Some(b) = &bounds {
            push("noisy_bound", r.tail.verdict, num(b.noisy_bound));
            push("apx_bound", r.head.verdict(), num(b.apx_bound));
        }
        std::fs::write(p, text)?;
    }
    Ok(verdict_code(r.verdict()))
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let kernel = a.kernel.kernel()?;
    let n = a.n;
    let grid = Grid::new(n, kernel.dim())?;
    let targets = ridgeless_core::TargetSpec::battery(kernel.dim());
    let spectrum = sweep::analysis_spectrum(&kernel, n, &targets)?;
    let analysis = Analysis::new(&spectrum, n)?;
    let scaled = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
    let mut failed = false;
    writeln!(out, "check,detail,discrepancy,tolerance,status")?;
    let mut line =
        |out: &mut dyn Write, check: &str, detail: &str, d: f64, tol: f64| -> std::io::Result<()> {
            let ok = d <= tol;
            failed |= !ok;
            writeln!(
                out,
                "{}",
                row(&[
                    check,
                    detail,
                    &num(d),
                    &num(tol),
                    if ok { "PASS" } else { "FAIL" }
                ])
            )
        };

    let mut dense = oracle::dense_eigenvalues(&kernel, &grid, DENSE_LIMIT)?;
    let mut closed = analysis.table.eigenvalues();
    dense.sort_by(f64::total_cmp);
    closed.sort_by(f64::total_cmp);
    let lmax = closed.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let eig = dense
        .iter()
        .zip(&closed)
        .map(|(x, y)| (x - y).abs() / y.abs().max(EIGEN_FLOOR * lmax))
        .fold(0.0, f64::max);
    line(out, "eigenvalues", "dense vs N^d S", eig, 1e-7)?;

    let ys = oracle::random_rhs(grid.len(), 8, a.seed);
    let mut solve = 0.0f64;
    for y in &ys {
        let d = oracle::solve_dense(&kernel, &grid, y, DENSE_LIMIT)?;
        let f = oracle::solve_fft(&kernel, n, y)?;
        let norm = d.alpha.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff = d
            .alpha
            .iter()
            .zip(&f.alpha)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt();
        solve = solve.max(diff / norm.max(f64::MIN_POSITIVE));
    }
    line(out, "solve", "dense vs fft", solve, 1e-10)?;

    let noisy = analysis.noisy_error(a.sigma2)?;
    let noisy_oracle = oracle::noisy_error_deterministic(&spectrum, n, a.sigma2, DENSE_LIMIT)?;
    line(
        out,
        "noisy",
        "closed vs K^-2",
        scaled(noisy.total, noisy_oracle.total),
        1e-7,
    )?;

    for t in &targets {
        let r = analysis.full_mse(t, a.sigma2)?;
        let o = oracle::noiseless_dense(&spectrum, n, t, DENSE_LIMIT)?;
        line(
            out,
            "noiseless",
            &t.id,
            scaled(r.apx.total + r.free.total, o.value),
            1e-7,
        )?;
        if a.trials > 0 {
            let mc = oracle::mse_monte_carlo(
                &spectrum,
                n,
                t,
                a.sigma2,
                a.trials,
                a.seed,
                oracle::Noise::Gaussian,
            )?;
            let z = if mc.std_error > 0.0 {
                (mc.mean - r.total).abs() / mc.std_error
            } else {
                scaled(mc.mean, r.total)
            };
            line(out, "monte_carlo", &t.id, z, 3.0)?;
        }
    }
    Ok(if failed { EXIT_NUMERICAL } else { EXIT_OK })
}

/// Eigenvalues below this fraction of the largest are compared absolutely.
pub const EIGEN_FLOOR: f64 = 1e-6;
