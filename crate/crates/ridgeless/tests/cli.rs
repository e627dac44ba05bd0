use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ridgeless::cli::{EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, MSE_HEADER};
use ridgeless::sweep::{HEADER, OUTPUT_DIR_ENV};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgeless"))
        .args(args)
        .current_dir(dir)
        .env_remove(OUTPUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn spectrum_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "spectrum",
            "--family",
            "dirichlet",
            "--M",
            "3",
            "--cutoff",
            "5",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k,G"));
    let ones = lines
        .filter(|l| l.ends_with(",1.0000000000000000e0"))
        .count();
    assert_eq!(ones, 7);
}

#[test]
fn mse_table_with_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "mse", "--family", "laplace", "--M", "1", "--N", "8", "--sigma2", "0.5", "--target",
            "cos135", "--verify",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stderr(&o));
    let out = stdout(&o);
    let header = out.lines().next().unwrap();
    assert!(header.starts_with(MSE_HEADER));
    assert!(out.lines().any(|l| l.contains(",total,")));
    assert!(out.contains("# max_discrepancy="));
}

#[test]
fn asymmetric_profile_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("lopsided.txt"), "-1 0.2\n0 1\n1 0.5\n").unwrap();
    let o = run(
        dir.path(),
        &[
            "spectrum",
            "--family",
            "tabulated",
            "--profile",
            "lopsided.txt",
            "--cutoff",
            "4",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(stderr(&o).contains("symmetric"), "{}", stderr(&o));
}

#[test]
fn short_tabulated_profile_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = (0..=40)
        .map(|i| {
            let t = i as f64 * 0.25;
            format!("{t} {}\n", (-t).exp())
        })
        .collect();
    fs::write(dir.path().join("exp.txt"), text).unwrap();
    let o = run(
        dir.path(),
        &[
            "assume",
            "--family",
            "tabulated",
            "--profile",
            "exp.txt",
            "--N",
            "8",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_INCONCLUSIVE), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: INCONCLUSIVE"));
}

#[test]
fn empty_grid_list_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("empty.cfg"),
        "family = laplace\nbandwidth = fixed:1\noutput = out.csv\n",
    )
    .unwrap();
    let o = run(dir.path(), &["sweep", "empty.cfg"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(stderr(&o).contains("N list is empty"), "{}", stderr(&o));
    assert!(!dir.path().join("out.csv").exists());
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "family = gaussian\nfamily = laplace\nbandwidth = sqrt\nN = 4\nN = 8\nsigma2 = 0.5\n\
               target = cos1\ntrials = 200\nseed = 5\n";
    fs::write(dir.path().join("s.cfg"), cfg).unwrap();
    let a = run(dir.path(), &["sweep", "s.cfg", "--output", "a.csv"]);
    let b = run(dir.path(), &["sweep", "s.cfg", "--output", "b.csv"]);
    assert_eq!(a.status.code(), Some(EXIT_OK), "{}", stderr(&a));
    assert_eq!(b.status.code(), Some(EXIT_OK));
    let x = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let y = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(x, y);
    assert_eq!(x.lines().next(), Some(HEADER));
    assert_eq!(x.lines().count(), 5);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["mse", "--family", "laplace", "--N", "8", "--bogus"],
    );
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
}
