//! Profile files and CSV formatting.

use std::fmt::Write as _;
use std::path::Path;

use ridgeless_core::{Error, Result, TabulatedProfile};

/// Parse a profile file: one `t value` pair per line, separated by
/// whitespace or a comma. Blank lines and `#` comments are skipped.
pub fn parse_profile(text: &str) -> Result<TabulatedProfile> {
    let mut samples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let bad = || {
            Error::InvalidProfile(format!(
                "line {}: expected `t value`, got `{raw}`",
                lineno + 1
            ))
        };
        if fields.len() != 2 {
            return Err(bad());
        }
        let t: f64 = fields[0].parse().map_err(|_| bad())?;
        let v: f64 = fields[1].parse().map_err(|_| bad())?;
        samples.push((t, v));
    }
    TabulatedProfile::from_samples(&samples)
}

pub fn read_profile(path: &Path) -> Result<TabulatedProfile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidProfile(format!("cannot read {}: {e}", path.display())))?;
    parse_profile(&text)
}

/// A float with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Multi-index written as `a:b:c`.
pub fn multi_index<T: std::fmt::Display>(idx: &[T]) -> String {
    let mut out = String::new();
    for (i, v) in idx.iter().enumerate() {
        if i > 0 {
            out.push(':');
        }
        let _ = write!(out, "{v}");
    }
    out
}

/// Join already formatted fields into one CSV line (no trailing newline).
pub fn row<S: AsRef<str>>(fields: &[S]) -> String {
    let mut out = String::new();
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(f.as_ref());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_commas() {
        let p = parse_profile("# laplace-ish\n0 1\n1, 0.5\n\n2 0.25 # end\n").unwrap();
        assert_eq!(p.eval(1.0), 0.5);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            parse_profile("0 1\n1 x\n"),
            Err(Error::InvalidProfile(_))
        ));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(multi_index(&[1, 2]), "1:2");
    }
}
