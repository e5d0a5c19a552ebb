//! Deterministic file output: CSV with shortest round-trip float formatting
//! and JSON with sorted keys, so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Shortest representation that round-trips through `f64::from_str`.
pub fn float(v: f64) -> String {
    format!("{v}")
}

/// Optional cell; `None` prints as an empty field.
pub fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// CSV accumulator.
pub struct Csv {
    buffer: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buffer = String::new();
        let _ = writeln!(buffer, "{}", header.join(","));
        Csv { buffer }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.buffer, "{}", cells.join(","));
    }

    pub fn into_string(self) -> String {
        self.buffer
    }
}

/// Writes `content` under `dir`, creating the directory if needed, and
/// returns the full path.
pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trips() {
        for &v in &[0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(0.1), "0.1");
        assert_eq!(opt_float(None), "");
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(&["1".into(), "2".into()]);
        assert_eq!(csv.into_string(), "a,b\n1,2\n");
    }
}
