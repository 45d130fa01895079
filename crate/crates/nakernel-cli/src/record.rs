//! Result persistence: flat CSV payload plus a JSON sidecar.
//!
//! CSV: one header line, RFC-4180 quoting (quotes only where needed),
//! '.' decimal separator, floats in Rust's shortest round-trip notation
//! (exponential where shorter), vector-valued cells joined with ';',
//! absent values as empty cells, `\n` record terminator.
//!
//! JSON sidecar: pretty-printed object with the fields of
//! [`ResultRecord`] in declaration order, terminated by a newline.  The
//! `config` field holds the resolved TOML text whose SHA-256 is
//! `config_sha256`; feeding that text back through `--config` reproduces
//! the CSV payload byte for byte.

use crate::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

/// One named pass/fail check; `value` and `threshold` give the compared
/// quantities (their exact meaning is check-specific, `pass` is
/// authoritative).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, value: f64, threshold: f64, pass: bool) -> Self {
        CheckReport {
            name: name.into(),
            value,
            threshold,
            pass,
        }
    }
}

/// The JSON sidecar: everything needed to reproduce and audit one run.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub command: String,
    /// Release-style version tag of the binary that produced the record.
    pub version: String,
    /// Effective master seed (after any `--seed` override).
    pub seed: u64,
    /// Worker threads used; results are identical for any value.
    pub workers: usize,
    /// SHA-256 (lowercase hex) of the `config` field.
    pub config_sha256: String,
    /// Resolved configuration as TOML text, seed override applied.
    pub config: String,
    pub wall_time_secs: f64,
    /// File name of the CSV payload next to this sidecar.
    pub payload_csv: String,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Shortest round-trip decimal form (Rust float `Display`).
pub fn fmt_float(x: f64) -> String {
    format!("{x}")
}

/// Vector cell: coordinates joined with ';' in one CSV field.
pub fn fmt_vector(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| fmt_float(*x))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CliError::Config(format!(
                "internal: payload row {i} has {} cells, header has {}",
                row.len(),
                header.len()
            )));
        }
    }
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, record: &ResultRecord) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(record)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_matches_known_vector() {
        // FIPS 180-2 test vector for "abc".
        assert_eq!(
            sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn floats_round_trip_through_display() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, 5e-324, -0.0, 1e-10] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn vector_cells_join_with_semicolons() {
        assert_eq!(fmt_vector(&[1.5, -2.0, 0.25]), "1.5;-2;0.25");
        assert_eq!(fmt_vector(&[]), "");
    }

    #[test]
    fn csv_quotes_only_where_needed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(
            &path,
            &["a".to_string(), "note".to_string()],
            &[vec!["1;2".to_string(), "x, y".to_string()]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,note\n1;2,\"x, y\"\n");
    }

    #[test]
    fn mismatched_row_width_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let err = write_csv(&path, &["a".to_string()], &[vec![]]).unwrap_err();
        assert!(err.to_string().contains("cells"), "{err}");
    }
}
