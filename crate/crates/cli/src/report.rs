//! Named check records and their JSON/CSV rendering.

use std::io::Write;

use gl3ff::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::error::CliResult;

/// First 16 hex digits of the SHA-256 of the JSON encoding of `value`.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable inputs");
    Sha256::digest(&bytes).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    /// Digest of everything the check consumed (roots, probe points, kinds).
    pub inputs: String,
    /// The values behind the worst residual, typically computed then reference.
    pub values: Vec<Complex64>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Record {
    pub fn new(name: impl Into<String>, inputs: String, values: Vec<Complex64>, residual: f64, tolerance: f64) -> Self {
        let pass = residual.is_finite() && residual <= tolerance;
        Record { name: name.into(), inputs, values, residual, tolerance, pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: String,
    pub pass: bool,
    pub records: Vec<Record>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config_digest: String) -> Self {
        Report { command: command.to_string(), config: config_digest, pass: true, records: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.pass &= r.pass;
        self.records.push(r);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["name", "inputs", "residual", "tolerance", "pass"]).map_err(csv_err)?;
                for r in &self.records {
                    w.write_record([
                        r.name.as_str(),
                        r.inputs.as_str(),
                        &format!("{:e}", r.residual),
                        &format!("{:e}", r.tolerance),
                        if r.pass { "true" } else { "false" },
                    ])
                    .map_err(csv_err)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

pub fn csv_err(e: csv::Error) -> crate::error::CliError {
    crate::error::CliError::Io(std::io::Error::other(e))
}

/// Running maximum that remembers the values that produced it. A non-finite
/// residual always wins.
#[derive(Debug, Clone, Default)]
pub struct Worst {
    pub residual: f64,
    pub values: Vec<Complex64>,
    pub cases: usize,
}

impl Worst {
    pub fn add(&mut self, residual: f64, values: &[Complex64]) {
        self.cases += 1;
        let worse = !residual.is_finite() || residual > self.residual;
        if worse && self.residual.is_finite() {
            self.residual = if residual.is_finite() { residual } else { f64::INFINITY };
            self.values = values.to_vec();
        }
    }

    pub fn record(self, name: impl Into<String>, inputs: String, tolerance: f64) -> Record {
        Record::new(name, inputs, self.values, self.residual, tolerance)
    }
}

/// `|a - b| / max(|a|, |b|)`.
pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_input_sensitive() {
        assert_eq!(digest(&[1, 2, 3]), digest(&[1, 2, 3]));
        assert_ne!(digest(&[1, 2, 3]), digest(&[1, 2, 4]));
        assert_eq!(digest("x").len(), 16);
    }

    #[test]
    fn report_fails_with_any_record() {
        let mut r = Report::new("verify", digest("cfg"));
        r.push(Record::new("a", digest("a"), vec![], 1e-14, 1e-12));
        assert!(r.pass);
        r.push(Record::new("b", digest("b"), vec![], f64::NAN, 1e-12));
        assert!(!r.pass);
    }

    #[test]
    fn worst_keeps_infinite_residuals() {
        let mut w = Worst::default();
        w.add(1e-3, &[]);
        w.add(f64::NAN, &[Complex64::new(1.0, 0.0)]);
        w.add(1.0, &[]);
        assert!(w.residual.is_infinite());
        assert_eq!(w.values.len(), 1);
        assert_eq!(w.cases, 3);
    }

    #[test]
    fn csv_has_one_line_per_record() {
        let mut r = Report::new("identities", digest("cfg"));
        r.push(Record::new("x", digest("x"), vec![], 0.0, 1.0));
        let mut buf = Vec::new();
        r.write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("name,inputs,residual,tolerance,pass"));
    }
}
