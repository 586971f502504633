//! Report rows, summaries and file output.
//!
//! Every float in CSV output is printed as `{:.16e}` (17 significant digits) so
//! that identical runs produce identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

/// One asserted comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub index: usize,
    pub check: String,
    pub params: Vec<(String, f64)>,
    pub value: f64,
    pub reference: f64,
    /// Positive when the comparison is off; the row passes iff `violation <= tol`.
    pub violation: f64,
    pub tol: f64,
    pub pass: bool,
    pub note: String,
}

impl Row {
    fn new(
        check: &str,
        params: Vec<(String, f64)>,
        value: f64,
        reference: f64,
        violation: f64,
        tol: f64,
    ) -> Self {
        // NaN never passes.
        let pass = violation <= tol;
        Row {
            index: 0,
            check: check.to_string(),
            params,
            value,
            reference,
            violation,
            tol,
            pass,
            note: String::new(),
        }
    }

    /// `value <= bound + tol`.
    pub fn at_most(
        check: &str,
        params: Vec<(String, f64)>,
        value: f64,
        bound: f64,
        tol: f64,
    ) -> Self {
        Self::new(check, params, value, bound, value - bound, tol)
    }

    /// `value >= bound - tol`.
    pub fn at_least(
        check: &str,
        params: Vec<(String, f64)>,
        value: f64,
        bound: f64,
        tol: f64,
    ) -> Self {
        Self::new(check, params, value, bound, bound - value, tol)
    }

    /// `|value - reference| <= tol`.
    pub fn close(
        check: &str,
        params: Vec<(String, f64)>,
        value: f64,
        reference: f64,
        tol: f64,
    ) -> Self {
        Self::new(
            check,
            params,
            value,
            reference,
            (value - reference).abs(),
            tol,
        )
    }

    /// An instance that could not be evaluated counts as a failure.
    pub fn failed(
        check: &str,
        params: Vec<(String, f64)>,
        tol: f64,
        err: impl std::fmt::Display,
    ) -> Self {
        let mut row = Self::new(check, params, f64::NAN, f64::NAN, f64::INFINITY, tol);
        row.note = err.to_string();
        row
    }

    /// Recorded but not asserted.
    pub fn recorded(check: &str, params: Vec<(String, f64)>, note: impl std::fmt::Display) -> Self {
        let mut row = Self::new(check, params, f64::NAN, f64::NAN, 0.0, 0.0);
        row.note = note.to_string();
        row
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Shorthand for building parameter lists.
pub fn params<const N: usize>(pairs: [(&str, f64); N]) -> Vec<(String, f64)> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub rows: usize,
    pub passed: usize,
    pub max_violation: f64,
    pub tol: f64,
}

impl CheckSummary {
    pub fn pass(&self) -> bool {
        self.passed == self.rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckSummary>,
    pub pass: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    /// SHA-256 of the resolved config as compact JSON.
    pub config_sha256: String,
    pub version: String,
}

/// Columns for plotting, one numeric row per sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub rows: Vec<Row>,
    pub summary: Summary,
    pub provenance: Provenance,
    pub plot: Option<PlotTable>,
}

pub fn config_hash<C: Serialize>(config: &C) -> String {
    let json = serde_json::to_vec(config).expect("configs serialize to JSON");
    hex::encode(Sha256::digest(json))
}

impl ExperimentReport {
    /// Numbers the rows in order and summarizes them per check, in first-seen order.
    pub fn assemble(
        suite: &str,
        mut rows: Vec<Row>,
        provenance: Provenance,
        plot: Option<PlotTable>,
        elapsed: Duration,
    ) -> Self {
        let mut checks: Vec<CheckSummary> = Vec::new();
        for (i, row) in rows.iter_mut().enumerate() {
            row.index = i;
            let pos = match checks.iter().position(|c| c.check == row.check) {
                Some(pos) => pos,
                None => {
                    checks.push(CheckSummary {
                        check: row.check.clone(),
                        rows: 0,
                        passed: 0,
                        max_violation: f64::NEG_INFINITY,
                        tol: row.tol,
                    });
                    checks.len() - 1
                }
            };
            let c = &mut checks[pos];
            c.rows += 1;
            c.passed += row.pass as usize;
            c.tol = c.tol.max(row.tol);
            if row.violation.is_nan() || row.violation > c.max_violation {
                c.max_violation = if row.violation.is_nan() {
                    f64::INFINITY
                } else {
                    row.violation
                };
            }
        }
        let passed = rows.iter().filter(|r| r.pass).count();
        let summary = Summary {
            rows: rows.len(),
            passed,
            failed: rows.len() - passed,
            pass: passed == rows.len(),
            checks,
            wall_time_s: elapsed.as_secs_f64(),
        };
        ExperimentReport {
            suite: suite.to_string(),
            rows,
            summary,
            provenance,
            plot,
        }
    }

    pub fn pass(&self) -> bool {
        self.summary.pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.summary.checks.iter().find(|c| c.check == name)
    }

    /// One line per row; wall time is left out so reruns compare byte for byte.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "index",
            "check",
            "params",
            "value",
            "reference",
            "violation",
            "tol",
            "pass",
            "note",
        ])?;
        for r in &self.rows {
            let params = r
                .params
                .iter()
                .map(|(k, v)| format!("{k}={}", fmt_f64(*v)))
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                r.index.to_string(),
                r.check.clone(),
                params,
                fmt_f64(r.value),
                fmt_f64(r.reference),
                fmt_f64(r.violation),
                fmt_f64(r.tol),
                r.pass.to_string(),
                r.note.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing CSV to memory");
        buf
    }

    pub fn write_plot_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let Some(plot) = &self.plot else {
            return Ok(());
        };
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&plot.columns)?;
        for row in &plot.rows {
            w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// A short human-readable summary, one line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines = vec![format!(
            "{}: {} ({}/{} rows passed, {:.2}s)",
            self.suite,
            if self.pass() { "PASS" } else { "FAIL" },
            self.summary.passed,
            self.summary.rows,
            self.summary.wall_time_s
        )];
        for c in &self.summary.checks {
            lines.push(format!(
                "  {:<28} {:>5}/{:<5} max violation {:>10.3e} (tol {:.0e})",
                c.check, c.passed, c.rows, c.max_violation, c.tol
            ));
        }
        lines
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Writes `<suite>.csv` and/or `<suite>.json` into `dir`, plus `<suite>_plot.csv`
/// alongside the CSV when the suite produced a sweep. `None` writes both formats.
pub fn emit_report(
    report: &ExperimentReport,
    dir: &Path,
    format: Option<Format>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if format != Some(Format::Json) {
        let path = dir.join(format!("{}.csv", report.suite));
        let file = create(&path)?;
        report.write_csv(file).map_err(|source| HarnessError::Csv {
            path: path.clone(),
            source,
        })?;
        written.push(path);
        if report.plot.is_some() {
            let path = dir.join(format!("{}_plot.csv", report.suite));
            let file = create(&path)?;
            report
                .write_plot_csv(file)
                .map_err(|source| HarnessError::Csv {
                    path: path.clone(),
                    source,
                })?;
            written.push(path);
        }
    }
    if format != Some(Format::Csv) {
        let path = dir.join(format!("{}.json", report.suite));
        let file = create(&path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), report).map_err(|source| {
            HarnessError::Json {
                path: path.clone(),
                source,
            }
        })?;
        written.push(path);
    }
    Ok(written)
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn provenance() -> Provenance {
        Provenance {
            seed: 1,
            config_sha256: config_hash(&[1, 2]),
            version: "0".into(),
        }
    }

    #[test]
    fn summary_tracks_checks() {
        let rows = vec![
            Row::at_most("a", params([("x", 1.0)]), 1.0, 2.0, 1e-9),
            Row::close("b", vec![], 1.0, 1.5, 0.1),
            Row::at_most("a", vec![], 3.0, 2.0, 1e-9),
            Row::failed("b", vec![], 0.1, "boom"),
        ];
        let r = ExperimentReport::assemble("t", rows, provenance(), None, Duration::ZERO);
        assert!(!r.pass());
        assert_eq!(r.summary.failed, 3);
        let a = r.check("a").unwrap();
        assert_eq!((a.rows, a.passed, a.max_violation), (2, 1, 1.0));
        assert_eq!(r.check("b").unwrap().max_violation, f64::INFINITY);
        assert_eq!(r.rows[3].index, 3);
    }

    #[test]
    fn nan_values_fail() {
        assert!(!Row::close("x", vec![], f64::NAN, 1.0, 1.0).pass);
        assert!(Row::recorded("x", vec![], "note").pass);
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let rows = vec![Row::close(
            "c",
            params([("p", 0.1)]),
            1.0 / 3.0,
            1.0 / 3.0,
            1e-12,
        )];
        let r = ExperimentReport::assemble("t", rows, provenance(), None, Duration::from_secs(3));
        let text = String::from_utf8(r.csv_bytes()).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(
            line,
            "0,c,p=1.0000000000000001e-1,3.3333333333333331e-1,3.3333333333333331e-1,0.0000000000000000e0,9.9999999999999998e-13,true,"
        );
    }

    #[test]
    fn config_hash_is_stable() {
        assert_eq!(config_hash(&[1, 2]), config_hash(&[1, 2]));
        assert_ne!(config_hash(&[1, 2]), config_hash(&[2, 1]));
        assert_eq!(config_hash(&[1, 2]).len(), 64);
    }
}
