//! Report emission: full records as JSON, the mode x bucket accuracy matrix
//! as CSV (result-table layout), and flat plot data for external charting.
//! Timestamps live only in provenance so repeated runs diff clean.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use sgp_core::PromptMode;

use crate::datasets::bucket_scheme;

use super::{EvalError, EvalReport};

/// `mode,<bucket...>` header plus one row per mode. Buckets with no records
/// are omitted from the CSV (they stay `null` in the JSON records view).
pub fn matrix_csv(report: &EvalReport) -> String {
    let cells = report.cells();
    let buckets: Vec<String> = bucket_scheme(report.task)
        .into_iter()
        .filter(|b| {
            report
                .modes()
                .iter()
                .any(|m| cells.contains_key(&(*m, b.clone())))
        })
        .collect();
    let mut out = String::from("mode");
    for b in &buckets {
        out.push(',');
        out.push_str(b);
    }
    out.push('\n');
    for mode in report.modes() {
        out.push_str(mode.slug());
        for b in &buckets {
            out.push(',');
            if let Some(cell) = cells.get(&(mode, b.clone())) {
                out.push_str(&format_accuracy(cell.accuracy()));
            }
        }
        out.push('\n');
    }
    out
}

pub fn plotdata_csv(report: &EvalReport) -> String {
    let cells = report.cells();
    let mut out = String::from("bucket,mode,accuracy\n");
    for bucket in bucket_scheme(report.task) {
        for mode in report.modes() {
            if let Some(cell) = cells.get(&(mode, bucket.clone())) {
                out.push_str(&format!(
                    "{},{},{}\n",
                    bucket,
                    mode.slug(),
                    format_accuracy(cell.accuracy())
                ));
            }
        }
    }
    out
}

/// Trailing-zero-free decimal form matching the reference tables
/// (0.5 stays "0.5", 0.695 stays "0.695").
fn format_accuracy(v: f64) -> String {
    let s = format!("{:.3}", v);
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

/// Writes `records.json`, `matrix.csv`, `plotdata.csv`, `provenance.json`.
pub fn emit_report(report: &EvalReport, outdir: &Path) -> Result<(), EvalError> {
    std::fs::create_dir_all(outdir)?;
    let records = serde_json::to_string_pretty(&report.records).expect("records serialize");
    write_file(outdir.join("records.json"), &records)?;
    write_file(outdir.join("matrix.csv"), &matrix_csv(report))?;
    write_file(outdir.join("plotdata.csv"), &plotdata_csv(report))?;
    let provenance =
        serde_json::to_string_pretty(&report.provenance).expect("provenance serializes");
    write_file(outdir.join("provenance.json"), &provenance)?;
    Ok(())
}

fn write_file(path: std::path::PathBuf, content: &str) -> Result<(), EvalError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(content.as_bytes())?;
    if !content.ends_with('\n') {
        f.write_all(b"\n")?;
    }
    Ok(())
}

/// A published result table kept as a read-only reference fixture:
/// header buckets plus labelled accuracy rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMatrix {
    pub buckets: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl ReferenceMatrix {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let raw = std::fs::read_to_string(path)?;
        Self::parse(&raw)
    }

    pub fn parse(raw: &str) -> Result<Self, EvalError> {
        let mut lines = raw.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| EvalError::Config("empty reference matrix".into()))?;
        let mut cols = header.split(',');
        if cols.next() != Some("mode") {
            return Err(EvalError::Config("reference header must start with 'mode'".into()));
        }
        let buckets: Vec<String> = cols.map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines {
            let mut parts = line.split(',');
            let label = parts
                .next()
                .ok_or_else(|| EvalError::Config("reference row missing label".into()))?
                .to_string();
            let values: Result<Vec<f64>, _> = parts.map(|p| p.trim().parse::<f64>()).collect();
            let values =
                values.map_err(|e| EvalError::Config(format!("reference row '{}': {}", label, e)))?;
            if values.len() != buckets.len() {
                return Err(EvalError::Config(format!(
                    "reference row '{}' has {} cells, expected {}",
                    label,
                    values.len(),
                    buckets.len()
                )));
            }
            rows.push((label, values));
        }
        Ok(ReferenceMatrix { buckets, rows })
    }

    /// Re-emits the table through the same formatting as run reports.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode");
        for b in &self.buckets {
            out.push(',');
            out.push_str(b);
        }
        out.push('\n');
        for (label, values) in &self.rows {
            out.push_str(label);
            for v in values {
                out.push(',');
                out.push_str(&format_accuracy(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn row(&self, label: &str) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
    }
}

/// Rebuilds an accuracy matrix from a `records.json` written earlier.
pub fn matrix_from_records_json(raw: &str) -> Result<BTreeMap<(PromptMode, String), (usize, usize)>, EvalError> {
    let records: Vec<super::InstanceRecord> =
        serde_json::from_str(raw).map_err(|e| EvalError::Config(e.to_string()))?;
    let mut cells: BTreeMap<(PromptMode, String), (usize, usize)> = BTreeMap::new();
    for r in records {
        let cell = cells.entry((r.mode, r.bucket)).or_insert((0, 0));
        cell.0 += 1;
        if r.correct {
            cell.1 += 1;
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_formatting_matches_table_style() {
        assert_eq!(format_accuracy(0.695), "0.695");
        assert_eq!(format_accuracy(0.5), "0.5");
        assert_eq!(format_accuracy(1.0), "1");
        assert_eq!(format_accuracy(0.0), "0");
        assert_eq!(format_accuracy(0.39), "0.39");
    }

    #[test]
    fn reference_matrix_round_trips() {
        let csv = "mode,3,4\ngpt-4 sgp,0.695,0.604\ngpt-4 w/ 0-CoT,0.543,0.325\n";
        let m = ReferenceMatrix::parse(csv).unwrap();
        assert_eq!(m.buckets, vec!["3", "4"]);
        assert_eq!(m.row("gpt-4 sgp"), Some(&[0.695, 0.604][..]));
        assert_eq!(m.to_csv(), csv);
    }
}
