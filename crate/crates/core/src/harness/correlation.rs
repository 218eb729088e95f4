use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::io::fmt_cell;
use super::{score_keys, HarnessError, StabilityReport};
use crate::numeric::compensated_sum;

/// Symmetric matrix of Pearson coefficients between metric columns.
/// `None` marks pairs involving a zero-variance column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub metric_names: Vec<String>,
    pub entries: Vec<Vec<Option<f64>>>,
    /// Tasks that had a value in every column.
    pub rows: usize,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.metric_names.iter().position(|n| n == a)?;
        let j = self.metric_names.iter().position(|n| n == b)?;
        self.entries[i][j]
    }

    /// CSV with a header row and a leading name column; undefined entries are
    /// empty cells.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), HarnessError> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["metric".to_string()];
        header.extend(self.metric_names.iter().cloned());
        out.write_record(&header)?;
        for (name, row) in self.metric_names.iter().zip(&self.entries) {
            let mut record = vec![name.clone()];
            record.extend(row.iter().map(|v| fmt_cell(v.as_ref())));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Pearson correlation of two equal-length columns; `None` when either has
/// zero variance or fewer than two values.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "columns must have equal length");
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = compensated_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Correlation matrix over named columns of equal length.
pub fn pearson_columns(names: Vec<String>, columns: &[Vec<f64>]) -> Result<CorrelationMatrix, HarnessError> {
    assert_eq!(names.len(), columns.len());
    let rows = columns.first().map_or(0, Vec::len);
    if rows < 2 {
        return Err(HarnessError::InsufficientData(format!("{rows} complete row(s), need at least 2")));
    }
    let k = names.len();
    let mut entries = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                pearson(&columns[i], &columns[i]).map(|_| 1.0)
            } else {
                pearson(&columns[i], &columns[j])
            };
            entries[i][j] = r;
            entries[j][i] = r;
        }
    }
    Ok(CorrelationMatrix { metric_names: names, entries, rows })
}

/// Pearson matrix over the report's score columns and, optionally, the
/// ingested external metric columns. Only tasks with a value in every
/// column are used.
pub fn pearson_matrix(
    report: &StabilityReport,
    include_external: bool,
) -> Result<CorrelationMatrix, HarnessError> {
    let mut names = score_keys(&report.config);
    if include_external {
        let external: BTreeSet<&String> =
            report.per_task.iter().flat_map(|t| t.external_metrics.keys()).collect();
        names.extend(external.into_iter().cloned());
    }
    let mut columns = vec![Vec::new(); names.len()];
    for task in &report.per_task {
        let row: Option<Vec<f64>> = names
            .iter()
            .map(|n| task.scores.get(n).or_else(|| task.external_metrics.get(n)).copied())
            .collect();
        if let Some(row) = row {
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
    }
    pearson_columns(names, &columns)
}
