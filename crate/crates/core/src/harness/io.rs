use std::collections::BTreeSet;
use std::io::{BufRead, Read, Write};

use super::{score_keys, HarnessError, StabilityReport, TaskRecord};

/// Read a JSON-Lines dataset, one [`TaskRecord`] per non-blank line.
/// Errors carry the 1-based line number.
pub fn read_dataset<R: BufRead>(reader: R) -> Result<Vec<TaskRecord>, HarnessError> {
    let mut tasks = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| HarnessError::MalformedRecord { line: line_no, message };
        let task: TaskRecord = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        if task.task_id.is_empty() {
            return Err(malformed("empty task_id".into()));
        }
        if task.samples.len() < 2 {
            return Err(malformed(format!(
                "task `{}` has {} sample(s), need at least 2",
                task.task_id,
                task.samples.len()
            )));
        }
        tasks.push(task);
    }
    Ok(tasks)
}

pub fn read_report<R: Read>(reader: R) -> Result<StabilityReport, HarnessError> {
    Ok(serde_json::from_reader(reader)?)
}

/// Pretty-printed JSON with a trailing newline. Map-backed fields serialise
/// in key order, so equal reports give identical bytes.
pub fn write_report_json<W: Write>(mut writer: W, report: &StabilityReport) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut writer, report)?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// One row per scored task: id, language, score columns, pair and failure
/// counts, then external metric columns. Missing values are empty cells.
pub fn write_report_csv<W: Write>(writer: W, report: &StabilityReport) -> Result<(), HarnessError> {
    let keys = score_keys(&report.config);
    let external: BTreeSet<&String> =
        report.per_task.iter().flat_map(|t| t.external_metrics.keys()).collect();

    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["task_id".to_string(), "language".to_string()];
    header.extend(keys.iter().cloned());
    header.extend(["samples_scored", "unordered_pairs", "ordered_pairs", "parse_failures"].map(String::from));
    header.extend(external.iter().map(|k| k.to_string()));
    out.write_record(&header)?;

    for task in &report.per_task {
        let mut row = vec![task.task_id.clone(), task.language.clone()];
        row.extend(keys.iter().map(|k| fmt_cell(task.scores.get(k))));
        row.extend(
            [task.samples_scored, task.unordered_pairs, task.ordered_pairs, task.parse_failures]
                .map(|n| n.to_string()),
        );
        row.extend(external.iter().map(|k| fmt_cell(task.external_metrics.get(*k))));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub(super) fn fmt_cell(value: Option<&f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}
