//! Deterministic report serialization.
//!
//! JSON reports are canonical: object keys are emitted in sorted order
//! and every score is rendered with exactly six decimals (scores are
//! rounded to six decimals when the report is built, so serialize and
//! re-parse is the identity). Text reports are aligned tables with an
//! aggregate mean row.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::metrics::MetricReport;
use crate::pipeline::CheckOutcome;

pub const METRIC_COLUMNS: [&str; 7] = [
    "coh",
    "rel_weak",
    "rel_strong",
    "red",
    "acc",
    "cir_literal",
    "cir_cycle",
];

/// Output format for rendered reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format '{other}' (expected json or text)")),
        }
    }
}

/// Rounds a score to the six decimals the reports render.
pub fn round6(value: f64) -> f64 {
    (value * 1e6).round() / 1e6
}

fn write_json_string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("string serialization is infallible"));
}

fn write_canonical(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().unwrap_or(0.0);
                out.push_str(&format!("{f:.6}"));
            }
        }
        Value::String(s) => write_json_string(out, s),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(out, item);
            }
            out.push(']');
        }
        Value::Object(entries) => {
            let mut keys: Vec<&String> = entries.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json_string(out, key);
                out.push(':');
                write_canonical(out, &entries[key.as_str()]);
            }
            out.push('}');
        }
    }
}

/// Canonical JSON: sorted object keys, six-decimal floats, no whitespace.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(&mut out, value);
    out
}

fn score_entry(value: f64) -> Value {
    json!(round6(value))
}

fn metric_report_row(report: &MetricReport) -> Value {
    let mut row = Map::new();
    row.insert("id".to_owned(), json!(report.document_id));
    row.insert("format".to_owned(), json!(report.format.as_str()));
    for (name, value) in report.present_scores() {
        row.insert(name.to_owned(), score_entry(value));
    }
    if !report.band_expectation_flags.is_empty() {
        row.insert("flags".to_owned(), json!(report.band_expectation_flags));
    }
    if !report.notes.is_empty() {
        row.insert("notes".to_owned(), json!(report.notes));
    }
    if !report.errors.is_empty() {
        row.insert("errors".to_owned(), json!(report.errors));
    }
    Value::Object(row)
}

/// Per-metric mean/min/max/count over the present scores.
fn aggregate_value(reports: &[&MetricReport]) -> Value {
    let mut aggregate = Map::new();
    for metric in METRIC_COLUMNS {
        let values: Vec<f64> = reports
            .iter()
            .flat_map(|r| r.present_scores())
            .filter(|(name, _)| *name == metric)
            .map(|(_, v)| v)
            .collect();
        if values.is_empty() {
            continue;
        }
        let sum: f64 = values.iter().sum();
        let mean = sum / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        aggregate.insert(
            metric.to_owned(),
            json!({
                "count": values.len(),
                "mean": round6(mean),
                "min": round6(min),
                "max": round6(max),
            }),
        );
    }
    Value::Object(aggregate)
}

fn sorted_by_id<'a>(reports: &'a [MetricReport]) -> Vec<&'a MetricReport> {
    let mut sorted: Vec<&MetricReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.document_id.cmp(&b.document_id));
    sorted
}

/// Builds the JSON value for a batch of metric reports: rows sorted by
/// document id, an aggregate section, and the provenance configuration.
pub fn metric_reports_to_value(reports: &[MetricReport]) -> Value {
    let sorted = sorted_by_id(reports);
    let rows: Vec<Value> = sorted.iter().map(|r| metric_report_row(r)).collect();
    let mut root = Map::new();
    if let Some(first) = sorted.first() {
        root.insert(
            "config".to_owned(),
            serde_json::to_value(&first.provenance).expect("config serializes"),
        );
    }
    root.insert("documents".to_owned(), Value::Array(rows));
    root.insert("aggregate".to_owned(), aggregate_value(&sorted));
    Value::Object(root)
}

/// Renders metric reports as canonical JSON bytes.
pub fn render_metric_reports_json(reports: &[MetricReport]) -> String {
    canonical_json(&metric_reports_to_value(reports))
}

fn format_score(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.6}", round6(v)),
        None => "-".to_owned(),
    }
}

/// Renders metric reports as an aligned text table with a trailing
/// aggregate-mean row.
pub fn render_metric_reports_text(reports: &[MetricReport]) -> String {
    let sorted = sorted_by_id(reports);
    let id_width = sorted
        .iter()
        .map(|r| r.document_id.len())
        .chain(["id".len(), "mean".len()])
        .max()
        .unwrap_or(4);
    let fmt_width = "argumentative".len();

    let mut out = String::new();
    out.push_str(&format!("{:<id_width$}  {:<fmt_width$}", "id", "format"));
    for metric in METRIC_COLUMNS {
        out.push_str(&format!("  {metric:>11}"));
    }
    out.push_str("  flags\n");

    let score_of = |report: &MetricReport, metric: &str| -> Option<f64> {
        report
            .present_scores()
            .into_iter()
            .find(|(name, _)| *name == metric)
            .map(|(_, v)| v)
    };

    for report in &sorted {
        out.push_str(&format!(
            "{:<id_width$}  {:<fmt_width$}",
            report.document_id,
            report.format.as_str()
        ));
        for metric in METRIC_COLUMNS {
            out.push_str(&format!("  {:>11}", format_score(score_of(report, metric))));
        }
        out.push_str("  ");
        out.push_str(&report.band_expectation_flags.join("; "));
        if !report.errors.is_empty() {
            out.push_str(&format!(" [errors: {}]", report.errors.join("; ")));
        }
        out.push('\n');
    }

    // Aggregate row: arithmetic mean of the present scores per metric.
    out.push_str(&format!("{:<id_width$}  {:<fmt_width$}", "mean", ""));
    for metric in METRIC_COLUMNS {
        let values: Vec<f64> = sorted
            .iter()
            .filter_map(|r| score_of(r, metric))
            .collect();
        if values.is_empty() {
            out.push_str(&format!("  {:>11}", "-"));
        } else {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            out.push_str(&format!("  {:>11}", format!("{:.6}", round6(mean))));
        }
    }
    out.push('\n');
    out
}

fn check_outcome_row(outcome: &CheckOutcome) -> Value {
    json!({
        "id": outcome.document_id,
        "format": outcome.format.as_str(),
        "properties": outcome
            .reports
            .iter()
            .map(|r| serde_json::to_value(r).expect("report serializes"))
            .collect::<Vec<Value>>(),
        "errors": outcome.errors,
    })
}

/// Builds the JSON value for a batch of property-check outcomes, sorted
/// by document id.
pub fn check_outcomes_to_value(outcomes: &[CheckOutcome]) -> Value {
    let mut sorted: Vec<&CheckOutcome> = outcomes.iter().collect();
    sorted.sort_by(|a, b| a.document_id.cmp(&b.document_id));
    json!({
        "documents": sorted.iter().map(|o| check_outcome_row(o)).collect::<Vec<Value>>(),
    })
}

pub fn render_check_outcomes_json(outcomes: &[CheckOutcome]) -> String {
    canonical_json(&check_outcomes_to_value(outcomes))
}

/// Renders property-check outcomes as human-readable text.
pub fn render_check_outcomes_text(outcomes: &[CheckOutcome]) -> String {
    let mut sorted: Vec<&CheckOutcome> = outcomes.iter().collect();
    sorted.sort_by(|a, b| a.document_id.cmp(&b.document_id));
    let mut out = String::new();
    for outcome in sorted {
        out.push_str(&format!("{} ({})\n", outcome.document_id, outcome.format));
        for report in &outcome.reports {
            let mark = if report.holds { "✓" } else { "✗" };
            out.push_str(&format!("  [{mark}] {}", report.property));
            if !report.witnesses.is_empty() {
                let rendered: Vec<String> =
                    report.witnesses.iter().map(|w| w.to_string()).collect();
                out.push_str(&format!(" — witnesses: {}", rendered.join(", ")));
            }
            if !report.notes.is_empty() {
                out.push_str(&format!(" ({})", report.notes));
            }
            out.push('\n');
        }
        for error in &outcome.errors {
            out.push_str(&format!("  [!] {error}\n"));
        }
    }
    out
}

/// Aggregate corpus summary: per-format metric statistics, property pass
/// rates, and band-expectation flag counts.
pub fn summarize(reports: &[MetricReport], outcomes: &[CheckOutcome]) -> Value {
    if reports.is_empty() && outcomes.is_empty() {
        return json!({"documents": 0, "note": "no documents"});
    }
    let mut formats: BTreeMap<&str, Vec<&MetricReport>> = BTreeMap::new();
    for report in reports {
        formats.entry(report.format.as_str()).or_default().push(report);
    }

    let mut sections = Map::new();
    for (format, members) in &formats {
        let mut section = Map::new();
        section.insert("count".to_owned(), json!(members.len()));
        section.insert("metrics".to_owned(), aggregate_value(members));

        let mut pass: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for outcome in outcomes.iter().filter(|o| o.format.as_str() == *format) {
            for report in &outcome.reports {
                let entry = pass.entry(report.property.clone()).or_default();
                if report.holds {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        let properties: Map<String, Value> = pass
            .into_iter()
            .map(|(property, (passed, failed))| {
                let total = passed + failed;
                let rate = if total == 0 {
                    0.0
                } else {
                    passed as f64 / total as f64
                };
                (
                    property,
                    json!({"pass": passed, "fail": failed, "rate": round6(rate)}),
                )
            })
            .collect();
        section.insert("properties".to_owned(), Value::Object(properties));

        let mut flags: BTreeMap<String, usize> = BTreeMap::new();
        for report in members {
            for flag in &report.band_expectation_flags {
                *flags.entry(flag.clone()).or_default() += 1;
            }
        }
        section.insert(
            "flags".to_owned(),
            Value::Object(flags.into_iter().map(|(k, v)| (k, json!(v))).collect()),
        );
        sections.insert((*format).to_owned(), Value::Object(section));
    }

    json!({
        "documents": reports.len(),
        "formats": Value::Object(sections),
    })
}

/// Renders the aggregate summary as text.
pub fn render_summary_text(summary: &Value) -> String {
    let mut out = String::new();
    let documents = summary.get("documents").and_then(Value::as_u64).unwrap_or(0);
    if documents == 0 {
        return "no documents\n".to_owned();
    }
    out.push_str(&format!("documents: {documents}\n"));
    let Some(formats) = summary.get("formats").and_then(Value::as_object) else {
        return out;
    };
    for (format, section) in formats {
        let count = section.get("count").and_then(Value::as_u64).unwrap_or(0);
        out.push_str(&format!("\n[{format}] {count} document(s)\n"));
        if let Some(metrics) = section.get("metrics").and_then(Value::as_object) {
            for (metric, stats) in metrics {
                let mean = stats.get("mean").and_then(Value::as_f64).unwrap_or(0.0);
                let min = stats.get("min").and_then(Value::as_f64).unwrap_or(0.0);
                let max = stats.get("max").and_then(Value::as_f64).unwrap_or(0.0);
                out.push_str(&format!(
                    "  {metric:<12} mean {mean:.6}  min {min:.6}  max {max:.6}\n"
                ));
            }
        }
        if let Some(properties) = section.get("properties").and_then(Value::as_object) {
            for (property, stats) in properties {
                let pass = stats.get("pass").and_then(Value::as_u64).unwrap_or(0);
                let fail = stats.get("fail").and_then(Value::as_u64).unwrap_or(0);
                out.push_str(&format!("  {property:<28} pass {pass}  fail {fail}\n"));
            }
        }
        if let Some(flags) = section.get("flags").and_then(Value::as_object) {
            for (flag, count) in flags {
                out.push_str(&format!("  flag \"{flag}\": {count}\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EvalConfig;
    use crate::model::ExplanationFormat;

    fn report(id: &str, coh: Option<f64>, rel_weak: Option<f64>) -> MetricReport {
        let mut r = MetricReport::empty(id, ExplanationFormat::Deductive, &EvalConfig::default());
        r.coh = coh;
        r.rel_weak = rel_weak;
        r
    }

    #[test]
    fn canonical_json_sorts_keys_and_renders_six_decimals() {
        let value = json!({"b": 0.5, "a": {"z": 1, "y": [0.25]}});
        assert_eq!(
            canonical_json(&value),
            r#"{"a":{"y":[0.250000],"z":1},"b":0.500000}"#
        );
    }

    #[test]
    fn json_report_round_trips() {
        let reports = vec![
            report("doc-b", Some(1.0), Some(0.5)),
            report("doc-a", Some(1.0 / 3.0), None),
        ];
        let bytes = render_metric_reports_json(&reports);
        let parsed: Value = serde_json::from_str(&bytes).expect("canonical output parses");
        assert_eq!(canonical_json(&parsed), bytes);
        // Rows are sorted by id.
        let ids: Vec<&str> = parsed["documents"]
            .as_array()
            .unwrap()
            .iter()
            .map(|row| row["id"].as_str().unwrap())
            .collect();
        assert_eq!(ids, vec!["doc-a", "doc-b"]);
    }

    #[test]
    fn aggregate_mean_of_present_scores() {
        let reports = vec![
            report("a", Some(1.0), Some(1.0)),
            report("b", None, Some(0.5)),
        ];
        let value = metric_reports_to_value(&reports);
        assert_eq!(value["aggregate"]["rel_weak"]["mean"], json!(0.75));
        assert_eq!(value["aggregate"]["rel_weak"]["count"], json!(2));
        assert_eq!(value["aggregate"]["coh"]["mean"], json!(1.0));
        assert_eq!(value["aggregate"]["coh"]["count"], json!(1));
    }

    #[test]
    fn text_table_contains_aggregate_row_and_flags() {
        let mut flagged = report("c", Some(1.0), Some(1.0));
        flagged.band_expectation_flags = vec!["Low band expects Acc≠1".to_owned()];
        let text = render_metric_reports_text(&[flagged, report("a", Some(0.5), Some(0.5))]);
        assert!(text.contains("mean"));
        assert!(text.contains("0.750000"));
        assert!(text.contains("Low band expects Acc≠1"));
        let a_line = text.lines().find(|l| l.starts_with('a')).unwrap();
        assert!(a_line.contains("0.500000"));
    }

    #[test]
    fn empty_summary_says_no_documents() {
        let summary = summarize(&[], &[]);
        assert_eq!(summary["documents"], json!(0));
        assert_eq!(render_summary_text(&summary), "no documents\n");
    }

    #[test]
    fn identical_inputs_render_identical_bytes() {
        let reports = vec![report("a", Some(1.0 / 3.0), Some(2.0 / 3.0))];
        assert_eq!(
            render_metric_reports_json(&reports),
            render_metric_reports_json(&reports)
        );
    }
}
