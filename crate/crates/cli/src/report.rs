//! The report envelope every command emits: one JSON document with the full
//! parameter echo, the command result, a status and the matching exit code.
//!
//! Reports are byte-deterministic for identical invocations except for the
//! single `timestamp_ms` field, which golden tests mask.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportStatus {
    Pass,
    Violation,
    HypothesisViolated,
}

impl ReportStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            ReportStatus::Pass => 0,
            ReportStatus::Violation => 1,
            ReportStatus::HypothesisViolated => 2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// The only field allowed to differ between identical invocations.
    pub timestamp_ms: u128,
    pub params: Value,
    pub result: Value,
    pub status: ReportStatus,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str, params: Value, result: Value, status: ReportStatus) -> Self {
        let timestamp_ms = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        Report {
            tool: "pluriharm",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            timestamp_ms,
            params,
            result,
            status,
            exit_code: status.exit_code(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Flattens the result into `key,value` CSV rows. Leaf values are printed
/// through the JSON serializer, so CSV rows match the report values exactly.
pub fn result_to_csv(result: &Value) -> String {
    let mut rows = vec!["key,value".to_string()];
    flatten("", result, &mut rows);
    let mut out = rows.join("\n");
    out.push('\n');
    out
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                let key = if prefix.is_empty() {
                    i.to_string()
                } else {
                    format!("{prefix}.{i}")
                };
                flatten(&key, v, rows);
            }
        }
        leaf => {
            let printed = serde_json::to_string(leaf).expect("leaf serializes");
            let quoted = if printed.contains(',') {
                format!("\"{}\"", printed.replace('"', "\"\""))
            } else {
                printed
            };
            rows.push(format!("{prefix},{quoted}"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_rows_match_json_values() {
        let result = json!({
            "alpha": 0.12345678901234568,
            "nested": {"values": [1.0, 2.5e-3]},
            "flag": true
        });
        let csv = result_to_csv(&result);
        assert!(csv.contains("alpha,0.12345678901234568"));
        assert!(csv.contains("nested.values.0,1.0"));
        assert!(csv.contains("nested.values.1,0.0025"));
        assert!(csv.contains("flag,true"));
    }

    #[test]
    fn exit_codes_follow_status() {
        assert_eq!(ReportStatus::Pass.exit_code(), 0);
        assert_eq!(ReportStatus::Violation.exit_code(), 1);
        assert_eq!(ReportStatus::HypothesisViolated.exit_code(), 2);
    }
}
