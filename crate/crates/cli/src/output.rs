//! Artifact formatting. Numbers use the shortest round-trip decimal form
//! (`{:?}` for CSV, the `serde_json` writer for JSON), so identical inputs
//! give byte-identical bodies. The only varying line is the timestamp.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

/// Prefix of the header line that carries the wall-clock time.
pub const TIMESTAMP_KEY: &str = "generated";

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// `# key = value` lines: tool version, timestamp, then the resolved config.
pub fn csv_header(config: &BTreeMap<&'static str, String>) -> String {
    let mut out = format!("# pvscale {}\n# {TIMESTAMP_KEY} = {}\n", env!("CARGO_PKG_VERSION"), timestamp());
    for (k, v) in config {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out
}

/// A CSV table with a header row.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values.iter().map(|v| format!("{v:?}")).collect());
    }

    pub fn render(&self, config: &BTreeMap<&'static str, String>) -> String {
        let mut out = csv_header(config);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Pretty JSON document `{config, generated, result}`; the timestamp sits
/// on a line of its own.
pub fn json_document<T: Serialize>(config: &BTreeMap<&'static str, String>, result: &T) -> serde_json::Result<String> {
    let doc: Value = json!({
        "tool": format!("pvscale {}", env!("CARGO_PKG_VERSION")),
        "config": config,
        TIMESTAMP_KEY: timestamp(),
        "result": serde_json::to_value(result)?,
    });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Drops the timestamp line from a CSV or JSON artifact.
pub fn strip_timestamp(artifact: &str) -> String {
    artifact
        .lines()
        .filter(|l| {
            let t = l.trim_start();
            !(t.starts_with(&format!("# {TIMESTAMP_KEY} =")) || t.starts_with(&format!("\"{TIMESTAMP_KEY}\":")))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_round_trip_numbers() {
        let mut t = Table::new(&["y", "value"]);
        t.push(&[0.1, 1e-300]);
        let cfg = BTreeMap::from([("function", "sin".to_string())]);
        let s = t.render(&cfg);
        assert!(s.contains("# function = sin\n"));
        assert!(s.ends_with("y,value\n0.1,1e-300\n"));
        let parsed: f64 = "1e-300".parse().unwrap();
        assert_eq!(parsed, 1e-300);
    }

    #[test]
    fn timestamp_is_the_only_difference() {
        let cfg = BTreeMap::from([("k", "v".to_string())]);
        let a = json_document(&cfg, &vec![1.5, 2.0]).unwrap();
        let b = json_document(&cfg, &vec![1.5, 2.0]).unwrap();
        assert_eq!(strip_timestamp(&a), strip_timestamp(&b));
        assert!(!strip_timestamp(&a).contains(TIMESTAMP_KEY));
        let _: Value = serde_json::from_str(&a).unwrap();
    }
}
