//! Report tables and their CSV / JSON encodings.
//!
//! CSV files open with a `#` comment block holding the resolved config, the
//! numerical tolerances, the summary values and any channel warnings,
//! followed by a header row and the data rows. JSON files carry the same
//! fields as one object. Numbers are written with 12 significant digits.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value as Json};

use crate::config::{format_number, round12, Command, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn opt(x: Option<f64>) -> Value {
        x.map_or(Value::Missing, Value::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    fn to_text(&self) -> String {
        match self {
            Value::Num(x) => format_number(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Num(x) if x.is_finite() => json!(round12(*x)),
            Value::Num(x) => json!(format_number(*x)),
            Value::Int(n) => json!(n),
            Value::Bool(b) => json!(b),
            Value::Text(s) => json!(s),
            Value::Missing => Json::Null,
        }
    }
}

/// Status column entry of a row that computed cleanly.
pub const OK: &str = "ok";

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub config: Vec<(String, String)>,
    pub tolerances: Vec<(&'static str, f64)>,
    pub summary: Vec<(String, Value)>,
    pub warnings: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn summary_value(&self, key: &str) -> Option<&Value> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Rows whose status column reads [`OK`].
    pub fn ok_rows(&self) -> usize {
        let Some(i) = self.column("status") else {
            return self.rows.len();
        };
        self.rows.iter().filter(|r| r[i] == Value::Text(OK.into())).count()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# spinboson {} {}\n", env!("CARGO_PKG_VERSION"), self.command.as_str()));
        for (k, v) in &self.config {
            out.push_str(&format!("# config {k}={v}\n"));
        }
        for (k, v) in &self.tolerances {
            out.push_str(&format!("# tolerance {k}={}\n", format_number(*v)));
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary {k}={}\n", v.to_text()));
        }
        for w in &self.warnings {
            out.push_str(&format!("# warning {w}\n"));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row.iter().map(Value::to_text)).expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory write");
        out.push_str(&String::from_utf8(body).expect("utf-8 fields"));
        out
    }

    pub fn to_json(&self) -> String {
        let config: Map<String, Json> = self.config.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let tolerances: Map<String, Json> = self.tolerances.iter().map(|(k, v)| (k.to_string(), Value::Num(*v).to_json())).collect();
        let summary: Map<String, Json> = self.summary.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        let rows: Vec<Json> = self.rows.iter().map(|r| Json::Array(r.iter().map(Value::to_json).collect())).collect();
        let doc = json!({
            "program": "spinboson",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command.as_str(),
            "config": config,
            "tolerances": tolerances,
            "summary": summary,
            "warnings": self.warnings,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable report");
        text.push('\n');
        text
    }

    /// Writes `<dir>/<command>.<ext>` and returns the path.
    pub fn write(&self, dir: &Path, format: Format) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.{}", self.command.as_str(), format.extension()));
        fs::write(&path, self.render(format))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            command: Command::Scaling,
            config: vec![("bath.s".into(), "3".into())],
            tolerances: vec![("rate", 1e-10)],
            summary: vec![("slope".into(), Value::Num(0.1 + 0.2)), ("fit".into(), Value::Missing)],
            warnings: vec![],
            columns: vec!["n", "gap", "status"],
            rows: vec![
                vec![Value::Int(2), Value::Missing, Value::Text("no t_s, in window".into())],
                vec![Value::Int(3), Value::Num(1.0 / 3.0), Value::Text(OK.into())],
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let text = sample().to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# spinboson "));
        assert_eq!(lines[1], "# config bath.s=3");
        assert_eq!(lines[2], "# tolerance rate=1e-10");
        assert_eq!(lines[3], "# summary slope=0.3");
        assert_eq!(lines[5], "n,gap,status");
        assert_eq!(lines[6], "2,,\"no t_s, in window\"");
        assert_eq!(lines[7], "3,0.333333333333,ok");
        assert_eq!(sample().ok_rows(), 1);
    }

    #[test]
    fn json_has_same_schema() {
        let doc: Json = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(doc["columns"], json!(["n", "gap", "status"]));
        assert_eq!(doc["rows"][1][1], json!(0.333333333333));
        assert_eq!(doc["rows"][0][1], Json::Null);
        assert_eq!(doc["summary"]["slope"], json!(0.3));
        assert_eq!(doc["config"]["bath.s"], json!("3"));
    }
}
