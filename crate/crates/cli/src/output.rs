use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Renders `body` under the versioned envelope. CSV is the long form of the
/// JSON document: one `schema_version,path,value` row per leaf.
pub fn render<T: Serialize>(command: &str, body: &T, format: Format) -> Result<String, String> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    };
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let doc = serde_json::to_value(&envelope).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            flatten(&doc, String::new(), &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["schema_version", "path", "value"])
                .map_err(|e| e.to_string())?;
            let version = SCHEMA_VERSION.to_string();
            for (path, value) in rows {
                w.write_record([version.as_str(), path.as_str(), value.as_str()])
                    .map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(child, join(k), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, join(&i.to_string()), out);
            }
            if items.is_empty() {
                out.push((path, "[]".into()));
            }
        }
        Value::String(s) => out.push((path, s.clone())),
        Value::Null => out.push((path, "null".into())),
        other => out.push((path, other.to_string())),
    }
}

pub fn emit(text: &str, output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_rows_follow_json_leaves() {
        let body = json!({"rounds": 3, "seed": ["00", "11"], "extra": null, "empty": []});
        let csv = render("simulate", &body, Format::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "schema_version,path,value");
        assert!(lines.contains(&"1,seed.1,11"));
        assert!(lines.contains(&"1,rounds,3"));
        assert!(lines.contains(&"1,extra,null"));
        assert!(lines.contains(&"1,empty,[]"));
        assert!(lines.contains(&"1,command,simulate"));
    }

    #[test]
    fn json_envelope_leads_with_version() {
        let body = json!({"a": 1});
        let s = render("formula", &body, Format::Json).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["command"], "formula");
        assert!(s.trim_start().starts_with("{\n  \"schema_version\": 1"));
    }
}
