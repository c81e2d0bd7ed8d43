//! Report envelope and its JSON / `field,value` CSV encodings.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Serialize)]
pub struct Envelope {
    pub command: &'static str,
    pub version: &'static str,
    pub t: Option<usize>,
    pub d: Option<usize>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub cap: usize,
    pub result: Value,
    pub elapsed_seconds: f64,
}

pub fn to_json(envelope: &Envelope) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(envelope).map_err(|e| CliError::Encode(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// One row per JSON leaf, keyed by its dotted path. Numbers keep their JSON
/// spelling so both encodings carry identical values.
pub fn to_csv(envelope: &Envelope) -> Result<String, CliError> {
    let value = serde_json::to_value(envelope).map_err(|e| CliError::Encode(e.to_string()))?;
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    let mut writer = csv::Writer::from_writer(Vec::new());
    let encode = |e: csv::Error| CliError::Encode(e.to_string());
    writer.write_record(["field", "value"]).map_err(encode)?;
    for (field, cell) in &rows {
        writer.write_record([field, cell]).map_err(encode)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Encode(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))
}

pub fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

pub fn write(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Output { path: "<stdout>".into(), source })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_uses_dotted_paths() {
        let mut rows = Vec::new();
        flatten("", &json!({"a": [1, {"b": 2.5}], "c": null, "s": "1/4"}), &mut rows);
        let want = [("a.0", "1"), ("a.1.b", "2.5"), ("c", ""), ("s", "1/4")];
        assert_eq!(rows, want.map(|(f, v)| (f.to_string(), v.to_string())));
    }
}
