//! Rendering of data tables and reports. Rendering is pure; writing is a
//! separate single-threaded step.

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A plot-ready table produced by a run, held as CSV text.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    /// File stem, e.g. `scan_omega1`.
    pub stem: String,
    pub csv: String,
}

impl DataFile {
    pub fn new(stem: impl Into<String>, csv: String) -> Self {
        Self {
            stem: stem.into(),
            csv,
        }
    }

    /// Data rows, not counting the header.
    pub fn rows(&self) -> usize {
        self.csv.lines().count().saturating_sub(1)
    }
}

fn cell_value(cell: &str) -> Value {
    if cell.is_empty() {
        return Value::Null;
    }
    match cell {
        "true" => return Value::Bool(true),
        "false" => return Value::Bool(false),
        _ => {}
    }
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    match cell.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::String(cell.to_string()),
    }
}

/// A CSV table as an array of row objects keyed by the header.
pub fn csv_to_json(csv: &str) -> Value {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines
        .next()
        .map(|h| h.split(',').collect())
        .unwrap_or_default();
    let rows = lines
        .map(|line| {
            let mut obj = Map::new();
            for (key, cell) in header.iter().zip(line.split(',')) {
                obj.insert((*key).to_string(), cell_value(cell));
            }
            Value::Object(obj)
        })
        .collect();
    Value::Array(rows)
}

/// Render the non-empty tables as `(file name, bytes)`; empty tables are
/// returned by stem in the second list.
pub fn render(data: &[DataFile], format: Format) -> (Vec<(String, Vec<u8>)>, Vec<String>) {
    let mut files = Vec::new();
    let mut empty = Vec::new();
    for d in data {
        if d.rows() == 0 {
            empty.push(d.stem.clone());
            continue;
        }
        let bytes = match format {
            Format::Csv => d.csv.clone().into_bytes(),
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&csv_to_json(&d.csv)).expect("tables serialize");
                s.push('\n');
                s.into_bytes()
            }
        };
        files.push((format!("{}.{}", d.stem, format.extension()), bytes));
    }
    (files, empty)
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s.into_bytes()
}

pub fn write_files(out: &Path, files: &[(String, Vec<u8>)]) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })?;
    for (name, bytes) in files {
        let path = out.join(name);
        std::fs::write(&path, bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_become_typed_objects() {
        let v = csv_to_json("k,indicator,class\n3,1.5e-1,outer\n4,,true\n");
        assert_eq!(v[0]["k"], 3);
        assert_eq!(v[0]["indicator"], 0.15);
        assert_eq!(v[0]["class"], "outer");
        assert!(v[1]["indicator"].is_null());
        assert_eq!(v[1]["class"], true);
    }

    #[test]
    fn empty_tables_are_not_rendered() {
        let data = [
            DataFile::new("a", "x,y\n1,2\n".into()),
            DataFile::new("b", "x,y\n".into()),
        ];
        let (files, empty) = render(&data, Format::Json);
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, "a.json");
        assert_eq!(empty, vec!["b".to_string()]);
    }
}
