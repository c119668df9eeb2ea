// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV and JSON ingestion.

use std::fs;
use std::path::Path;

use npid::Series;
use serde_json::Value;

use crate::error::CliError;

/// Reads a series from one-value-per-line or `time,value` CSV.
///
/// Blank lines and `#` comments are skipped. A first row with no numeric
/// field is taken as a header.
pub fn read_series(path: &Path) -> Result<Series, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_series(&text)
}

pub fn parse_series(text: &str) -> Result<Series, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Parse {
            line: e.position().map_or(i + 1, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !matches!(record.len(), 1 | 2) {
            return Err(CliError::Parse {
                line,
                msg: format!("expected 1 or 2 columns, found {}", record.len()),
            });
        }
        if values.is_empty() && width.is_none() && record.iter().all(|f| f.parse::<f64>().is_err())
        {
            width = Some(record.len());
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(CliError::Parse {
                    line,
                    msg: format!("expected {w} columns, found {}", record.len()),
                })
            }
            _ => width = Some(record.len()),
        }
        let field = &record[record.len() - 1];
        let v: f64 = field.parse().map_err(|_| CliError::Parse {
            line,
            msg: format!("`{field}` is not a number"),
        })?;
        if !v.is_finite() {
            return Err(CliError::Parse {
                line,
                msg: format!("`{field}` is not finite"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::EmptySeries);
    }
    Series::new(values).map_err(CliError::from)
}

/// Change-points from a JSON file: a bare array or any object with a
/// `changepoints` array (truth sidecars and detection output both qualify).
pub fn read_changepoints(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        source: e,
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    let list = match &value {
        Value::Array(_) => &value,
        Value::Object(map) => map.get("changepoints").ok_or_else(|| CliError::Format {
            path: path.display().to_string(),
            msg: "object has no `changepoints` field".into(),
        })?,
        _ => {
            return Err(CliError::Format {
                path: path.display().to_string(),
                msg: "expected an array or an object".into(),
            })
        }
    };
    let mut points: Vec<usize> =
        serde_json::from_value(list.clone()).map_err(|e| CliError::Json {
            path: path.display().to_string(),
            source: e,
        })?;
    points.sort_unstable();
    points.dedup();
    Ok(points)
}
