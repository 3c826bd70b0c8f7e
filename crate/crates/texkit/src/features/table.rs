//! Delimited feature-table serialization.
//!
//! One row per image: `path,label,` then the 13 feature columns in canonical
//! order. Values are written with Rust's shortest round-trip float formatting,
//! so write → read → write is byte-identical.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_COUNT, FEATURE_NAMES};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub path: String,
    pub label: String,
    pub features: FeatureVector,
}

pub fn table_header() -> String {
    let mut h = String::from("path,label");
    for name in FEATURE_NAMES {
        h.push(',');
        h.push_str(name);
    }
    h
}

fn check_field(kind: &str, value: &str) -> Result<()> {
    if value.is_empty() {
        return Err(Error::invalid(format!("empty {kind} in feature row")));
    }
    if value.contains(',') || value.contains('\n') || value.contains('\r') {
        return Err(Error::invalid(format!(
            "{kind} '{value}' contains a delimiter; commas and newlines are not representable"
        )));
    }
    Ok(())
}

pub fn write_table<W: Write>(mut w: W, rows: &[FeatureRow]) -> Result<()> {
    let io = |e| Error::format(format!("feature table write failed: {e}"));
    writeln!(w, "{}", table_header()).map_err(io)?;
    for row in rows {
        check_field("path", &row.path)?;
        check_field("label", &row.label)?;
        let mut line = format!("{},{}", row.path, row.label);
        for v in row.features.to_array() {
            line.push(',');
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    Ok(())
}

pub fn read_table<R: BufRead>(r: R) -> Result<Vec<FeatureRow>> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| Error::format(format!("feature table read failed: {e}")))?,
        None => return Err(Error::format("empty feature table")),
    };
    if header != table_header() {
        return Err(Error::format(format!(
            "incompatible feature table header '{header}'; expected '{}'",
            table_header()
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::format(format!("feature table read failed: {e}")))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != FEATURE_COUNT + 2 {
            return Err(Error::format(format!(
                "feature table line {}: expected {} fields, found {}",
                lineno + 2,
                FEATURE_COUNT + 2,
                fields.len()
            )));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::format(format!(
                "feature table line {}: empty path or label",
                lineno + 2
            )));
        }
        let mut values = [0.0; FEATURE_COUNT];
        for (i, f) in fields[2..].iter().enumerate() {
            values[i] = f.parse::<f64>().map_err(|_| {
                Error::format(format!(
                    "feature table line {}: invalid number '{f}' in column {}",
                    lineno + 2,
                    FEATURE_NAMES[i]
                ))
            })?;
        }
        rows.push(FeatureRow {
            path: fields[0].to_string(),
            label: fields[1].to_string(),
            features: FeatureVector::from_array(values),
        });
    }
    Ok(rows)
}

pub fn write_table_file(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_table(std::io::BufWriter::new(file), rows)
}

pub fn read_table_file(path: &Path) -> Result<Vec<FeatureRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(std::io::BufReader::new(file))
}
