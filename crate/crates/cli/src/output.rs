//! Tables and their CSV / JSON encodings.
//!
//! Reals are written with 17 significant digits in scientific notation so a
//! file pins down every bit of every value. Missing values are empty CSV
//! fields and JSON `null`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::{ExperimentError, OutputFormat};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Missing,
    Text(String),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) if v.is_nan() => "nan".into(),
            Cell::Real(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Missing => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            // JSON has no infinities; they only show up in vacuous bounds.
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Missing => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A row type with a fixed column layout.
pub trait Record {
    const COLUMNS: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Run description, emitted ahead of the data.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn from_records<R: Record>(metadata: Vec<(String, String)>, records: &[R]) -> Table {
        Table {
            metadata,
            columns: R::COLUMNS.to_vec(),
            rows: records.iter().map(Record::cells).collect(),
        }
    }

    /// Comment lines `# key: value`, then a header row and one line per row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), ExperimentError> {
        for (key, value) in &self.metadata {
            writeln!(out, "# {key}: {value}")?;
        }
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        wtr.write_record(&self.columns)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(Cell::csv_field))?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// `{"metadata": {...}, "rows": [{column: value, ...}, ...]}`.
    pub fn to_json(&self) -> Value {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.to_string(), cell.json_value()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("metadata".into(), Value::Object(metadata));
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), ExperimentError> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write_to_path(&self, path: &Path, format: OutputFormat) -> Result<(), ExperimentError> {
        let file = File::create(path).map_err(|source| ExperimentError::Output {
            path: path.to_path_buf(),
            source,
        })?;
        let mut out = BufWriter::new(file);
        match format {
            OutputFormat::Csv => self.write_csv(&mut out)?,
            OutputFormat::Json => self.write_json(&mut out)?,
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        Table {
            metadata: vec![("seed".into(), "7".into())],
            columns: vec!["n", "value", "note"],
            rows: vec![
                vec![Cell::Int(10), Cell::Real(0.1), Cell::from("a,b")],
                vec![Cell::Int(20), Cell::Missing, Cell::Real(f64::INFINITY)],
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        table().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# seed: 7\nn,value,note\n10,1.0000000000000001e-1,\"a,b\"\n20,,inf\n"
        );
    }

    #[test]
    fn reals_round_trip_through_csv() {
        for v in [
            0.1,
            1.0 / 3.0,
            2f64.sqrt(),
            1e-300,
            123_456_789.123_456_79,
            f64::MIN_POSITIVE,
        ] {
            let s = Cell::Real(v).csv_field();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_keeps_column_order() {
        let json = table().to_json();
        let row = &json["rows"][0];
        let keys: Vec<&String> = row.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["n", "value", "note"]);
        assert_eq!(json["rows"][1]["value"], Value::Null);
        assert_eq!(json["rows"][1]["note"], Value::Null);
        assert_eq!(json["metadata"]["seed"], "7");
    }
}
