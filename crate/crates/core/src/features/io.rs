//! CSV and ARFF serialisation of feature tables.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

/// One row per segment: an id, the feature values and an optional label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Option<bool>>,
}

impl FeatureTable {
    pub fn new(names: Vec<String>) -> Self {
        Self { names, ..Default::default() }
    }

    pub fn push(&mut self, id: impl Into<String>, values: Vec<f64>, label: Option<bool>) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::Dataset(format!(
                "row has {} values, table has {} features",
                values.len(),
                self.names.len()
            )));
        }
        self.ids.push(id.into());
        self.rows.push(values);
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True when every row carries a label.
    pub fn is_labeled(&self) -> bool {
        !self.labels.is_empty() && self.labels.iter().all(Option::is_some)
    }
}

const ID_COLUMN: &str = "segment";
const LABEL_COLUMN: &str = "label";

/// Header `segment,<features...>[,label]`. The label column is written only
/// when every row is labelled; labels are `1` or `0`.
pub fn write_csv_to<W: Write>(table: &FeatureTable, w: W) -> Result<()> {
    let labeled = table.is_labeled();
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![ID_COLUMN.to_string()];
    header.extend(table.names.iter().cloned());
    if labeled {
        header.push(LABEL_COLUMN.into());
    }
    out.write_record(&header)?;
    for ((id, row), label) in table.ids.iter().zip(&table.rows).zip(&table.labels) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(|v| v.to_string()));
        if labeled {
            rec.push(if label == &Some(true) { "1" } else { "0" }.into());
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(table: &FeatureTable, path: &Path) -> Result<()> {
    write_csv_to(table, std::fs::File::create(path)?)
}

fn parse_label(s: &str, line: u64) -> Result<bool> {
    match s.trim() {
        "1" | "true" | "yes" | "rain" | "cicada" => Ok(true),
        "0" | "false" | "no" | "clean" => Ok(false),
        other => Err(Error::Dataset(format!("line {line}: label '{other}' is not 0 or 1"))),
    }
}

pub fn read_csv_from<R: Read>(r: R) -> Result<FeatureTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if header.first().map(String::as_str) != Some(ID_COLUMN) {
        return Err(Error::Dataset(format!("first CSV column must be '{ID_COLUMN}'")));
    }
    let labeled = header.last().map(String::as_str) == Some(LABEL_COLUMN);
    let end = if labeled { header.len() - 1 } else { header.len() };
    let mut table = FeatureTable::new(header[1..end].to_vec());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        if rec.len() != header.len() {
            return Err(Error::Dataset(format!("line {line}: expected {} fields, got {}", header.len(), rec.len())));
        }
        let values = (1..end)
            .map(|c| {
                rec[c].trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::Dataset(format!("line {line}: '{}' in column {} is not a finite number", &rec[c], header[c]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let label = if labeled { Some(parse_label(&rec[end], line)?) } else { None };
        table.push(&rec[0], values, label)?;
    }
    Ok(table)
}

pub fn read_csv(path: &Path) -> Result<FeatureTable> {
    read_csv_from(std::fs::File::open(path)?)
}

/// ARFF text with numeric attributes and, when labelled, a nominal
/// `class {0,1}` attribute.
pub fn write_arff(table: &FeatureTable, relation: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "@RELATION {}\n", quote(relation));
    for n in &table.names {
        let _ = writeln!(s, "@ATTRIBUTE {} NUMERIC", quote(n));
    }
    let labeled = table.is_labeled();
    if labeled {
        let _ = writeln!(s, "@ATTRIBUTE class {{0,1}}");
    }
    s.push_str("\n@DATA\n");
    for (row, label) in table.rows.iter().zip(&table.labels) {
        let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if labeled {
            fields.push(if label == &Some(true) { "1" } else { "0" }.into());
        }
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

fn quote(name: &str) -> String {
    if name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.') {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "\\'"))
    }
}
