//! JSON Lines problem files and CSV instance matrices.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ClassificationInstance, OrderingRegressionInstance, ProblemRecord, Timing, VariableRegressionInstance};
use crate::error::{Error, Result};
use crate::features::{embedding_header, feature_names};
use crate::polyset::{parse_polyset, VariableOrdering};

/// One line of a problems file. Timings may be absent before labelling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawProblem {
    pub id: String,
    pub source: String,
    pub nvars: usize,
    pub polys: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<VariableOrdering>,
}

impl RawProblem {
    pub fn from_record(r: &ProblemRecord) -> Self {
        RawProblem {
            id: r.id.clone(),
            source: r.source.clone(),
            nvars: r.nvars(),
            polys: r.set.to_string(),
            timings: Some(r.timings.clone()),
            timeout_limit: Some(r.timeout_limit),
            cells: r.cells.clone(),
            label: r.label.clone(),
        }
    }

    pub fn into_record(self) -> Result<ProblemRecord> {
        let set = parse_polyset(&self.polys, self.nvars)?;
        let timings = self.timings.ok_or_else(|| Error::Data(format!("record `{}` has no timings", self.id)))?;
        let limit = self
            .timeout_limit
            .ok_or_else(|| Error::Data(format!("record `{}` has no timeout_limit", self.id)))?;
        let mut r = ProblemRecord::new(self.id, self.source, set, timings, limit, self.cells)?;
        if let Some(label) = self.label {
            if label.nvars() != r.nvars() {
                return Err(Error::Data(format!("record `{}`: label has the wrong arity", r.id)));
            }
            r.label = Some(label);
        }
        Ok(r)
    }
}

pub fn read_raw_problems(path: &Path) -> Result<Vec<RawProblem>> {
    let file = fs::File::open(path)?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawProblem = serde_json::from_str(&line)
            .map_err(|e| Error::Data(format!("{}:{}: {e}", path.display(), n + 1)))?;
        out.push(raw);
    }
    Ok(out)
}

pub fn read_problems(path: &Path) -> Result<Vec<ProblemRecord>> {
    read_raw_problems(path)?.into_iter().map(RawProblem::into_record).collect()
}

pub fn write_raw_problems(path: &Path, problems: &[RawProblem]) -> Result<()> {
    let mut buf = Vec::new();
    for p in problems {
        serde_json::to_writer(&mut buf, p)?;
        buf.push(b'\n');
    }
    write_atomic(path, &buf)
}

pub fn write_problems(path: &Path, records: &[ProblemRecord]) -> Result<()> {
    let raw: Vec<RawProblem> = records.iter().map(RawProblem::from_record).collect();
    write_raw_problems(path, &raw)
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn num(x: f64) -> String {
    // `Display` for f64 is the shortest string that parses back to the same value.
    format!("{x}")
}

fn arity(first: Option<usize>) -> usize {
    first.unwrap_or(0) / crate::features::FEATURES_PER_VARIABLE
}

pub fn write_classification_csv(path: &Path, ids: &[String], inst: &[ClassificationInstance]) -> Result<()> {
    let mut header = vec!["id".to_string()];
    header.extend(embedding_header(arity(inst.first().map(|i| i.embedding.len()))));
    header.push("label".into());
    let rows = ids.iter().zip(inst).map(|(id, i)| {
        let mut row = vec![id.clone()];
        row.extend(i.embedding.values.iter().map(|&x| num(x)));
        row.push(i.label.to_string());
        row
    });
    write_atomic(path, &csv_bytes(header, rows)?)
}

pub fn write_ordering_csv(path: &Path, ids: &[String], inst: &[OrderingRegressionInstance]) -> Result<()> {
    let mut header = vec!["id".to_string(), "ordering".to_string()];
    header.extend(embedding_header(arity(inst.first().map(|i| i.embedding.len()))));
    header.push("target".into());
    let rows = ids.iter().zip(inst).map(|(id, i)| {
        let mut row = vec![id.clone(), i.ordering.to_string()];
        row.extend(i.embedding.values.iter().map(|&x| num(x)));
        row.push(num(i.target));
        row
    });
    write_atomic(path, &csv_bytes(header, rows)?)
}

pub fn write_variable_csv(path: &Path, ids: &[String], inst: &[VariableRegressionInstance]) -> Result<()> {
    let mut header = vec!["id".to_string(), "variable".to_string()];
    header.extend(feature_names());
    header.push("target".into());
    let rows = ids.iter().zip(inst).map(|(id, i)| {
        let mut row = vec![id.clone(), format!("x{}", i.features.variable + 1)];
        row.extend(i.features.values.iter().map(|&x| num(x)));
        row.push(num(i.target));
        row
    });
    write_atomic(path, &csv_bytes(header, rows)?)
}
