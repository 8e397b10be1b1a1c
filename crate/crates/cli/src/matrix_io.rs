//! Matrix files: CSV (one row per line) or JSON, either
//! `{"dim": 2n, "matrix": [[...], ...]}` or `{"matrices": [ ... ]}`.

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest accepted matrix dimension.
pub const MAX_DIM: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub dim: usize,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixFile {
    Many { matrices: Vec<MatrixEntry> },
    One(MatrixEntry),
}

impl MatrixEntry {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self {
            dim: m.nrows(),
            matrix: rows_of(m),
        }
    }
}

pub fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// A matrix read from one input, with its origin for error messages.
pub struct Loaded {
    pub source: String,
    pub matrix: DMatrix<f64>,
}

/// Reads every matrix in `path` (`-` is standard input). The format comes
/// from `format`, else the file extension, else the first non-blank byte.
pub fn load(path: &str, format: Option<Format>) -> Result<Vec<Loaded>, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?
    };
    let format = format
        .or_else(
            || match Path::new(path).extension().and_then(|e| e.to_str()) {
                Some("csv") => Some(Format::Csv),
                Some("json") => Some(Format::Json),
                _ => None,
            },
        )
        .unwrap_or_else(|| {
            if text.trim_start().starts_with('{') {
                Format::Json
            } else {
                Format::Csv
            }
        });
    let parse_err = |msg: String| CliError::Parse(format!("{path}: {msg}"));
    let rows = match format {
        Format::Csv => vec![parse_csv(&text).map_err(parse_err)?],
        Format::Json => parse_json(&text).map_err(parse_err)?,
    };
    rows.into_iter()
        .enumerate()
        .map(|(i, (declared, rows))| {
            let source = format!("{path}#{i}");
            let matrix =
                to_matrix(declared, rows).map_err(|e| CliError::Parse(format!("{source}: {e}")))?;
            Ok(Loaded { source, matrix })
        })
        .collect()
}

fn parse_csv(text: &str) -> Result<(Option<usize>, Vec<Vec<f64>>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| format!("row {}: cannot parse {field:?} as a number", line + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((None, rows))
}

type Parsed = Vec<(Option<usize>, Vec<Vec<f64>>)>;

fn parse_json(text: &str) -> Result<Parsed, String> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let entries = match file {
        MatrixFile::One(e) => vec![e],
        MatrixFile::Many { matrices } => matrices,
    };
    if entries.is_empty() {
        return Err("no matrices in file".into());
    }
    Ok(entries
        .into_iter()
        .map(|e| (Some(e.dim), e.matrix))
        .collect())
}

fn to_matrix(declared: Option<usize>, rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>, String> {
    let dim = rows.len();
    if dim == 0 {
        return Err("empty matrix".into());
    }
    if let Some(d) = declared {
        if d != dim {
            return Err(format!("declared dim {d} but found {dim} rows"));
        }
    }
    if dim > MAX_DIM {
        return Err(format!(
            "dimension {dim} exceeds the supported maximum of {MAX_DIM}"
        ));
    }
    if !dim.is_multiple_of(2) {
        return Err(format!("dimension {dim} is odd; expected 2n"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(format!(
            "row {} has {} entries, expected {dim}",
            i + 1,
            r.len()
        ));
    }
    Ok(DMatrix::from_row_iterator(
        dim,
        dim,
        rows.into_iter().flatten(),
    ))
}

/// Serializes matrices in the requested format. CSV holds a single matrix.
pub fn render(matrices: &[DMatrix<f64>], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let file = match matrices {
                [one] => MatrixFile::One(MatrixEntry::from_matrix(one)),
                many => MatrixFile::Many {
                    matrices: many.iter().map(MatrixEntry::from_matrix).collect(),
                },
            };
            serde_json::to_string_pretty(&file).map_err(|e| CliError::Io(e.to_string()))
        }
        Format::Csv => match matrices {
            [one] => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in one.row_iter() {
                    w.write_record(row.iter().map(|x| format!("{x:?}")))
                        .map_err(|e| CliError::Io(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
            }
            _ => Err(CliError::Usage(
                "CSV output holds one matrix; use --format json for families".into(),
            )),
        },
    }
}
