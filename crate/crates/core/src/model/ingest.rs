use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::data::{BinaryDataset, Covariate, CovariateKind, DataError};
use crate::numerics::{mean, std_dev};

/// How to turn a delimited text table into a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub response: String,
    /// Columns expanded into indicators; the first level in sort order is
    /// the reference.
    pub categorical: Vec<String>,
    /// Columns dropped before building the design matrix.
    pub ignore: Vec<String>,
    /// Center and scale every continuous covariate that is not already 0/1.
    pub standardize: bool,
    pub delimiter: u8,
}

impl IngestOptions {
    pub fn new(response: impl Into<String>) -> Self {
        IngestOptions {
            response: response.into(),
            categorical: Vec::new(),
            ignore: Vec::new(),
            standardize: false,
            delimiter: b',',
        }
    }
}

/// Indicator coding of one categorical column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalEncoding {
    pub variable: String,
    pub reference: String,
    pub levels: Vec<String>,
}

impl CategoricalEncoding {
    /// Recover the encodings recorded in a dataset's covariate metadata.
    pub fn from_dataset(data: &BinaryDataset) -> Vec<CategoricalEncoding> {
        let mut out: Vec<CategoricalEncoding> = Vec::new();
        for c in data.covariates() {
            if let CovariateKind::Indicator {
                variable,
                level,
                reference,
            } = &c.kind
            {
                match out.iter_mut().find(|e| &e.variable == variable) {
                    Some(e) => e.levels.push(level.clone()),
                    None => out.push(CategoricalEncoding {
                        variable: variable.clone(),
                        reference: reference.clone(),
                        levels: vec![reference.clone(), level.clone()],
                    }),
                }
            }
        }
        out
    }
}

pub fn read_dataset_path(path: &Path, opts: &IngestOptions) -> Result<BinaryDataset, DataError> {
    let file = std::fs::File::open(path)
        .map_err(|e| DataError::Io(format!("{}: {e}", path.display())))?;
    read_dataset(file, opts)
}

/// Parse a header-first delimited table. Lines starting with `#` are comments.
pub fn read_dataset<R: Read>(reader: R, opts: &IngestOptions) -> Result<BinaryDataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let response = find(&opts.response)?;
    for name in opts.categorical.iter().chain(&opts.ignore) {
        find(name)?;
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        for (j, v) in record.iter().enumerate() {
            cells[j].push(v.to_string());
        }
        lines.push(line);
    }
    if lines.is_empty() {
        return Err(DataError::Invalid("no data rows".into()));
    }

    let parse_error = |row: usize, col: usize, message: String| DataError::Parse {
        line: lines[row],
        column: col + 1,
        message,
    };
    let mut y = Vec::with_capacity(lines.len());
    for (i, v) in cells[response].iter().enumerate() {
        match v.parse::<f64>() {
            Ok(x) if x == 0.0 => y.push(false),
            Ok(x) if x == 1.0 => y.push(true),
            _ => {
                return Err(parse_error(
                    i,
                    response,
                    format!("response `{v}` is not 0 or 1"),
                ))
            }
        }
    }

    let mut columns = Vec::new();
    for (j, name) in header.iter().enumerate() {
        if j == response || opts.ignore.contains(name) {
            continue;
        }
        let values = &cells[j];
        if let Some(i) = values.iter().position(|v| v.is_empty()) {
            return Err(parse_error(i, j, format!("missing value in `{name}`")));
        }
        if opts.categorical.contains(name) {
            let levels = sorted_levels(values);
            if levels.len() < 2 {
                return Err(DataError::Invalid(format!(
                    "categorical column `{name}` has a single level"
                )));
            }
            for level in &levels[1..] {
                let cov = Covariate {
                    name: format!("{name}={level}"),
                    kind: CovariateKind::Indicator {
                        variable: name.clone(),
                        level: level.clone(),
                        reference: levels[0].clone(),
                    },
                };
                let col = values.iter().map(|v| f64::from(u8::from(v == level))).collect();
                columns.push((cov, col));
            }
            continue;
        }
        let mut col = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            match v.parse::<f64>() {
                Ok(x) if x.is_finite() => col.push(x),
                _ => return Err(parse_error(i, j, format!("`{v}` is not a finite number"))),
            }
        }
        let binary = col.iter().all(|&v| v == 0.0 || v == 1.0);
        let mut standardization = None;
        if opts.standardize && !binary {
            let (m, s) = (mean(&col), std_dev(&col));
            if s > 0.0 {
                col.iter_mut().for_each(|v| *v = (*v - m) / s);
                standardization = Some((m, s));
            }
        }
        columns.push((
            Covariate {
                name: name.clone(),
                kind: CovariateKind::Continuous { standardization },
            },
            col,
        ));
    }
    BinaryDataset::from_columns(y, columns)
}

/// Numeric levels sort by value, others lexicographically.
fn sorted_levels(values: &[String]) -> Vec<String> {
    let distinct: BTreeSet<&String> = values.iter().collect();
    let mut levels: Vec<String> = distinct.into_iter().cloned().collect();
    if levels.iter().all(|l| l.parse::<f64>().is_ok()) {
        levels.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    }
    levels
}

fn csv_error(e: csv::Error) -> DataError {
    let line = e.position().map_or(0, |p| p.line());
    match e.kind() {
        csv::ErrorKind::UnequalLengths { len, expected_len, .. } => DataError::Parse {
            line,
            column: (*len).min(*expected_len) as usize + 1,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        csv::ErrorKind::Io(err) => DataError::Io(err.to_string()),
        _ => DataError::Parse {
            line,
            column: 0,
            message: e.to_string(),
        },
    }
}

/// Write `y` followed by every non-intercept column, preceded by optional
/// `#` comment lines.
pub fn write_dataset<W: Write>(
    mut out: W,
    data: &BinaryDataset,
    comments: &[String],
) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let names = data.covariate_names();
    let mut header = vec!["y".to_string()];
    header.extend(names[1..].iter().cloned());
    writeln!(out, "{}", header.join(","))?;
    for i in 0..data.n() {
        let mut row = vec![u8::from(data.y()[i]).to_string()];
        row.extend((1..data.p()).map(|j| format!("{}", data.x()[(i, j)])));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
