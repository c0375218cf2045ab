//! Dataset ingestion for the three supported schemas.

use super::config::DatasetSchema;
use crate::error::{Error, Result};
use crate::sample::FullSample;
use ndarray::Array2;
use std::path::Path;

/// Loads a dataset file under the given schema.
///
/// * `voting`: label first (`democrat` → +1, `republican` → −1), then 16
///   categorical attributes `y` → +1, `n` → −1, `?` → 0. Not standardized.
/// * `pima`: 8 numeric attributes then a 0/1 label (1 → +1, 0 → −1; ±1
///   also accepted). Features are z-scored.
/// * `generic-csv`: numeric feature columns with a trailing ±1 label
///   column. Features are z-scored.
///
/// Malformed rows report their 1-based line number; z-scoring maps a
/// constant column to all zeros (it carries no information).
pub fn load_dataset(path: &Path, schema: DatasetSchema) -> Result<FullSample> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<i8> = Vec::new();
    let mut width: Option<usize> = None;
    for record in reader.records() {
        let record = record.map_err(|e| Error::ParseError {
            line: e
                .position()
                .map_or(rows.len() + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record
            .position()
            .map_or(rows.len() + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue; // blank line
        }
        let (features, label) = match schema {
            DatasetSchema::Voting => parse_voting_row(&record, line)?,
            DatasetSchema::Pima => parse_numeric_row(&record, line, Some(8), true)?,
            DatasetSchema::GenericCsv => parse_numeric_row(&record, line, None, false)?,
        };
        match width {
            None => width = Some(features.len()),
            Some(w) if w != features.len() => {
                return Err(Error::ParseError {
                    line,
                    message: format!("expected {w} feature columns, found {}", features.len()),
                })
            }
            Some(_) => {}
        }
        rows.push(features);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::ParseError {
            line: 1,
            message: "dataset is empty".into(),
        });
    }
    let width = width.unwrap();
    if width == 0 {
        return Err(Error::ParseError {
            line: 1,
            message: "rows contain a label but no features".into(),
        });
    }
    let mut features = Array2::zeros((rows.len(), width));
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            features[(i, j)] = x;
        }
    }
    if schema.standardized() {
        standardize(&mut features);
    }
    FullSample::new(features, labels)
}

fn parse_voting_row(record: &csv::StringRecord, line: usize) -> Result<(Vec<f64>, i8)> {
    if record.len() != 17 {
        return Err(Error::ParseError {
            line,
            message: format!("expected 17 fields (label + 16 votes), found {}", record.len()),
        });
    }
    let label = match &record[0] {
        "democrat" => 1,
        "republican" => -1,
        other => {
            return Err(Error::InvalidLabel {
                line,
                value: other.to_string(),
            })
        }
    };
    let mut features = Vec::with_capacity(16);
    for field in record.iter().skip(1) {
        features.push(match field {
            "y" => 1.0,
            "n" => -1.0,
            "?" => 0.0,
            other => {
                return Err(Error::ParseError {
                    line,
                    message: format!("vote must be y, n, or ?, found {other:?}"),
                })
            }
        });
    }
    Ok((features, label))
}

fn parse_numeric_row(
    record: &csv::StringRecord,
    line: usize,
    expected_features: Option<usize>,
    zero_is_negative: bool,
) -> Result<(Vec<f64>, i8)> {
    if record.len() < 2 {
        return Err(Error::ParseError {
            line,
            message: "need at least one feature column and a label".into(),
        });
    }
    if let Some(w) = expected_features {
        if record.len() != w + 1 {
            return Err(Error::ParseError {
                line,
                message: format!("expected {} fields, found {}", w + 1, record.len()),
            });
        }
    }
    let last = record.len() - 1;
    let mut features = Vec::with_capacity(last);
    for (j, field) in record.iter().take(last).enumerate() {
        let x: f64 = field.parse().map_err(|_| Error::ParseError {
            line,
            message: format!("column {} is not numeric: {field:?}", j + 1),
        })?;
        if !x.is_finite() {
            return Err(Error::ParseError {
                line,
                message: format!("column {} is not finite: {field:?}", j + 1),
            });
        }
        features.push(x);
    }
    let raw = &record[last];
    let value: f64 = raw.parse().map_err(|_| Error::InvalidLabel {
        line,
        value: raw.to_string(),
    })?;
    let label = if value == 1.0 {
        1
    } else if value == -1.0 || (zero_is_negative && value == 0.0) {
        -1
    } else {
        return Err(Error::InvalidLabel {
            line,
            value: raw.to_string(),
        });
    };
    Ok((features, label))
}

/// In-place per-column z-scoring (population standard deviation). Constant
/// columns become all zeros.
pub fn standardize(features: &mut Array2<f64>) {
    let n = features.nrows();
    if n == 0 {
        return;
    }
    for mut col in features.columns_mut() {
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
        col.mapv_inplace(|x| (x - mean) * scale);
    }
}
