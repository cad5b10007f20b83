//! CSV ingestion for regression data.

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::CliError;

/// Parses a headed CSV into a response vector, a predictor matrix, and the
/// predictor column names (in file order). Every cell must be a finite
/// number; the response column is removed from the predictors.
pub fn read_csv_regression(
    path: &Path,
    response_column: &str,
) -> Result<(DVector<f64>, DMatrix<f64>, Vec<String>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;

    let headers: Vec<String> =
        reader.headers().map_err(|e| CliError::Data(format!("bad header: {e}")))?.iter().map(String::from).collect();

    let mut seen = BTreeSet::new();
    for name in &headers {
        if !seen.insert(name.as_str()) {
            return Err(CliError::Data(format!("duplicate header column '{name}'")));
        }
    }
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| CliError::Data(format!("response column '{response_column}' not found")))?;
    if headers.len() < 2 {
        return Err(CliError::Data("file has no predictor columns".into()));
    }

    let predictor_idx: Vec<usize> =
        (0..headers.len()).filter(|&j| j != response_idx).collect();
    let names: Vec<String> = predictor_idx.iter().map(|&j| headers[j].clone()).collect();

    let mut y = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("row {}: {e}", i + 1)))?;
        let parse = |j: usize| -> Result<f64, CliError> {
            let cell = record.get(j).ok_or_else(|| {
                CliError::Data(format!("row {} is missing column '{}'", i + 1, headers[j]))
            })?;
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Data(format!(
                    "row {} column '{}': '{}' is not a number",
                    i + 1,
                    headers[j],
                    cell
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::Data(format!(
                    "row {} column '{}': value is not finite",
                    i + 1,
                    headers[j]
                )));
            }
            Ok(v)
        };
        y.push(parse(response_idx)?);
        rows.push(predictor_idx.iter().map(|&j| parse(j)).collect::<Result<_, _>>()?);
    }
    if y.is_empty() {
        return Err(CliError::Data("file has a header but no data rows".into()));
    }

    let n = y.len();
    let p = names.len();
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    Ok((DVector::from_vec(y), x, names))
}
