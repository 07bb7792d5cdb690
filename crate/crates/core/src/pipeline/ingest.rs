use std::path::Path;

use ndarray::Array2;

use super::RawDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which header columns to keep.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ColumnSelection {
    #[default]
    All,
    Named(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
}

/// Reads a comma-separated file with a header row. Rows with an empty or
/// NaN cell in any selected column are dropped and counted.
pub fn ingest_csv<T: Scalar>(
    path: impl AsRef<Path>,
    selection: &ColumnSelection,
) -> Result<(RawDataset<T>, IngestReport)> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Input(format!("{shown}: {e}")))?;
    let headers =
        reader.headers().map_err(|e| Error::Csv { path: shown.clone(), line: 1, message: e.to_string() })?.clone();
    let (indices, names): (Vec<usize>, Vec<String>) = match selection {
        ColumnSelection::All => headers.iter().enumerate().map(|(i, h)| (i, h.to_string())).unzip(),
        ColumnSelection::Named(wanted) => wanted
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h == name)
                    .map(|i| (i, name.clone()))
                    .ok_or_else(|| Error::Input(format!("{shown}: missing column {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip(),
    };

    let mut values: Vec<T> = Vec::new();
    let mut report = IngestReport::default();
    'rows: for record in reader.records() {
        let record = record.map_err(|e| Error::Csv {
            path: shown.clone(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        report.rows_read += 1;
        let line = record.position().map_or(0, |p| p.line());
        let start = values.len();
        for &i in &indices {
            let cell = record.get(i).unwrap_or("");
            if cell.is_empty() {
                values.truncate(start);
                report.rows_dropped += 1;
                continue 'rows;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Csv {
                path: shown.clone(),
                line,
                message: format!("cannot parse {cell:?} in column {:?} as a number", headers.get(i).unwrap_or("?")),
            })?;
            if v.is_nan() {
                values.truncate(start);
                report.rows_dropped += 1;
                continue 'rows;
            }
            values.push(T::lit(v));
        }
    }
    let kept = report.rows_read - report.rows_dropped;
    if kept == 0 {
        return Err(Error::Input(format!("{shown}: no data rows")));
    }
    let rows = Array2::from_shape_vec((kept, indices.len()), values).expect("row-major shape");
    Ok((RawDataset::new(rows, names)?, report))
}
