//! CSV ingestion and dataset/basis compatibility checks.

use std::io::Read;

use nalgebra::{DMatrix, DVector};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::types::Dataset;

/// Parses a CSV source with header `x1[,x2],y` into a [`Dataset`].
///
/// The domain defaults to the observed per-dimension range; pass
/// `domain` to override it.
pub fn load_dataset<R: Read>(source: R, domain: Option<Vec<(f64, f64)>>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);

    let x1 = find("x1").ok_or_else(|| Error::MissingColumn("x1".into()))?;
    let x2 = find("x2");
    let y = find("y").ok_or_else(|| Error::MissingColumn("y".into()))?;
    let dims = if x2.is_some() { 2 } else { 1 };

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |idx: usize, col: &str| -> Result<f64> {
            let cell = record.get(idx).ok_or_else(|| Error::NonNumeric {
                row: i,
                col: col.into(),
            })?;
            let v: f64 = cell.trim().parse().map_err(|_| Error::NonNumeric {
                row: i,
                col: col.into(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i,
                    col: col.into(),
                });
            }
            Ok(v)
        };
        xs.push(parse(x1, "x1")?);
        if let Some(x2) = x2 {
            xs.push(parse(x2, "x2")?);
        }
        ys.push(parse(y, "y")?);
    }
    if ys.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let n = ys.len();
    let xs = DMatrix::from_row_slice(n, dims, &xs);
    let ys = DVector::from_vec(ys);
    match domain {
        Some(domain) => Dataset::with_domain(xs, ys, domain),
        None => Dataset::new(xs, ys),
    }
}

/// Serializes a dataset back to the CSV schema accepted by
/// [`load_dataset`].
pub fn write_dataset<W: std::io::Write>(dataset: &Dataset, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    match dataset.dims() {
        1 => writer.write_record(["x1", "y"])?,
        _ => writer.write_record(["x1", "x2", "y"])?,
    }
    for i in 0..dataset.n() {
        let mut row: Vec<String> = (0..dataset.dims())
            .map(|d| format!("{}", dataset.xs()[(i, d)]))
            .collect();
        row.push(format!("{}", dataset.ys()[i]));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Checks that a dataset can be evaluated against a basis: dimensions
/// match and every design point lies inside the basis domain.
pub fn validate_compatibility(dataset: &Dataset, spec: &BasisSpec) -> Result<()> {
    if dataset.dims() != spec.dims() {
        return Err(Error::DimensionMismatch {
            dataset: dataset.dims(),
            basis: spec.dims(),
        });
    }
    for (i, row) in dataset.xs().row_iter().enumerate() {
        for (d, &(lo, hi)) in spec.domain().iter().enumerate() {
            if row[d] < lo || row[d] > hi {
                return Err(Error::OutOfDomain { index: i });
            }
        }
    }
    Ok(())
}
