//! Comma-separated datasets: one point per line, optional trailing label.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use kmsketch_core::datagen::Dataset;
use kmsketch_core::Matrix;

use crate::{Error, Result};

/// Reads a headerless CSV; see [`load_csv_with`].
pub fn load_csv(path: impl AsRef<Path>, has_labels: bool) -> Result<Dataset> {
    load_csv_with(path, has_labels, false)
}

/// Reads a numeric CSV. When `has_labels`, the last column holds zero-based
/// integer labels and `k` becomes `max label + 1`; otherwise `k` is 0 and
/// must be supplied by the caller.
pub fn load_csv_with(path: impl AsRef<Path>, has_labels: bool, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |line: u64, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let fields = record.len();
        let features = if has_labels { fields.saturating_sub(1) } else { fields };
        if features == 0 {
            return Err(parse_err(line, "no feature columns".into()));
        }
        match width {
            None => width = Some(fields),
            Some(w) if w != fields => {
                return Err(parse_err(line, format!("expected {w} fields, found {fields}")));
            }
            Some(_) => {}
        }
        for (j, cell) in record.iter().enumerate() {
            if has_labels && j == features {
                let label = cell.parse::<usize>().map_err(|_| parse_err(line, format!("bad label `{cell}`")))?;
                labels.push(label);
            } else {
                let x = cell.parse::<f64>().map_err(|_| parse_err(line, format!("non-numeric cell `{cell}`")))?;
                if !x.is_finite() {
                    return Err(parse_err(line, format!("non-finite cell `{cell}`")));
                }
                data.push(x);
            }
        }
        rows += 1;
    }
    let Some(fields) = width else {
        return Err(parse_err(1, "empty file".into()));
    };
    let cols = if has_labels { fields - 1 } else { fields };
    let points = Matrix::new(rows, cols, data)?;
    let (labels, k) = if has_labels {
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        (Some(labels), k)
    } else {
        (None, 0)
    };
    Ok(Dataset::new(points, labels, k)?)
}

/// Writes a headerless CSV; see [`save_csv_with`].
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    save_csv_with(ds, path, false)
}

/// One line per point with 17 significant digits, labels last when present.
/// The optional header names columns `x0, x1, …` and `label`.
pub fn save_csv_with(ds: &Dataset, path: impl AsRef<Path>, header: bool) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(ds, BufWriter::new(file), header).map_err(|e| Error::io(path, e))
}

fn write_dataset(ds: &Dataset, mut out: impl Write, header: bool) -> std::io::Result<()> {
    let (m, n) = ds.points.shape();
    if header {
        let names: Vec<String> = (0..n).map(|j| format!("x{j}")).collect();
        write!(out, "{}", names.join(","))?;
        if ds.labels.is_some() {
            write!(out, ",label")?;
        }
        writeln!(out)?;
    }
    for i in 0..m {
        for (j, x) in ds.points.row(i).iter().enumerate() {
            if j > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{}", format_scalar(*x))?;
        }
        if let Some(labels) = &ds.labels {
            write!(out, ",{}", labels[i])?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Scientific notation with 17 significant digits; parses back bit-exactly.
pub fn format_scalar(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a bare matrix (no labels) in the dataset format.
pub fn save_matrix(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let ds = Dataset { points: m.clone(), labels: None, k: 0 };
    save_csv(&ds, path)
}
