//! Field dumps.
//!
//! One row per `(t, grid point)`, time-major, grid points in
//! [`SpatialDomain::grid_points`] order. Columns: `t, x1[, x2], lapse`,
//! the upper triangle of the spatial form row by row (`g11[, g12, g22]`)
//! and optionally `factor`. Every value is written with 17 significant
//! digits, so re-import is bit-exact.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::geometry::{GeometryError, MetricField, MetricGrid, ScalarField, SpatialDomain};

#[derive(Debug, Clone, PartialEq)]
pub struct FormatError {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for FormatError {}

pub fn header(dim: usize, with_factor: bool) -> Vec<&'static str> {
    let mut h = vec!["t", "x1"];
    if dim == 2 {
        h.push("x2");
    }
    h.push("lapse");
    if dim == 1 {
        h.push("g11");
    } else {
        h.extend(["g11", "g12", "g22"]);
    }
    if with_factor {
        h.push("factor");
    }
    h
}

/// Renders the dump of `m` (and `factor`) at `times`.
pub fn render(m: &MetricField, factor: Option<&ScalarField>, times: &[f64]) -> Result<String, GeometryError> {
    let domain = m.domain();
    let dim = domain.dim();
    let points = domain.grid_points();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| GeometryError::Shape(format!("csv encoding failed: {e}"));
    w.write_record(header(dim, factor.is_some())).map_err(io)?;
    let mut row = Vec::with_capacity(8);
    for &t in times {
        for &x in &points {
            let s = m.eval(t, x)?;
            row.clear();
            row.extend([t, x[0]]);
            if dim == 2 {
                row.push(x[1]);
            }
            row.push(s.lapse);
            row.extend(s.spatial.upper());
            if let Some(f) = factor {
                row.push(f.eval(t, x)?);
            }
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| GeometryError::Shape(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// Entry of an output manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExportedFile {
    pub kind: String,
    /// File name relative to the output directory.
    pub file: String,
    pub rows: usize,
    pub columns: Vec<String>,
}

/// Renders and writes a dump; returns its manifest entry.
pub fn export_fields(
    m: &MetricField,
    factor: Option<&ScalarField>,
    times: &[f64],
    path: &Path,
) -> Result<ExportedFile, ExportError> {
    let text = render(m, factor, times)?;
    write_atomic(path, text.as_bytes()).map_err(|e| ExportError::Io(path.display().to_string(), e.to_string()))?;
    Ok(ExportedFile {
        kind: "metric_csv".into(),
        file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        rows: times.len() * m.domain().num_points(),
        columns: header(m.dim(), factor.is_some()).into_iter().map(String::from).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cannot write {0}: {1}")]
    Io(String, String),
}

/// A parsed dump.
#[derive(Debug, Clone)]
pub struct Dump {
    pub grid: MetricGrid,
    /// Factor column in row order, if present.
    pub factor: Option<Vec<f64>>,
}

/// Parses a dump over `domain`, checking the header, node coordinates,
/// the time-major layout and completeness of the last time block.
pub fn parse_dump(text: &str, domain: &SpatialDomain) -> Result<Dump, FormatError> {
    let err = |line: usize, message: String| FormatError { line, message };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let line_of = |r: &csv::StringRecord| r.position().map_or(0, |p| p.line() as usize);
    let decode = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        err(line, e.to_string())
    };
    let head = match records.next() {
        Some(r) => r.map_err(decode)?,
        None => return Err(err(1, "empty file".into())),
    };
    let dim = domain.dim();
    let columns: Vec<&str> = head.iter().collect();
    let with_factor = if columns == header(dim, true) {
        true
    } else if columns == header(dim, false) {
        false
    } else {
        return Err(err(
            1,
            format!(
                "header `{}` does not match `{}` for a {dim}-dimensional domain",
                columns.join(","),
                header(dim, false).join(",")
            ),
        ));
    };
    let ncols = columns.len();
    let ncomp = 1 + dim * (dim + 1) / 2;
    let points = domain.grid_points();
    let npts = points.len();

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut factor = Vec::new();
    let mut row = 0usize;
    let mut last_line = 1;
    for record in records {
        let record = record.map_err(decode)?;
        let n = line_of(&record);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        last_line = n;
        if record.len() != ncols {
            return Err(err(n, format!("expected {ncols} columns, found {}", record.len())));
        }
        let mut nums = Vec::with_capacity(ncols);
        for (c, f) in record.iter().enumerate() {
            let v: f64 = f
                .parse()
                .map_err(|_| err(n, format!("column `{}`: `{f}` is not a number", columns[c])))?;
            if !v.is_finite() {
                return Err(err(n, format!("column `{}` is not finite", columns[c])));
            }
            nums.push(v);
        }
        let p = row % npts;
        let t = nums[0];
        if p == 0 {
            if let Some(&prev) = times.last() {
                if !(t > prev) {
                    return Err(err(n, format!("time {t} does not increase past {prev}")));
                }
            }
            times.push(t);
        } else if t != *times.last().unwrap() {
            return Err(err(n, format!("time {t} changes in the middle of a block of {npts} grid points")));
        }
        let x = points[p];
        if nums[1] != x[0] || (dim == 2 && nums[2] != x[1]) {
            return Err(err(n, format!("expected grid point {:?}, found {:?}", &x[..dim], &nums[1..1 + dim])));
        }
        values.extend_from_slice(&nums[1 + dim..1 + dim + ncomp]);
        if with_factor {
            factor.push(nums[ncols - 1]);
        }
        row += 1;
    }
    if row == 0 {
        return Err(err(last_line + 1, "no data rows".into()));
    }
    if row % npts != 0 {
        return Err(err(
            last_line + 1,
            format!("truncated: last time block has {} of {npts} grid points", row % npts),
        ));
    }
    let grid = MetricGrid::new(domain.clone(), times, values).map_err(|e| err(last_line, e.to_string()))?;
    Ok(Dump {
        grid,
        factor: with_factor.then_some(factor),
    })
}

pub fn read_dump(path: &Path, domain: &SpatialDomain) -> Result<Dump, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_dump(&text, domain)
}
