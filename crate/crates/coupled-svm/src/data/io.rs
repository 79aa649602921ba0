//! Readers and writers for the libsvm text format and numeric CSV.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Dataset, Domain, LabeledSample};

/// How to read a data file. `label_column` and `has_header` only apply to
/// CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub label_column: usize,
    #[serde(default)]
    pub has_header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Libsvm,
    Csv,
}

impl FileSpec {
    pub fn libsvm(path: impl Into<PathBuf>) -> Self {
        FileSpec {
            path: path.into(),
            format: Format::Libsvm,
            label_column: 0,
            has_header: false,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, label_column: usize, has_header: bool) -> Self {
        FileSpec {
            path: path.into(),
            format: Format::Csv,
            label_column,
            has_header,
        }
    }
}

/// Raw rows before label encoding: (raw label, dense feature vector).
struct RawRecords {
    labels: Vec<f64>,
    rows: Vec<Vec<f64>>,
    dim: usize,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses one `idx:val` pair list into a sparse row. `line_no` is 1-based.
fn parse_libsvm_pairs(
    path: &Path,
    line_no: usize,
    tokens: &mut std::str::SplitWhitespace<'_>,
) -> Result<Vec<(usize, f64)>> {
    let mut pairs = Vec::new();
    for tok in tokens {
        let (idx, val) = tok.split_once(':').ok_or_else(|| {
            Error::parse(
                path,
                line_no,
                format!("expected 'index:value', got '{tok}'"),
            )
        })?;
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("invalid feature index '{idx}'")))?;
        if idx == 0 {
            return Err(Error::parse(path, line_no, "feature indices are 1-based"));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("invalid feature value '{val}'")))?;
        pairs.push((idx, val));
    }
    Ok(pairs)
}

fn parse_libsvm(path: &Path) -> Result<RawRecords> {
    let text = read_to_string(path)?;
    let mut labels = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut tokens = line.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue; // blank line
        };
        let label: f64 = label_tok
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("invalid label '{label_tok}'")))?;
        let pairs = parse_libsvm_pairs(path, line_no, &mut tokens)?;
        for &(idx, _) in &pairs {
            dim = dim.max(idx);
        }
        labels.push(label);
        sparse_rows.push(pairs);
    }
    if labels.is_empty() {
        return Err(Error::parse(path, 1, "empty file"));
    }
    let rows = sparse_rows
        .into_iter()
        .map(|pairs| {
            let mut row = vec![0.0; dim];
            for (idx, val) in pairs {
                row[idx - 1] = val;
            }
            row
        })
        .collect();
    Ok(RawRecords { labels, rows, dim })
}

fn parse_csv(path: &Path, label_column: usize, has_header: bool) -> Result<RawRecords> {
    let text = read_to_string(path)?;
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let skip = usize::from(has_header);
    for (i, line) in text.lines().enumerate().skip(skip) {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match width {
            None => {
                if label_column >= cells.len() {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!(
                            "label column {} out of range for {} columns",
                            label_column,
                            cells.len()
                        ),
                    ));
                }
                width = Some(cells.len());
            }
            Some(w) if w != cells.len() => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("ragged row: expected {} columns, found {}", w, cells.len()),
                ));
            }
            _ => {}
        }
        let mut label = 0.0;
        let mut row = Vec::with_capacity(cells.len() - 1);
        for (col, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                Error::parse(
                    path,
                    line_no,
                    format!("invalid number '{}' in column {}", cell.trim(), col),
                )
            })?;
            if col == label_column {
                label = value;
            } else {
                row.push(value);
            }
        }
        labels.push(label);
        rows.push(row);
    }
    if labels.is_empty() {
        return Err(Error::parse(path, 1, "empty file"));
    }
    let dim = rows[0].len();
    Ok(RawRecords { labels, rows, dim })
}

fn parse_file(spec: &FileSpec) -> Result<RawRecords> {
    match spec.format {
        Format::Libsvm => parse_libsvm(&spec.path),
        Format::Csv => parse_csv(&spec.path, spec.label_column, spec.has_header),
    }
}

/// Sorted distinct raw labels.
fn label_map(labels: &[f64]) -> Result<Vec<f64>> {
    let mut map: Vec<f64> = labels.to_vec();
    if map.iter().any(|l| !l.is_finite()) {
        return Err(Error::invalid("labels must be finite"));
    }
    map.sort_by(|a, b| a.partial_cmp(b).unwrap());
    map.dedup();
    Ok(map)
}

fn build_dataset(
    records: RawRecords,
    raw_labels: Vec<f64>,
    dim: usize,
    domain: Domain,
) -> Result<Dataset> {
    let samples = records
        .labels
        .iter()
        .zip(records.rows)
        .map(|(&raw, mut row)| {
            row.resize(dim, 0.0);
            let dense = raw_labels
                .iter()
                .position(|&l| l == raw)
                .expect("label map covers all raw labels");
            Ok(LabeledSample::new(row, dense, domain))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples, dim, raw_labels)
}

/// Loads a libsvm-format file (`label idx:val ...`, 1-based indices).
/// The dimension is the largest index seen; unobserved entries are zero.
pub fn load_libsvm(path: impl AsRef<Path>, domain: Domain) -> Result<Dataset> {
    let records = parse_libsvm(path.as_ref())?;
    let raw_labels = label_map(&records.labels)?;
    let dim = records.dim;
    build_dataset(records, raw_labels, dim, domain)
}

/// Loads a rectangular numeric CSV; every non-label column is a feature.
/// Raw labels are re-encoded to dense `0..K-1` in sorted order.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: usize,
    domain: Domain,
    has_header: bool,
) -> Result<Dataset> {
    let records = parse_csv(path.as_ref(), label_column, has_header)?;
    let raw_labels = label_map(&records.labels)?;
    let dim = records.dim;
    build_dataset(records, raw_labels, dim, domain)
}

/// Loads a source file and a target file with one shared label encoding and
/// one shared dimension (the max over both files), so the pair can be
/// trained together.
pub fn load_two_domains(source: &FileSpec, target: &FileSpec) -> Result<(Dataset, Dataset)> {
    let src = parse_file(source)?;
    let tgt = parse_file(target)?;
    let mut all_labels = src.labels.clone();
    all_labels.extend_from_slice(&tgt.labels);
    let raw_labels = label_map(&all_labels)?;
    let dim = src.dim.max(tgt.dim);
    let src_ds = build_dataset(src, raw_labels.clone(), dim, Domain::Source)?;
    let tgt_ds = build_dataset(tgt, raw_labels, dim, Domain::Target)?;
    Ok((src_ds, tgt_ds))
}

/// Reads label-less feature rows for prediction. Libsvm labels are parsed
/// and discarded; sparse rows are padded to `dim`. CSV rows must have
/// exactly `dim` columns. An empty file yields zero rows.
pub fn read_feature_rows(spec: &FileSpec, dim: usize) -> Result<Vec<Vec<f64>>> {
    let path = spec.path.as_path();
    let text = read_to_string(path)?;
    let mut rows = Vec::new();
    match spec.format {
        Format::Libsvm => {
            for (i, line) in text.lines().enumerate() {
                let line_no = i + 1;
                let mut tokens = line.split_whitespace();
                if tokens.next().is_none() {
                    continue;
                }
                let pairs = parse_libsvm_pairs(path, line_no, &mut tokens)?;
                let mut row = vec![0.0; dim];
                for (idx, val) in pairs {
                    if idx > dim {
                        return Err(Error::parse(
                            path,
                            line_no,
                            format!("feature index {idx} exceeds model dimension {dim}"),
                        ));
                    }
                    row[idx - 1] = val;
                }
                rows.push(row);
            }
        }
        Format::Csv => {
            let skip = usize::from(spec.has_header);
            for (i, line) in text.lines().enumerate().skip(skip) {
                let line_no = i + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let cells: Vec<&str> = line.split(',').collect();
                if cells.len() != dim {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("expected {} feature columns, found {}", dim, cells.len()),
                    ));
                }
                let row = cells
                    .iter()
                    .enumerate()
                    .map(|(col, cell)| {
                        cell.trim().parse().map_err(|_| {
                            Error::parse(
                                path,
                                line_no,
                                format!("invalid number '{}' in column {}", cell.trim(), col),
                            )
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Writes a dataset in libsvm format with raw labels. Zero entries are
/// skipped except the last index, which is always written so that the
/// dimension survives a reload.
pub fn save_libsvm(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let d = dataset.dim();
    for s in dataset.samples() {
        out.push_str(&format!("{}", dataset.raw_label_of(s.label)));
        for (j, &v) in s.features.iter().enumerate() {
            if v != 0.0 || j + 1 == d {
                out.push_str(&format!(" {}:{}", j + 1, v));
            }
        }
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}
