//! CSV readers and writers for point clouds, data matrices, diagrams, loss
//! traces, pseudotimes and labels, plus the whitespace edge-list format.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! emitted file reads back to bit-identical values. Infinity is written as
//! `inf`.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use toporeg_core::geometry::Point;
use toporeg_core::trajectory::CycleProjection;
use toporeg_core::{Graph, PersistenceDiagram, PersistencePair, TraceRow};

use crate::{Error, Result};

/// Shortest decimal text that parses back to exactly `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path: path.to_path_buf(), source },
        other => Error::Parse { path: path.to_path_buf(), line, message: format!("{other:?}") },
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

/// Reads a headed CSV, checking the header against `expected`, and returns
/// the records with their line numbers.
fn read_records(path: &Path, expected: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(|e| csv_err(path, e))?;
    let header = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if !expected.is_empty() && header.iter().collect::<Vec<_>>() != expected {
        return Err(parse_err(path, 1, format!("expected header `{}`, found `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        out.push((line, record));
    }
    Ok(out)
}

fn field_f64(path: &Path, line: u64, record: &csv::StringRecord, k: usize) -> Result<f64> {
    let text = record.get(k).ok_or_else(|| parse_err(path, line, format!("missing column {}", k + 1)))?;
    text.trim().parse::<f64>().map_err(|_| parse_err(path, line, format!("`{text}` is not a number")))
}

fn field_usize(path: &Path, line: u64, record: &csv::StringRecord, k: usize) -> Result<usize> {
    let text = record.get(k).ok_or_else(|| parse_err(path, line, format!("missing column {}", k + 1)))?;
    text.trim().parse::<usize>().map_err(|_| parse_err(path, line, format!("`{text}` is not a non-negative integer")))
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(|e| csv_err(path, e))?;
    writer.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        writer.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    writer.flush().map_err(io_err(path))
}

/// Point ids default to the row number when the cloud has none.
pub fn default_ids(n: usize) -> Vec<String> {
    (0..n).map(|k| k.to_string()).collect()
}

/// Points with ids, as read from or written to `id,x,y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    pub ids: Vec<String>,
    pub points: Vec<Point>,
}

pub fn read_points(path: &Path) -> Result<Points> {
    let mut ids = Vec::new();
    let mut points = Vec::new();
    for (line, r) in read_records(path, &["id", "x", "y"])? {
        ids.push(r.get(0).unwrap_or_default().to_string());
        points.push([field_f64(path, line, &r, 1)?, field_f64(path, line, &r, 2)?]);
    }
    Ok(Points { ids, points })
}

pub fn write_points(path: &Path, ids: &[String], points: &[Point]) -> Result<()> {
    write_csv(path, &["id", "x", "y"], ids.iter().zip(points).map(|(id, p)| vec![id.clone(), fmt_f64(p[0]), fmt_f64(p[1])]))
}

/// A data matrix with its feature names.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub features: Vec<String>,
    pub data: DMatrix<f64>,
}

pub fn feature_names(d: usize) -> Vec<String> {
    (0..d).map(|k| format!("x{k}")).collect()
}

pub fn read_matrix(path: &Path) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(|e| csv_err(path, e))?;
    let features: Vec<String> = reader.headers().map_err(|e| csv_err(path, e))?.iter().map(str::to_string).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != features.len() {
            return Err(parse_err(path, line, format!("expected {} fields, found {}", features.len(), record.len())));
        }
        for k in 0..record.len() {
            values.push(field_f64(path, line, &record, k)?);
        }
        rows += 1;
    }
    Ok(DataMatrix { data: DMatrix::from_row_slice(rows, features.len(), &values), features })
}

pub fn write_matrix(path: &Path, features: &[String], data: &DMatrix<f64>) -> Result<()> {
    let header: Vec<&str> = features.iter().map(String::as_str).collect();
    write_csv(path, &header, data.row_iter().map(|r| r.iter().map(|&v| fmt_f64(v)).collect()))
}

const DIAGRAM_HEADER: [&str; 5] = ["dim", "birth", "death", "birth_simplex", "death_simplex"];

/// Writes the given diagrams in order. Essential pairs get death `inf` and an
/// empty death simplex.
pub fn write_diagrams(path: &Path, diagrams: &[PersistenceDiagram]) -> Result<()> {
    let rows = diagrams.iter().flat_map(|d| d.pairs.iter()).map(|p| {
        vec![
            p.dimension.to_string(),
            fmt_f64(p.birth),
            fmt_f64(p.death),
            p.birth_simplex.to_string(),
            p.death_simplex.map(|s| s.to_string()).unwrap_or_default(),
        ]
    });
    write_csv(path, &DIAGRAM_HEADER, rows)
}

/// Diagrams of dimensions `0..=max(dim)` in file order.
pub fn read_diagrams(path: &Path) -> Result<Vec<PersistenceDiagram>> {
    let mut diagrams: Vec<PersistenceDiagram> = Vec::new();
    for (line, r) in read_records(path, &DIAGRAM_HEADER)? {
        let dimension = field_usize(path, line, &r, 0)?;
        let death_simplex = match r.get(4).map(str::trim) {
            None | Some("") => None,
            Some(_) => Some(field_usize(path, line, &r, 4)?),
        };
        let pair = PersistencePair {
            dimension,
            birth: field_f64(path, line, &r, 1)?,
            death: field_f64(path, line, &r, 2)?,
            birth_simplex: field_usize(path, line, &r, 3)?,
            death_simplex,
        };
        while diagrams.len() <= dimension {
            diagrams.push(PersistenceDiagram { dimension: diagrams.len(), pairs: Vec::new() });
        }
        diagrams[dimension].pairs.push(pair);
    }
    Ok(diagrams)
}

const TRACE_HEADER: [&str; 5] = ["epoch", "emb_loss", "topo_loss", "total_loss", "seconds"];

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    write_csv(
        path,
        &TRACE_HEADER,
        rows.iter().map(|r| vec![r.epoch.to_string(), fmt_f64(r.emb_loss), fmt_f64(r.topo_loss), fmt_f64(r.total_loss), fmt_f64(r.seconds)]),
    )
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    read_records(path, &TRACE_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            Ok(TraceRow {
                epoch: field_usize(path, line, &r, 0)?,
                emb_loss: field_f64(path, line, &r, 1)?,
                topo_loss: field_f64(path, line, &r, 2)?,
                total_loss: field_f64(path, line, &r, 3)?,
                seconds: field_f64(path, line, &r, 4)?,
            })
        })
        .collect()
}

/// One row of a pseudotime file.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudotimeRow {
    pub id: String,
    pub pseudotime: f64,
    pub segment: usize,
    pub arc_position: f64,
}

const PSEUDOTIME_HEADER: [&str; 4] = ["id", "pseudotime", "segment", "arc_position"];

pub fn pseudotime_rows(ids: &[String], projection: &CycleProjection) -> Vec<PseudotimeRow> {
    ids.iter()
        .zip(projection.pseudotimes())
        .zip(&projection.positions)
        .map(|((id, t), pos)| PseudotimeRow { id: id.clone(), pseudotime: t, segment: pos.segment, arc_position: pos.arc_position })
        .collect()
}

pub fn write_pseudotime(path: &Path, rows: &[PseudotimeRow]) -> Result<()> {
    write_csv(
        path,
        &PSEUDOTIME_HEADER,
        rows.iter().map(|r| vec![r.id.clone(), fmt_f64(r.pseudotime), r.segment.to_string(), fmt_f64(r.arc_position)]),
    )
}

pub fn read_pseudotime(path: &Path) -> Result<Vec<PseudotimeRow>> {
    read_records(path, &PSEUDOTIME_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            Ok(PseudotimeRow {
                id: r.get(0).unwrap_or_default().to_string(),
                pseudotime: field_f64(path, line, &r, 1)?,
                segment: field_usize(path, line, &r, 2)?,
                arc_position: field_f64(path, line, &r, 3)?,
            })
        })
        .collect()
}

/// Labels keyed by point id, as `id,label`.
pub fn write_labels(path: &Path, ids: &[String], labels: &[usize]) -> Result<()> {
    write_csv(path, &["id", "label"], ids.iter().zip(labels).map(|(id, l)| vec![id.clone(), l.to_string()]))
}

pub fn read_labels(path: &Path) -> Result<Vec<(String, usize)>> {
    read_records(path, &["id", "label"])?
        .into_iter()
        .map(|(line, r)| Ok((r.get(0).unwrap_or_default().to_string(), field_usize(path, line, &r, 1)?)))
        .collect()
}

/// Labels aligned with `ids`; ids without a label are an error.
pub fn align_labels(path: &Path, ids: &[String], labels: &[(String, usize)]) -> Result<Vec<usize>> {
    let map: HashMap<&str, usize> = labels.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    ids.iter().map(|id| map.get(id.as_str()).copied().ok_or_else(|| parse_err(path, 0, format!("no label for id `{id}`")))).collect()
}

/// A graph read from an edge list, with node names in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedGraph {
    pub graph: Graph,
    pub names: Vec<String>,
}

/// Parses `u v` pairs, one per line, separated by whitespace. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_edge_list(path: &Path, text: &str) -> Result<NamedGraph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut id = |name: &str, names: &mut Vec<String>| {
        *index.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        })
    };
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(path, k as u64 + 1, format!("expected `u v`, found `{line}`")));
        }
        let u = id(fields[0], &mut names);
        let v = id(fields[1], &mut names);
        edges.push((u, v));
    }
    let graph = Graph::new(names.len(), edges)?;
    Ok(NamedGraph { graph, names })
}

pub fn read_edge_list(path: &Path) -> Result<NamedGraph> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_edge_list(path, &text)
}

pub fn write_edge_list(path: &Path, names: &[String], graph: &Graph) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    for e in graph.edges() {
        writeln!(file, "{} {}", names[e[0]], names[e[1]]).map_err(io_err(path))?;
    }
    Ok(())
}

/// Writes a plain-text file, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}
