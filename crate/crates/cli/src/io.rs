//! Instance files: CSV point lists and JSON instances.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use stepfit::geom::validate_points;
use stepfit::{CostModel, FitError, Point};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Line { line: u64, reason: String },
    #[error("invalid JSON instance: {0}")]
    Json(#[from] serde_json::Error),
    #[error("no points in input")]
    Empty,
    #[error(transparent)]
    Points(#[from] FitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` files are JSON, everything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub points: Vec<Point>,
    /// Step count, when the file carries one.
    pub k: Option<usize>,
    pub model: Option<CostModel>,
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    x: f64,
    y: f64,
    #[serde(default = "unit_weight")]
    w: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    points: Vec<PointRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<String>,
}

pub fn load_instance(path: &Path, format: Format) -> Result<Instance, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Read {
        path: path.display().to_string(),
        source,
    })?;
    match format {
        Format::Csv => parse_csv(&text),
        Format::Json => parse_json(&text),
    }
}

fn check_point(x: f64, y: f64, w: f64, line: u64) -> Result<(), LoadError> {
    let reason = if !(x.is_finite() && y.is_finite() && w.is_finite()) {
        "non-finite value".to_string()
    } else if w <= 0.0 {
        format!("weight {w} is not positive")
    } else {
        return Ok(());
    };
    Err(LoadError::Line { line, reason })
}

pub fn parse_csv(text: &str) -> Result<Instance, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| LoadError::Line {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.eq_ignore_ascii_case("x")) {
            continue;
        }
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if !(2..=3).contains(&rec.len()) {
            return Err(LoadError::Line {
                line,
                reason: format!("expected `x,y[,w]`, found {} fields", rec.len()),
            });
        }
        let num = |f: &str| {
            f64::from_str(f).map_err(|_| LoadError::Line {
                line,
                reason: format!("`{f}` is not a number"),
            })
        };
        let (x, y) = (num(&rec[0])?, num(&rec[1])?);
        let w = match rec.get(2) {
            Some(f) => num(f)?,
            None => 1.0,
        };
        check_point(x, y, w, line)?;
        points.push(Point::new(x, y, w, points.len()));
    }
    finish(points, None, None)
}

pub fn parse_json(text: &str) -> Result<Instance, LoadError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let model = file
        .model
        .map(|m| CostModel::from_str(&m))
        .transpose()
        .map_err(|e| LoadError::Json(serde::de::Error::custom(e)))?;
    let points = file
        .points
        .iter()
        .enumerate()
        .map(|(i, r)| Point::new(r.x, r.y, r.w, i))
        .collect();
    finish(points, file.k, model)
}

fn finish(
    points: Vec<Point>,
    k: Option<usize>,
    model: Option<CostModel>,
) -> Result<Instance, LoadError> {
    if points.is_empty() {
        return Err(LoadError::Empty);
    }
    validate_points(&points)?;
    Ok(Instance { points, k, model })
}

pub fn to_json(inst: &Instance) -> String {
    let file = InstanceFile {
        points: inst
            .points
            .iter()
            .map(|p| PointRecord {
                x: p.x,
                y: p.y,
                w: p.w,
            })
            .collect(),
        k: inst.k,
        model: inst.model.map(|m| m.to_string()),
    };
    serde_json::to_string_pretty(&file).expect("instance serializes")
}

/// CSV with an `x,y,w` header.
pub fn to_csv(points: &[Point]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "w"]).expect("in-memory write");
    for p in points {
        w.serialize((p.x, p.y, p.w)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}
