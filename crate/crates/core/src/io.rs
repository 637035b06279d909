//! File formats: space files (JSON), sample and vector CSVs, set-sequence files.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distfn::DistributionFn;
use crate::error::{Error, Result};
use crate::pmspace::PMSpace;
use crate::triangle::TriangleFn;

/// A matrix entry: an inline distribution function, or the path of a JSON
/// file holding one, relative to the space file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Inline(DistributionFn),
    File(String),
}

/// The on-disk form of a PM space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub tau: TriangleFn,
    pub dist: Vec<Vec<Entry>>,
}

/// A space file with every entry resolved, not yet validated.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSpace {
    pub points: Vec<String>,
    pub tau: TriangleFn,
    pub dist: Vec<Vec<DistributionFn>>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_space(path: &Path) -> Result<RawSpace> {
    let file: SpaceFile = parse_json(&read(path)?, path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut cache: HashMap<String, DistributionFn> = HashMap::new();
    let mut dist = Vec::with_capacity(file.dist.len());
    for row in file.dist {
        let mut out = Vec::with_capacity(row.len());
        for entry in row {
            out.push(match entry {
                Entry::Inline(f) => f,
                Entry::File(rel) => {
                    if let Some(f) = cache.get(&rel) {
                        f.clone()
                    } else {
                        let target = dir.join(&rel);
                        let f: DistributionFn = parse_json(&read(&target)?, &target)?;
                        cache.insert(rel, f.clone());
                        f
                    }
                }
            });
        }
        dist.push(out);
    }
    Ok(RawSpace { points: file.points, tau: file.tau, dist })
}

/// Serializes a space with inline entries.
pub fn space_to_json(space: &PMSpace) -> String {
    let file = SpaceFile {
        points: space.labels().to_vec(),
        tau: space.tau(),
        dist: space.matrix().iter().map(|row| row.iter().cloned().map(Entry::Inline).collect()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("space files serialize");
    text.push('\n');
    text
}

pub fn write_space(path: &Path, space: &PMSpace) -> Result<()> {
    fs::write(path, space_to_json(space)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Labels in order of first appearance and, per label, the samples ordered
/// by `sample_index`.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub labels: Vec<String>,
    pub samples: Vec<Vec<Vec<f64>>>,
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

/// Reads `label,sample_index,coord_0,…,coord_{d-1}` rows. Every label must
/// carry the indices `0..N` exactly once, with the same `N` for all labels.
pub fn read_samples_csv(path: &Path) -> Result<Samples> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let dim = headers.len().saturating_sub(2);
    let expected: Vec<String> =
        ["label".to_string(), "sample_index".to_string()].into_iter().chain((0..dim).map(|k| format!("coord_{k}"))).collect();
    if dim == 0 || headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(csv_error(path, format!("header must be {}", expected.join(","))));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<(usize, Vec<f64>)>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let at = |what: &str| csv_error(path, format!("row {}: {what}", line + 2));
        let label = record[0].to_string();
        let index: usize = record[1].parse().map_err(|_| at("sample_index must be a nonnegative integer"))?;
        let coords = (2..record.len())
            .map(|k| record[k].parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| at("coordinates must be finite numbers"))?;
        let slot = match labels.iter().position(|l| *l == label) {
            Some(i) => i,
            None => {
                labels.push(label);
                rows.push(Vec::new());
                labels.len() - 1
            }
        };
        rows[slot].push((index, coords));
    }
    if labels.is_empty() {
        return Err(csv_error(path, "no samples"));
    }
    let count = rows[0].len();
    let mut samples = Vec::with_capacity(rows.len());
    for (label, mut list) in labels.iter().zip(rows) {
        if list.len() != count {
            return Err(Error::LengthMismatch(format!("label {label} has {} samples, expected {count}", list.len())));
        }
        list.sort_by_key(|(i, _)| *i);
        if list.iter().enumerate().any(|(k, (i, _))| k != *i) {
            return Err(Error::LengthMismatch(format!("label {label} must use sample indices 0..{count} exactly once")));
        }
        samples.push(list.into_iter().map(|(_, v)| v).collect());
    }
    Ok(Samples { labels, samples })
}

/// Reads headerless CSV rows of coordinates; rows may differ in length.
pub fn read_vectors_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record
            .iter()
            .map(|x| x.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| csv_error(path, "coordinates must be finite numbers"))?;
        out.push(row);
    }
    Ok(out)
}

/// A JSON array of sets, each an array of point labels.
pub fn read_sets(path: &Path) -> Result<Vec<Vec<String>>> {
    parse_json(&read(path)?, path)
}
