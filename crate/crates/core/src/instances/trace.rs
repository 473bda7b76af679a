//! Intensity traces (`timestamp,id,intensity` rows) turned into cost sequences.
//! Each distinct id is a dimension, each distinct timestamp a step, both in order
//! of first appearance. A header row is detected and skipped.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CflError, Result};
use crate::model::{validate_instance, Instance, Setting};

/// Affine map from trace intensities onto `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub source_min: f64,
    pub source_max: f64,
    pub lower: f64,
    pub upper: f64,
}

impl AffineMap {
    /// A constant source maps to `lower`.
    pub fn apply(&self, v: f64) -> f64 {
        let span = self.source_max - self.source_min;
        if span <= 0.0 {
            return self.lower;
        }
        if v == self.source_max {
            return self.upper;
        }
        self.lower + (v - self.source_min) / span * (self.upper - self.lower)
    }
}

#[derive(Debug, Clone)]
pub struct TraceInstance {
    pub instance: Instance,
    pub map: AffineMap,
    /// Source id behind each dimension.
    pub ids: Vec<String>,
    /// Source timestamp behind each step.
    pub timestamps: Vec<String>,
}

/// Builds an instance with the given shape (dimension, horizon, bounds and
/// weights from `shape`) from the first `T` timestamps and first `d` ids.
pub fn ingest_trace<R: Read>(reader: R, shape: &Setting) -> Result<TraceInstance> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut ids: Vec<String> = Vec::new();
    let mut id_pos: HashMap<String, usize> = HashMap::new();
    let mut stamps: Vec<String> = Vec::new();
    let mut stamp_pos: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != 3 {
            return Err(CflError::Parse {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let value = match rec[2].parse::<f64>() {
            Ok(v) => v,
            Err(_) if k == 0 => continue,
            Err(e) => {
                return Err(CflError::Parse {
                    line,
                    message: format!("bad intensity {:?}: {e}", &rec[2]),
                })
            }
        };
        if !(value >= 0.0 && value.is_finite()) {
            return Err(CflError::Parse {
                line,
                message: format!("intensity must be finite and non-negative, got {value}"),
            });
        }
        let s = *stamp_pos.entry(rec[0].to_string()).or_insert_with(|| {
            stamps.push(rec[0].to_string());
            stamps.len() - 1
        });
        let i = *id_pos.entry(rec[1].to_string()).or_insert_with(|| {
            ids.push(rec[1].to_string());
            ids.len() - 1
        });
        if cells.insert((s, i), value).is_some() {
            return Err(CflError::Parse {
                line,
                message: format!("duplicate reading for ({}, {})", &rec[0], &rec[1]),
            });
        }
    }

    let (d, horizon) = (shape.d(), shape.horizon);
    if ids.len() < d {
        return Err(CflError::Shape(format!("trace has {} ids, need {d}", ids.len())));
    }
    if stamps.len() < horizon {
        return Err(CflError::Shape(format!(
            "trace has {} timestamps, need {horizon}",
            stamps.len()
        )));
    }
    let mut raw = vec![vec![0.0; d]; horizon];
    for (s, row) in raw.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            *v = *cells.get(&(s, i)).ok_or_else(|| {
                CflError::Shape(format!("no reading for id {} at {}", ids[i], stamps[s]))
            })?;
        }
    }
    let flat = raw.iter().flatten();
    let map = AffineMap {
        source_min: flat.clone().copied().fold(f64::INFINITY, f64::min),
        source_max: flat.copied().fold(f64::NEG_INFINITY, f64::max),
        lower: shape.lower,
        upper: shape.upper,
    };
    // Scaled by c so that every gradient ratio lands in the bounds.
    let costs = raw
        .iter()
        .map(|row| row.iter().zip(&shape.c_weights).map(|(v, c)| c * map.apply(*v)).collect())
        .collect();
    let instance = Instance::new(shape.clone(), costs)?;
    let check = validate_instance(&instance);
    if !check.is_valid() {
        return Err(CflError::domain(format!(
            "trace instance invalid: {}",
            check.violations[0]
        )));
    }
    ids.truncate(d);
    stamps.truncate(horizon);
    Ok(TraceInstance {
        instance,
        map,
        ids,
        timestamps: stamps,
    })
}

pub fn ingest_trace_file(path: impl AsRef<Path>, shape: &Setting) -> Result<TraceInstance> {
    ingest_trace(std::fs::File::open(path)?, shape)
}
