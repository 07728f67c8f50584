//! Scan files: one JSON object per file (or per stream record).
//!
//! Keys: frame, angle_min, angle_max, angle_increment, range_min, range_max,
//! ranges. Floats are written with 17 significant digits so reads are
//! value-exact; a no-return beam is the string "inf".

use std::path::Path;

use serde::Deserialize;

use crate::geometry::{FrameId, GeometryError, LaserScan};

use super::{fmt_exact, read_to_string, write_atomic, IoError, ParseError};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ScanDoc {
    frame: String,
    angle_min: f64,
    angle_max: f64,
    angle_increment: f64,
    range_min: f64,
    range_max: f64,
    ranges: Vec<RangeEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RangeEntry {
    Number(f64),
    Word(String),
}

pub(crate) fn scan_from_doc(doc: ScanDoc) -> Result<LaserScan, ParseError> {
    let frame = FrameId::new(doc.frame)
        .map_err(|e| ParseError::new("frame", e.to_string()))?;
    let mut ranges = Vec::with_capacity(doc.ranges.len());
    for (i, entry) in doc.ranges.into_iter().enumerate() {
        match entry {
            RangeEntry::Number(v) => ranges.push(v),
            RangeEntry::Word(w) if w == "inf" => ranges.push(f64::INFINITY),
            RangeEntry::Word(w) => {
                return Err(ParseError::new(
                    format!("ranges[{i}]"),
                    format!("expected a number or \"inf\", found {w:?}"),
                ));
            }
        }
    }
    LaserScan::new(
        frame,
        doc.angle_min,
        doc.angle_max,
        doc.angle_increment,
        doc.range_min,
        doc.range_max,
        ranges,
    )
    .map_err(|e| ParseError::new(geometry_error_key(&e), e.to_string()))
}

fn geometry_error_key(e: &GeometryError) -> &'static str {
    match e {
        GeometryError::BadAngleIncrement { .. } => "angle_increment",
        GeometryError::BadAngleOrder { .. } => "angle_max",
        GeometryError::BadRangeBounds { .. } => "range_min",
        GeometryError::RangeCountMismatch { .. } | GeometryError::BadRangeValue { .. } => "ranges",
        _ => "scan",
    }
}

pub fn scan_from_json_str(s: &str) -> Result<LaserScan, ParseError> {
    let doc: ScanDoc = serde_json::from_str(s).map_err(|e| {
        ParseError::new(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    scan_from_doc(doc)
}

pub fn scan_to_json_string(scan: &LaserScan) -> String {
    let mut out = String::with_capacity(96 + 24 * scan.ranges().len());
    out.push_str("{\"frame\":");
    out.push_str(&serde_json::to_string(scan.frame().as_str()).expect("string serializes"));
    out.push_str(",\"angle_min\":");
    out.push_str(&fmt_exact(scan.angle_min()));
    out.push_str(",\"angle_max\":");
    out.push_str(&fmt_exact(scan.angle_max()));
    out.push_str(",\"angle_increment\":");
    out.push_str(&fmt_exact(scan.angle_increment()));
    out.push_str(",\"range_min\":");
    out.push_str(&fmt_exact(scan.range_min()));
    out.push_str(",\"range_max\":");
    out.push_str(&fmt_exact(scan.range_max()));
    out.push_str(",\"ranges\":[");
    for (i, &r) in scan.ranges().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if r.is_finite() {
            out.push_str(&fmt_exact(r));
        } else {
            out.push_str("\"inf\"");
        }
    }
    out.push_str("]}");
    out
}

pub fn read_scan(path: &Path) -> Result<LaserScan, IoError> {
    let text = read_to_string(path)?;
    scan_from_json_str(&text).map_err(|e| IoError::parse(path, e))
}

pub fn write_scan(path: &Path, scan: &LaserScan) -> Result<(), IoError> {
    let mut text = scan_to_json_string(scan);
    text.push('\n');
    write_atomic(path, &text)
}
