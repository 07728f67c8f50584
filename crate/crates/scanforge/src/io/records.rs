//! Single-line JSON records for stream mode.
//!
//! A cloud record is `{"frame": ..., "points": [[x, y, z], ...]}`. A tagged
//! scan record wraps a scan with the virtual frame it belongs to:
//! `{"frame": ..., "scan": {...}}`; combined virtualizer output files hold
//! one tagged record per line.

use serde::Deserialize;

use crate::geometry::{FrameId, LaserScan, Point3, PointCloud3};

use super::scan_json::{scan_from_doc, ScanDoc};
use super::{fmt_exact, ParseError};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CloudRecord {
    frame: String,
    points: Vec<[f64; 3]>,
}

pub fn cloud_record_from_str(s: &str) -> Result<PointCloud3, ParseError> {
    let record: CloudRecord = serde_json::from_str(s).map_err(|e| {
        ParseError::new(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let frame =
        FrameId::new(record.frame).map_err(|e| ParseError::new("frame", e.to_string()))?;
    let points = record
        .points
        .into_iter()
        .map(|[x, y, z]| Point3::new(x, y, z))
        .collect();
    PointCloud3::new(frame, points).map_err(|e| ParseError::new("points", e.to_string()))
}

pub fn cloud_record_to_string(cloud: &PointCloud3) -> String {
    let mut out = String::with_capacity(32 + 72 * cloud.len());
    out.push_str("{\"frame\":");
    out.push_str(&serde_json::to_string(cloud.frame().as_str()).expect("string serializes"));
    out.push_str(",\"points\":[");
    for (i, p) in cloud.points().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        out.push_str(&fmt_exact(p.x));
        out.push(',');
        out.push_str(&fmt_exact(p.y));
        out.push(',');
        out.push_str(&fmt_exact(p.z));
        out.push(']');
    }
    out.push_str("]}");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TaggedScanRecord {
    frame: String,
    scan: ScanDoc,
}

pub fn tagged_scan_from_str(s: &str) -> Result<(FrameId, LaserScan), ParseError> {
    let record: TaggedScanRecord = serde_json::from_str(s).map_err(|e| {
        ParseError::new(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let frame =
        FrameId::new(record.frame).map_err(|e| ParseError::new("frame", e.to_string()))?;
    let scan = scan_from_doc(record.scan)
        .map_err(|e| ParseError::new(format!("scan.{}", e.location), e.message))?;
    Ok((frame, scan))
}

pub fn tagged_scan_to_string(frame: &FrameId, scan: &LaserScan) -> String {
    format!(
        "{{\"frame\":{},\"scan\":{}}}",
        serde_json::to_string(frame.as_str()).expect("string serializes"),
        super::scan_json::scan_to_json_string(scan),
    )
}
