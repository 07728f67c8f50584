//! Point cloud files: the ASCII PCD subset with FIELDS x y z.
//!
//! The frame rides in a leading `# frame: <name>` comment. Only
//! `DATA ascii` is supported; coordinates are written with 17 significant
//! digits so reads are value-exact. Non-finite rows are rejected with the
//! offending point index.

use std::path::Path;

use crate::geometry::{FrameId, Point3, PointCloud3};

use super::{fmt_exact, read_to_string, write_atomic, IoError, ParseError};

pub fn cloud_to_pcd_string(cloud: &PointCloud3) -> String {
    let n = cloud.len();
    let mut out = String::with_capacity(160 + 72 * n);
    out.push_str(&format!("# frame: {}\n", cloud.frame().as_str()));
    out.push_str("VERSION 0.7\n");
    out.push_str("FIELDS x y z\n");
    out.push_str("SIZE 8 8 8\n");
    out.push_str("TYPE F F F\n");
    out.push_str("COUNT 1 1 1\n");
    out.push_str(&format!("WIDTH {n}\n"));
    out.push_str("HEIGHT 1\n");
    out.push_str(&format!("POINTS {n}\n"));
    out.push_str("DATA ascii\n");
    for p in cloud.points() {
        out.push_str(&fmt_exact(p.x));
        out.push(' ');
        out.push_str(&fmt_exact(p.y));
        out.push(' ');
        out.push_str(&fmt_exact(p.z));
        out.push('\n');
    }
    out
}

struct Header {
    frame: Option<FrameId>,
    fields: Option<String>,
    typ: Option<String>,
    count: Option<String>,
    width: Option<usize>,
    height: Option<usize>,
    points: Option<usize>,
}

pub fn cloud_from_pcd_str(s: &str) -> Result<PointCloud3, ParseError> {
    let mut header = Header {
        frame: None,
        fields: None,
        typ: None,
        count: None,
        width: None,
        height: None,
        points: None,
    };
    let mut lines = s.lines().enumerate();
    let mut saw_version = false;
    let mut saw_size = false;

    // header section, ends at DATA
    let data_line = loop {
        let (idx, raw) = match lines.next() {
            Some(v) => v,
            None => {
                return Err(ParseError::new(
                    "header",
                    "missing DATA line; not a PCD file",
                ))
            }
        };
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(name) = comment.strip_prefix("frame:") {
                if header.frame.is_none() {
                    let frame = FrameId::new(name.trim()).map_err(|e| {
                        ParseError::new(format!("line {lineno}"), e.to_string())
                    })?;
                    header.frame = Some(frame);
                }
            }
            continue;
        }
        let (key, value) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let value = value.trim();
        let loc = || format!("line {lineno}");
        match key {
            "VERSION" => saw_version = true,
            "FIELDS" => header.fields = Some(value.to_owned()),
            "SIZE" => saw_size = true,
            "TYPE" => header.typ = Some(value.to_owned()),
            "COUNT" => header.count = Some(value.to_owned()),
            "WIDTH" => {
                header.width = Some(value.parse().map_err(|_| {
                    ParseError::new(loc(), format!("invalid WIDTH {value:?}"))
                })?)
            }
            "HEIGHT" => {
                header.height = Some(value.parse().map_err(|_| {
                    ParseError::new(loc(), format!("invalid HEIGHT {value:?}"))
                })?)
            }
            "POINTS" => {
                header.points = Some(value.parse().map_err(|_| {
                    ParseError::new(loc(), format!("invalid POINTS {value:?}"))
                })?)
            }
            "VIEWPOINT" => {} // tolerated for interchange, carried nowhere
            "DATA" => {
                if value != "ascii" {
                    return Err(ParseError::new(
                        loc(),
                        format!("unsupported format DATA {value:?}; only DATA ascii is supported"),
                    ));
                }
                break lineno;
            }
            other => {
                return Err(ParseError::new(
                    loc(),
                    format!("unknown header entry {other:?}"),
                ));
            }
        }
    };

    let loc = |name: &str| format!("line {data_line}: {name}");
    if !saw_version {
        return Err(ParseError::new(loc("VERSION"), "missing header entry"));
    }
    if !saw_size {
        return Err(ParseError::new(loc("SIZE"), "missing header entry"));
    }
    let frame = header
        .frame
        .ok_or_else(|| ParseError::new("header", "missing '# frame: <name>' comment"))?;
    match header.fields.as_deref() {
        Some("x y z") => {}
        Some(other) => {
            return Err(ParseError::new(
                "FIELDS",
                format!("expected \"x y z\", found {other:?}"),
            ))
        }
        None => return Err(ParseError::new(loc("FIELDS"), "missing header entry")),
    }
    match header.typ.as_deref() {
        Some("F F F") => {}
        Some(other) => {
            return Err(ParseError::new(
                "TYPE",
                format!("expected \"F F F\", found {other:?}"),
            ))
        }
        None => return Err(ParseError::new(loc("TYPE"), "missing header entry")),
    }
    match header.count.as_deref() {
        Some("1 1 1") => {}
        Some(other) => {
            return Err(ParseError::new(
                "COUNT",
                format!("expected \"1 1 1\", found {other:?}"),
            ))
        }
        None => return Err(ParseError::new(loc("COUNT"), "missing header entry")),
    }
    let width = header
        .width
        .ok_or_else(|| ParseError::new(loc("WIDTH"), "missing header entry"))?;
    let height = header
        .height
        .ok_or_else(|| ParseError::new(loc("HEIGHT"), "missing header entry"))?;
    if height != 1 {
        return Err(ParseError::new(
            "HEIGHT",
            format!("only unorganized clouds (HEIGHT 1) are supported, found {height}"),
        ));
    }
    let declared = header
        .points
        .ok_or_else(|| ParseError::new(loc("POINTS"), "missing header entry"))?;
    if declared != width * height {
        return Err(ParseError::new(
            "POINTS",
            format!("POINTS {declared} does not match WIDTH {width} x HEIGHT {height}"),
        ));
    }

    let mut points = Vec::with_capacity(declared);
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let index = points.len();
        if index >= declared {
            return Err(ParseError::new(
                format!("line {lineno}"),
                format!("more data rows than the declared POINTS {declared}"),
            ));
        }
        let mut coords = [0f64; 3];
        let mut tokens = line.split_whitespace();
        for c in coords.iter_mut() {
            let token = tokens.next().ok_or_else(|| {
                ParseError::new(
                    format!("line {lineno}"),
                    format!("point {index}: expected 3 coordinates"),
                )
            })?;
            *c = token.parse().map_err(|_| {
                ParseError::new(
                    format!("line {lineno}"),
                    format!("point {index}: invalid coordinate {token:?}"),
                )
            })?;
        }
        if tokens.next().is_some() {
            return Err(ParseError::new(
                format!("line {lineno}"),
                format!("point {index}: expected exactly 3 coordinates"),
            ));
        }
        let p = Point3::new(coords[0], coords[1], coords[2]);
        if !p.is_finite() {
            return Err(ParseError::new(
                format!("line {lineno}"),
                format!("point {index} is not finite"),
            ));
        }
        points.push(p);
    }
    if points.len() != declared {
        return Err(ParseError::new(
            "DATA",
            format!("header declares POINTS {declared} but found {} data rows", points.len()),
        ));
    }
    Ok(PointCloud3::new(frame, points).expect("rows already checked finite"))
}

pub fn read_cloud(path: &Path) -> Result<PointCloud3, IoError> {
    let text = read_to_string(path)?;
    cloud_from_pcd_str(&text).map_err(|e| IoError::parse(path, e))
}

pub fn write_cloud(path: &Path, cloud: &PointCloud3) -> Result<(), IoError> {
    write_atomic(path, &cloud_to_pcd_string(cloud))
}
