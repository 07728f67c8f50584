//! Configuration files: TOML with a flat list of transform lines and
//! optional `[merge]` / `[virtualize]` sections.
//!
//! A transform line is `"parent child x y z yaw pitch roll"` with an
//! optional trailing republish period, which is parsed and ignored (a
//! static tree has no publish loop). The stored transform maps child-frame
//! coordinates into parent-frame coordinates. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::convert::ScanGeometry;
use crate::frame_tree::TransformTree;
use crate::geometry::FrameId;

use super::{read_to_string, write_atomic, IoError, ParseError};

/// One `parent child x y z yaw pitch roll` entry, kept in source form so a
/// config can be rewritten without recovering angles from a rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformLine {
    pub parent: FrameId,
    pub child: FrameId,
    pub xyz: [f64; 3],
    pub ypr: [f64; 3],
}

/// The `[merge]` section. Output geometry keys are optional as a group;
/// when absent the pipeline derives one from its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeFileConfig {
    pub destination_frame: FrameId,
    pub inputs: Vec<String>,
    pub scan_output: Option<PathBuf>,
    pub cloud_output: Option<PathBuf>,
    pub geometry: Option<ScanGeometry>,
}

/// The `[virtualize]` section. `combined_output` carries the single output
/// path when all virtual scans go to one destination; leave it unset to
/// write one file per virtual frame.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualizeFileConfig {
    pub cloud_input: PathBuf,
    pub base_frame: FrameId,
    pub virtual_frames: Vec<FrameId>,
    pub combined_output: Option<PathBuf>,
    pub geometry: ScanGeometry,
}

/// Parsed configuration, structurally validated but with the transform list
/// still in source form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub transforms: Vec<TransformLine>,
    pub merge: Option<MergeFileConfig>,
    pub virtualize: Option<VirtualizeFileConfig>,
}

impl ConfigFile {
    /// Build and freeze the transform tree; duplicate pairs and cycles are
    /// reported against their transform line.
    pub fn build_tree(&self) -> Result<TransformTree, ParseError> {
        let mut tree = TransformTree::new();
        for (i, line) in self.transforms.iter().enumerate() {
            tree.add_static_transform(
                line.parent.clone(),
                line.child.clone(),
                line.xyz,
                line.ypr,
            )
            .map_err(|e| ParseError::new(format!("transforms[{i}]"), e.to_string()))?;
        }
        Ok(tree)
    }
}

/// A parsed config plus its frozen transform tree.
#[derive(Debug, Clone)]
pub struct ConfigData {
    pub config: ConfigFile,
    pub tree: TransformTree,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    transforms: Vec<String>,
    merge: Option<RawMerge>,
    virtualize: Option<RawVirtualize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMerge {
    destination_frame: String,
    inputs: Vec<String>,
    scan_output: Option<String>,
    cloud_output: Option<String>,
    angle_min: Option<f64>,
    angle_max: Option<f64>,
    angle_increment: Option<f64>,
    range_min: Option<f64>,
    range_max: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVirtualize {
    cloud_input: String,
    base_frame: String,
    virtual_frames: Vec<String>,
    combined_output: Option<String>,
    angle_min: f64,
    angle_max: f64,
    angle_increment: f64,
    range_min: f64,
    range_max: f64,
}

fn parse_frame(value: &str, location: &str) -> Result<FrameId, ParseError> {
    FrameId::new(value).map_err(|e| ParseError::new(location, e.to_string()))
}

fn parse_transform_line(line: &str, index: usize) -> Result<TransformLine, ParseError> {
    let location = format!("transforms[{index}]");
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 8 && tokens.len() != 9 {
        return Err(ParseError::new(
            location,
            format!(
                "expected \"parent child x y z yaw pitch roll [period]\", found {} tokens",
                tokens.len()
            ),
        ));
    }
    let parent = parse_frame(tokens[0], &location)?;
    let child = parse_frame(tokens[1], &location)?;
    let mut values = [0f64; 6];
    for (k, v) in values.iter_mut().enumerate() {
        let token = tokens[2 + k];
        *v = token.parse().map_err(|_| {
            ParseError::new(&location, format!("invalid number {token:?}"))
        })?;
        if !v.is_finite() {
            return Err(ParseError::new(
                &location,
                format!("value {token:?} must be finite"),
            ));
        }
    }
    if tokens.len() == 9 {
        // republish period: validated, then ignored
        let _: f64 = tokens[8].parse().map_err(|_| {
            ParseError::new(&location, format!("invalid period {:?}", tokens[8]))
        })?;
    }
    Ok(TransformLine {
        parent,
        child,
        xyz: [values[0], values[1], values[2]],
        ypr: [values[3], values[4], values[5]],
    })
}

fn parse_merge(raw: RawMerge) -> Result<MergeFileConfig, ParseError> {
    let destination_frame = parse_frame(&raw.destination_frame, "merge.destination_frame")?;
    if raw.inputs.is_empty() {
        return Err(ParseError::new(
            "merge.inputs",
            "at least one input is required",
        ));
    }
    let geom_fields = [
        raw.angle_min,
        raw.angle_max,
        raw.angle_increment,
        raw.range_min,
        raw.range_max,
    ];
    let present = geom_fields.iter().filter(|v| v.is_some()).count();
    let geometry = match present {
        0 => None,
        5 => Some(
            ScanGeometry::new(
                raw.angle_min.unwrap(),
                raw.angle_max.unwrap(),
                raw.angle_increment.unwrap(),
                raw.range_min.unwrap(),
                raw.range_max.unwrap(),
            )
            .map_err(|e| ParseError::new("merge", e.to_string()))?,
        ),
        _ => {
            return Err(ParseError::new(
                "merge",
                "angle_min, angle_max, angle_increment, range_min, range_max \
                 must be given together or not at all",
            ));
        }
    };
    Ok(MergeFileConfig {
        destination_frame,
        inputs: raw.inputs,
        scan_output: raw.scan_output.map(PathBuf::from),
        cloud_output: raw.cloud_output.map(PathBuf::from),
        geometry,
    })
}

fn parse_virtualize(raw: RawVirtualize) -> Result<VirtualizeFileConfig, ParseError> {
    let base_frame = parse_frame(&raw.base_frame, "virtualize.base_frame")?;
    if raw.virtual_frames.is_empty() {
        return Err(ParseError::new(
            "virtualize.virtual_frames",
            "at least one virtual frame is required",
        ));
    }
    let mut virtual_frames = Vec::with_capacity(raw.virtual_frames.len());
    for name in &raw.virtual_frames {
        let frame = parse_frame(name, "virtualize.virtual_frames")?;
        if virtual_frames.contains(&frame) {
            return Err(ParseError::new(
                "virtualize.virtual_frames",
                format!("frame {name:?} is listed twice"),
            ));
        }
        virtual_frames.push(frame);
    }
    let geometry = ScanGeometry::new(
        raw.angle_min,
        raw.angle_max,
        raw.angle_increment,
        raw.range_min,
        raw.range_max,
    )
    .map_err(|e| ParseError::new("virtualize", e.to_string()))?;
    Ok(VirtualizeFileConfig {
        cloud_input: PathBuf::from(raw.cloud_input),
        base_frame,
        virtual_frames,
        combined_output: raw.combined_output.map(PathBuf::from),
        geometry,
    })
}

pub fn config_from_toml_str(s: &str) -> Result<ConfigFile, ParseError> {
    let raw: RawConfig =
        toml::from_str(s).map_err(|e| ParseError::new("config", e.to_string()))?;
    let mut transforms = Vec::with_capacity(raw.transforms.len());
    for (i, line) in raw.transforms.iter().enumerate() {
        transforms.push(parse_transform_line(line, i)?);
    }
    Ok(ConfigFile {
        transforms,
        merge: raw.merge.map(parse_merge).transpose()?,
        virtualize: raw.virtualize.map(parse_virtualize).transpose()?,
    })
}

fn toml_string(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn push_string_list(out: &mut String, key: &str, values: impl Iterator<Item = String>) {
    out.push_str(key);
    out.push_str(" = [");
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&toml_string(&v));
    }
    out.push_str("]\n");
}

fn push_geometry(out: &mut String, g: &ScanGeometry) {
    out.push_str(&format!("angle_min = {:?}\n", g.angle_min()));
    out.push_str(&format!("angle_max = {:?}\n", g.angle_max()));
    out.push_str(&format!("angle_increment = {:?}\n", g.angle_increment()));
    out.push_str(&format!("range_min = {:?}\n", g.range_min()));
    out.push_str(&format!("range_max = {:?}\n", g.range_max()));
}

pub fn config_to_toml_string(config: &ConfigFile) -> String {
    let mut out = String::new();
    if config.transforms.is_empty() {
        out.push_str("transforms = []\n");
    } else {
        out.push_str("transforms = [\n");
        for t in &config.transforms {
            let line = format!(
                "{} {} {:?} {:?} {:?} {:?} {:?} {:?}",
                t.parent.as_str(),
                t.child.as_str(),
                t.xyz[0],
                t.xyz[1],
                t.xyz[2],
                t.ypr[0],
                t.ypr[1],
                t.ypr[2],
            );
            out.push_str("  ");
            out.push_str(&toml_string(&line));
            out.push_str(",\n");
        }
        out.push_str("]\n");
    }
    if let Some(m) = &config.merge {
        out.push_str("\n[merge]\n");
        out.push_str(&format!(
            "destination_frame = {}\n",
            toml_string(m.destination_frame.as_str())
        ));
        push_string_list(&mut out, "inputs", m.inputs.iter().cloned());
        if let Some(p) = &m.scan_output {
            out.push_str(&format!("scan_output = {}\n", toml_string(&p.to_string_lossy())));
        }
        if let Some(p) = &m.cloud_output {
            out.push_str(&format!("cloud_output = {}\n", toml_string(&p.to_string_lossy())));
        }
        if let Some(g) = &m.geometry {
            push_geometry(&mut out, g);
        }
    }
    if let Some(v) = &config.virtualize {
        out.push_str("\n[virtualize]\n");
        out.push_str(&format!(
            "cloud_input = {}\n",
            toml_string(&v.cloud_input.to_string_lossy())
        ));
        out.push_str(&format!(
            "base_frame = {}\n",
            toml_string(v.base_frame.as_str())
        ));
        push_string_list(
            &mut out,
            "virtual_frames",
            v.virtual_frames.iter().map(|f| f.as_str().to_owned()),
        );
        if let Some(p) = &v.combined_output {
            out.push_str(&format!(
                "combined_output = {}\n",
                toml_string(&p.to_string_lossy())
            ));
        }
        push_geometry(&mut out, &v.geometry);
    }
    out
}

pub fn read_config(path: &Path) -> Result<ConfigData, IoError> {
    let text = read_to_string(path)?;
    let config = config_from_toml_str(&text).map_err(|e| IoError::parse(path, e))?;
    let tree = config.build_tree().map_err(|e| IoError::parse(path, e))?;
    Ok(ConfigData { config, tree })
}

pub fn write_config(path: &Path, config: &ConfigFile) -> Result<(), IoError> {
    write_atomic(path, &config_to_toml_string(config))
}
