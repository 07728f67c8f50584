//! File formats and configuration parsing: the persistence surface.
//!
//! Scans are single-line JSON objects, clouds are an ASCII PCD subset,
//! configuration is TOML, scenes are a line-oriented text format. All
//! writers go through a temp-file-and-rename so a failed write never leaves
//! a partial file behind. Every parse error carries its location (a line
//! number or a key path).

mod cloud_pcd;
mod config;
mod records;
mod scan_json;
mod scene;

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use cloud_pcd::{cloud_from_pcd_str, cloud_to_pcd_string, read_cloud, write_cloud};
pub use config::{
    config_from_toml_str, config_to_toml_string, read_config, write_config, ConfigData,
    ConfigFile, MergeFileConfig, TransformLine, VirtualizeFileConfig,
};
pub use records::{
    cloud_record_from_str, cloud_record_to_string, tagged_scan_from_str, tagged_scan_to_string,
};
pub use scan_json::{read_scan, scan_from_json_str, scan_to_json_string, write_scan};
pub use scene::{read_scene, scene_from_str, scene_to_string, write_scene};

/// A structural parse failure with where it happened: a line number,
/// a key path, or both.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            location: location.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_owned(),
            source,
        }
    }

    fn parse(path: &Path, source: ParseError) -> Self {
        IoError::Parse {
            path: path.to_owned(),
            source,
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

/// Write arbitrary text with the same atomic temp-file-and-rename behavior
/// as the structured writers.
pub fn write_text(path: &Path, contents: &str) -> Result<(), IoError> {
    write_atomic(path, contents)
}

/// Write via a temporary file in the target directory plus an atomic
/// rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| IoError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

/// 17 significant digits, enough for any f64 to survive a decimal round
/// trip exactly.
fn fmt_exact(v: f64) -> String {
    format!("{v:.16e}")
}
