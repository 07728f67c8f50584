//! Command line wiring: file pipelines plus a line-delimited stream mode.
//!
//! Exit codes are a contract:
//!   0  success
//!   2  configuration errors (bad config file, bad flags)
//!   3  I/O errors (missing or malformed input files, failed writes)
//!   4  frame resolution errors (unknown or disconnected frames)
//!   5  stream mode ran but no batch produced output
//!
//! Stream framing: records are single JSON lines, a batch is one record per
//! configured input, batches are separated by blank lines (end of input
//! closes the last batch). Each successful batch emits its output records
//! followed by a blank line, flushed immediately. A malformed batch is
//! reported on the diagnostic stream and skipped.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::convert::{DropStats, ScanGeometry};
use crate::frame_tree::TransformTree;
use crate::geometry::{FrameId, LaserScan, RigidTransform};
use crate::io::{self, MergeFileConfig};
use crate::merge::{self, MergeConfig, MergeError};
use crate::raycast;
use crate::virtualize::{virtualize, VirtualizeError, VirtualizerConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_FRAMES: i32 = 4;
pub const EXIT_NO_BATCHES: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Frames(String),
    #[error("stream mode processed no usable batch")]
    NoBatches,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Frames(_) => EXIT_FRAMES,
            CliError::NoBatches => EXIT_NO_BATCHES,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "scanforge",
    version,
    about = "Merge planar laser scans and synthesize virtual scans from point clouds"
)]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
    /// Print processing diagnostics to the error stream (repeatable)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge the configured input scans into one scan in the destination frame
    Merge(PipelineArgs),
    /// Generate one virtual scan per configured virtual frame from a point cloud
    Virtualize(PipelineArgs),
    /// Raycast a synthetic scene into a scan, or a cloud when elevations are given
    GenScene(GenSceneArgs),
    /// Validate a config file and its transform connectivity without running anything
    CheckConfig(CheckConfigArgs),
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Config file; relative paths inside it resolve against its directory
    #[arg(short, long)]
    pub config: PathBuf,
    /// Read record batches from stdin and write output records to stdout
    #[arg(long)]
    pub stream: bool,
    /// Output path (merge, combined virtualize) or directory (separate virtualize)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenSceneArgs {
    /// Scene file
    pub scene: PathBuf,
    /// Sensor pose in the scene: "x y z yaw pitch roll"
    #[arg(long, default_value = "0 0 0 0 0 0")]
    pub pose: String,
    /// Frame label for the generated scan or cloud
    #[arg(long, default_value = "sensor")]
    pub frame: String,
    #[arg(long, allow_hyphen_values = true)]
    pub angle_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub angle_max: f64,
    #[arg(long)]
    pub angle_increment: f64,
    #[arg(long)]
    pub range_min: f64,
    #[arg(long)]
    pub range_max: f64,
    /// Comma-separated elevation angles; switches the output to a PCD cloud
    #[arg(long, allow_hyphen_values = true)]
    pub elevations: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckConfigArgs {
    /// Config file to validate
    #[arg(short, long)]
    pub config: PathBuf,
}

pub fn run(invocation: Invocation) -> i32 {
    let verbose = invocation.verbose;
    let result = match invocation.command {
        Command::Merge(args) => run_merge(&args, verbose),
        Command::Virtualize(args) => run_virtualize(&args, verbose),
        Command::GenScene(args) => run_gen_scene(&args),
        Command::CheckConfig(args) => run_check_config(&args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn config_dir(config_path: &Path) -> PathBuf {
    match config_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
        _ => PathBuf::from("."),
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_owned()
    } else {
        base.join(path)
    }
}

fn load_config(path: &Path) -> Result<io::ConfigData, CliError> {
    io::read_config(path).map_err(|e| match e {
        io::IoError::Io { .. } => CliError::Io(e.to_string()),
        io::IoError::Parse { .. } => CliError::Config(e.to_string()),
    })
}

fn input_error(e: io::IoError) -> CliError {
    CliError::Io(e.to_string())
}

fn merge_error(e: MergeError) -> CliError {
    match e {
        MergeError::FrameResolution { .. } => CliError::Frames(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn virtualize_error(e: VirtualizeError) -> CliError {
    match e {
        VirtualizeError::FrameResolution { .. } => CliError::Frames(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn reject_output_in_stream_mode(args: &PipelineArgs) -> Result<(), CliError> {
    if args.stream && args.output.is_some() {
        return Err(CliError::Config(
            "--output cannot be combined with --stream; records go to stdout".into(),
        ));
    }
    Ok(())
}

fn print_drop_stats(label: &str, stats: &DropStats) {
    eprintln!(
        "{label}: binned {} points, dropped {} (bearing {}, range_low {}, range_high {})",
        stats.binned,
        stats.dropped(),
        stats.bearing,
        stats.range_low,
        stats.range_high,
    );
}

fn run_merge(args: &PipelineArgs, verbose: u8) -> Result<(), CliError> {
    reject_output_in_stream_mode(args)?;
    let data = load_config(&args.config)?;
    let merge_cfg = data
        .config
        .merge
        .ok_or_else(|| CliError::Config("config has no [merge] section".into()))?;

    if args.stream {
        let stdin = std::io::stdin();
        let stdout = std::io::stdout();
        return merge_stream(
            &data.tree,
            &merge_cfg,
            verbose,
            &mut stdin.lock(),
            &mut stdout.lock(),
        );
    }

    let base = config_dir(&args.config);
    let mut scans = Vec::with_capacity(merge_cfg.inputs.len());
    for input in &merge_cfg.inputs {
        let path = resolve(&base, Path::new(input));
        scans.push(io::read_scan(&path).map_err(input_error)?);
    }

    let (scan, cloud, stats) = merge_batch(&scans, &data.tree, &merge_cfg)?;
    if verbose >= 1 {
        print_drop_stats("merge", &stats);
    }

    let scan_path = args
        .output
        .clone()
        .or_else(|| merge_cfg.scan_output.as_ref().map(|p| resolve(&base, p)));
    match scan_path {
        Some(path) => io::write_scan(&path, &scan).map_err(|e| CliError::Io(e.to_string()))?,
        None => println!("{}", io::scan_to_json_string(&scan)),
    }
    if let Some(cloud_out) = &merge_cfg.cloud_output {
        let path = resolve(&base, cloud_out);
        io::write_cloud(&path, &cloud).map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn merge_batch(
    scans: &[LaserScan],
    tree: &TransformTree,
    cfg: &MergeFileConfig,
) -> Result<(LaserScan, crate::geometry::PointCloud3, DropStats), CliError> {
    let geometry = match cfg.geometry {
        Some(g) => g,
        None => merge::default_output_geometry(scans).map_err(merge_error)?,
    };
    let lib_cfg = MergeConfig::new(
        cfg.destination_frame.clone(),
        geometry,
        cfg.inputs.clone(),
        cfg.cloud_output.is_some(),
    )
    .map_err(merge_error)?;
    merge::merge_scans(scans, tree, &lib_cfg).map_err(merge_error)
}

fn merge_stream(
    tree: &TransformTree,
    cfg: &MergeFileConfig,
    verbose: u8,
    input: &mut impl BufRead,
    output: &mut impl Write,
) -> Result<(), CliError> {
    let expected = cfg.inputs.len();
    let mut batches = 0usize;
    let mut successes = 0usize;
    loop {
        let (lines, eof) = read_batch(input)?;
        if !lines.is_empty() {
            batches += 1;
            if eof && lines.len() < expected {
                eprintln!(
                    "warning: batch {batches}: incomplete at end of input \
                     ({} of {expected} records); no output",
                    lines.len()
                );
            } else {
                match merge_stream_batch(&lines, tree, cfg) {
                    Ok((scan, stats)) => {
                        if verbose >= 1 {
                            print_drop_stats(&format!("batch {batches}"), &stats);
                        }
                        writeln!(output, "{}", io::scan_to_json_string(&scan))
                            .and_then(|_| writeln!(output))
                            .and_then(|_| output.flush())
                            .map_err(|e| CliError::Io(e.to_string()))?;
                        successes += 1;
                    }
                    Err(message) => {
                        eprintln!("warning: batch {batches}: {message}; skipped");
                    }
                }
            }
        }
        if eof {
            break;
        }
    }
    if successes == 0 {
        return Err(CliError::NoBatches);
    }
    Ok(())
}

fn merge_stream_batch(
    lines: &[String],
    tree: &TransformTree,
    cfg: &MergeFileConfig,
) -> Result<(LaserScan, DropStats), String> {
    if lines.len() != cfg.inputs.len() {
        return Err(format!(
            "expected {} records, found {}",
            cfg.inputs.len(),
            lines.len()
        ));
    }
    let mut scans = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let scan = io::scan_from_json_str(line)
            .map_err(|e| format!("record {} ({}): {e}", i + 1, cfg.inputs[i]))?;
        scans.push(scan);
    }
    let (scan, _cloud, stats) = merge_batch(&scans, tree, cfg).map_err(|e| e.to_string())?;
    Ok((scan, stats))
}

fn run_virtualize(args: &PipelineArgs, verbose: u8) -> Result<(), CliError> {
    reject_output_in_stream_mode(args)?;
    let data = load_config(&args.config)?;
    let virt_cfg = data
        .config
        .virtualize
        .ok_or_else(|| CliError::Config("config has no [virtualize] section".into()))?;
    let lib_cfg = VirtualizerConfig::new(
        virt_cfg.base_frame.clone(),
        virt_cfg.virtual_frames.clone(),
        virt_cfg.combined_output.is_some(),
        virt_cfg.geometry,
    )
    .map_err(virtualize_error)?;

    if args.stream {
        let stdin = std::io::stdin();
        let stdout = std::io::stdout();
        return virtualize_stream(
            &data.tree,
            &lib_cfg,
            verbose,
            &mut stdin.lock(),
            &mut stdout.lock(),
        );
    }

    let base = config_dir(&args.config);
    let cloud_path = resolve(&base, &virt_cfg.cloud_input);
    let cloud = io::read_cloud(&cloud_path).map_err(input_error)?;
    let outputs = virtualize(&cloud, &data.tree, &lib_cfg).map_err(virtualize_error)?;
    if verbose >= 1 {
        for (frame, _, stats) in &outputs {
            print_drop_stats(&format!("virtualize {}", frame.as_str()), stats);
        }
    }

    if let Some(combined) = &virt_cfg.combined_output {
        let path = args
            .output
            .clone()
            .unwrap_or_else(|| resolve(&base, combined));
        let mut text = String::new();
        for (frame, scan, _) in &outputs {
            text.push_str(&io::tagged_scan_to_string(frame, scan));
            text.push('\n');
        }
        io::write_text(&path, &text).map_err(|e| CliError::Io(e.to_string()))?;
    } else {
        let dir = args.output.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (frame, scan, _) in &outputs {
            let name = frame.as_str();
            if name.contains(['/', '\\']) {
                return Err(CliError::Config(format!(
                    "virtual frame {name:?} cannot name an output file"
                )));
            }
            let path = dir.join(format!("{name}.scan.json"));
            io::write_scan(&path, scan).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn virtualize_stream(
    tree: &TransformTree,
    cfg: &VirtualizerConfig,
    verbose: u8,
    input: &mut impl BufRead,
    output: &mut impl Write,
) -> Result<(), CliError> {
    let mut batches = 0usize;
    let mut successes = 0usize;
    loop {
        let (lines, eof) = read_batch(input)?;
        if !lines.is_empty() {
            batches += 1;
            match virtualize_stream_batch(&lines, tree, cfg) {
                Ok(outputs) => {
                    for (frame, scan, stats) in &outputs {
                        if verbose >= 1 {
                            print_drop_stats(
                                &format!("batch {batches} {}", frame.as_str()),
                                stats,
                            );
                        }
                        writeln!(output, "{}", io::tagged_scan_to_string(frame, scan))
                            .map_err(|e| CliError::Io(e.to_string()))?;
                    }
                    writeln!(output)
                        .and_then(|_| output.flush())
                        .map_err(|e| CliError::Io(e.to_string()))?;
                    successes += 1;
                }
                Err(message) => {
                    eprintln!("warning: batch {batches}: {message}; skipped");
                }
            }
        }
        if eof {
            break;
        }
    }
    if successes == 0 {
        return Err(CliError::NoBatches);
    }
    Ok(())
}

fn virtualize_stream_batch(
    lines: &[String],
    tree: &TransformTree,
    cfg: &VirtualizerConfig,
) -> Result<Vec<(FrameId, LaserScan, DropStats)>, String> {
    if lines.len() != 1 {
        return Err(format!("expected 1 cloud record, found {}", lines.len()));
    }
    let cloud = io::cloud_record_from_str(&lines[0]).map_err(|e| e.to_string())?;
    virtualize(&cloud, tree, cfg).map_err(|e| e.to_string())
}

/// Read one blank-line-delimited batch. Leading blank lines are skipped;
/// returns the collected records and whether end of input was reached.
fn read_batch(input: &mut impl BufRead) -> Result<(Vec<String>, bool), CliError> {
    let mut lines = Vec::new();
    loop {
        let mut line = String::new();
        let n = input
            .read_line(&mut line)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        if n == 0 {
            return Ok((lines, true));
        }
        let record = line.trim_end_matches(['\n', '\r']);
        if record.trim().is_empty() {
            if lines.is_empty() {
                continue;
            }
            return Ok((lines, false));
        }
        lines.push(record.to_owned());
    }
}

fn parse_pose(text: &str) -> Result<RigidTransform, CliError> {
    let values: Vec<f64> = text
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Config(format!("--pose: invalid number {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != 6 {
        return Err(CliError::Config(format!(
            "--pose needs 6 values \"x y z yaw pitch roll\", found {}",
            values.len()
        )));
    }
    RigidTransform::from_xyz_ypr(
        [values[0], values[1], values[2]],
        [values[3], values[4], values[5]],
    )
    .map_err(|e| CliError::Config(format!("--pose: {e}")))
}

fn run_gen_scene(args: &GenSceneArgs) -> Result<(), CliError> {
    let scene = io::read_scene(&args.scene).map_err(input_error)?;
    let pose = parse_pose(&args.pose)?;
    let frame = FrameId::new(&args.frame)
        .map_err(|e| CliError::Config(format!("--frame: {e}")))?;
    let geometry = ScanGeometry::new(
        args.angle_min,
        args.angle_max,
        args.angle_increment,
        args.range_min,
        args.range_max,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    match &args.elevations {
        None => {
            let scan = raycast::raycast_scan(&scene, &pose, &geometry, frame);
            match &args.output {
                Some(path) => {
                    io::write_scan(path, &scan).map_err(|e| CliError::Io(e.to_string()))?
                }
                None => println!("{}", io::scan_to_json_string(&scan)),
            }
        }
        Some(layers) => {
            let elevations: Vec<f64> = layers
                .split(',')
                .map(|t| {
                    let t = t.trim();
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            CliError::Config(format!("--elevations: invalid angle {t:?}"))
                        })
                })
                .collect::<Result<_, _>>()?;
            let cloud = raycast::raycast_cloud(&scene, &pose, &geometry, &elevations, frame);
            match &args.output {
                Some(path) => {
                    io::write_cloud(path, &cloud).map_err(|e| CliError::Io(e.to_string()))?
                }
                None => print!("{}", io::cloud_to_pcd_string(&cloud)),
            }
        }
    }
    Ok(())
}

fn run_check_config(args: &CheckConfigArgs) -> Result<(), CliError> {
    let data = load_config(&args.config)?;
    println!(
        "transforms: {} edges over {} frames",
        data.tree.edge_count(),
        data.tree.frame_count()
    );
    if let Some(m) = &data.config.merge {
        if data.tree.frame_count() > 0 && !data.tree.contains_frame(&m.destination_frame) {
            println!(
                "note: merge destination frame {:?} has no transform; \
                 inputs must already be in it",
                m.destination_frame.as_str()
            );
        }
        println!(
            "merge: {} inputs -> frame {:?}{}",
            m.inputs.len(),
            m.destination_frame.as_str(),
            if m.geometry.is_some() {
                ""
            } else {
                " (output geometry derived from inputs)"
            }
        );
    }
    if let Some(v) = &data.config.virtualize {
        for frame in &v.virtual_frames {
            data.tree
                .lookup(&v.base_frame, frame)
                .map_err(|e| CliError::Frames(e.to_string()))?;
        }
        println!(
            "virtualize: {} virtual frames reachable from base {:?}",
            v.virtual_frames.len(),
            v.base_frame.as_str()
        );
    }
    println!("config ok");
    Ok(())
}
