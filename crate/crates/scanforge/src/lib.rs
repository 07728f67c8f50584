//! Planar laser scan tooling: merge several scans into one virtual scan in
//! a chosen destination frame, and synthesize virtual planar scans from 3D
//! point clouds through a static transform tree.
//!
//! Two deliberate semantic quirks are shared with the kind of scan
//! pipelines this mirrors and are covered by tests rather than "fixed":
//! merging flattens every input onto the destination scan plane, and
//! virtual scans are measured from the virtual origin with no occlusion
//! handling, so both can report returns a real scanner at that pose could
//! not have seen.

pub mod cli;
pub mod convert;
pub mod frame_tree;
pub mod geometry;
pub mod io;
pub mod merge;
pub mod raycast;
pub mod virtualize;

pub use convert::{
    points_to_scan, points_to_scan_in_band, scan_to_points, transform_cloud, DropStats,
    ScanGeometry,
};
pub use frame_tree::{TransformTree, TreeError};
pub use geometry::{FrameId, GeometryError, LaserScan, Point3, PointCloud3, RigidTransform};
pub use merge::{default_output_geometry, merge_scans, MergeConfig, MergeError};
pub use raycast::{raycast_cloud, raycast_scan, Scene, SceneError, Wall};
pub use virtualize::{virtualize, VirtualizeError, VirtualizerConfig};
