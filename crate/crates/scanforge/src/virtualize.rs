//! Synthesize planar scans from a point cloud, one per virtual laser frame.
//!
//! Each virtual frame's transform is resolved through the tree (directly or
//! along a chain, typically through a shared base frame), the cloud is
//! re-expressed there, and flattened into a scan. Occlusions are not
//! modeled: every cloud point in front of a virtual laser shows up in its
//! scan, whether or not a real scanner at that pose could have seen it.

use thiserror::Error;

use crate::convert::{points_to_scan, transform_cloud, DropStats, ScanGeometry};
use crate::frame_tree::{TransformTree, TreeError};
use crate::geometry::{FrameId, LaserScan, PointCloud3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VirtualizeError {
    #[error("at least one virtual frame is required")]
    NoVirtualFrames,
    #[error("virtual frame {frame:?} is listed twice")]
    DuplicateVirtualFrame { frame: String },
    #[error("cloud frame {cloud_frame:?} to virtual frame {virtual_frame:?}: {source}")]
    FrameResolution {
        cloud_frame: String,
        virtual_frame: String,
        source: TreeError,
    },
}

/// Configuration of one virtualizer pipeline. The base frame is the hub the
/// virtual frames are specified against; transforms are still resolved over
/// the whole tree, so chains through it work with no special handling.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualizerConfig {
    base_frame: FrameId,
    virtual_frames: Vec<FrameId>,
    combined_output: bool,
    output_geometry: ScanGeometry,
}

impl VirtualizerConfig {
    pub fn new(
        base_frame: FrameId,
        virtual_frames: Vec<FrameId>,
        combined_output: bool,
        output_geometry: ScanGeometry,
    ) -> Result<Self, VirtualizeError> {
        if virtual_frames.is_empty() {
            return Err(VirtualizeError::NoVirtualFrames);
        }
        for (i, f) in virtual_frames.iter().enumerate() {
            if virtual_frames[..i].contains(f) {
                return Err(VirtualizeError::DuplicateVirtualFrame {
                    frame: f.as_str().to_owned(),
                });
            }
        }
        Ok(VirtualizerConfig {
            base_frame,
            virtual_frames,
            combined_output,
            output_geometry,
        })
    }

    pub fn base_frame(&self) -> &FrameId {
        &self.base_frame
    }

    pub fn virtual_frames(&self) -> &[FrameId] {
        &self.virtual_frames
    }

    pub fn combined_output(&self) -> bool {
        self.combined_output
    }

    pub fn output_geometry(&self) -> &ScanGeometry {
        &self.output_geometry
    }
}

/// Produce one scan per virtual frame, in configuration order. All frames
/// are resolved before any scan is produced; one unresolvable frame fails
/// the whole call.
pub fn virtualize(
    cloud: &PointCloud3,
    tree: &TransformTree,
    config: &VirtualizerConfig,
) -> Result<Vec<(FrameId, LaserScan, DropStats)>, VirtualizeError> {
    let mut transforms = Vec::with_capacity(config.virtual_frames.len());
    for v in &config.virtual_frames {
        let t = tree
            .lookup(cloud.frame(), v)
            .map_err(|source| VirtualizeError::FrameResolution {
                cloud_frame: cloud.frame().as_str().to_owned(),
                virtual_frame: v.as_str().to_owned(),
                source,
            })?;
        transforms.push(t);
    }

    let mut out = Vec::with_capacity(transforms.len());
    for (v, t) in config.virtual_frames.iter().zip(&transforms) {
        let local = transform_cloud(cloud, t, v.clone());
        let (scan, stats) = points_to_scan(&local, &config.output_geometry, v.clone());
        out.push((v.clone(), scan, stats));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use std::f64::consts::PI;

    fn frame(name: &str) -> FrameId {
        FrameId::new(name).unwrap()
    }

    fn full_geometry(inc: f64) -> ScanGeometry {
        ScanGeometry::new(-PI, PI - inc, inc, 0.1, 50.0).unwrap()
    }

    fn ring_cloud(frame_name: &str, radius: f64, geom: &ScanGeometry) -> PointCloud3 {
        let mut pts = Vec::new();
        for i in 0..geom.beam_count() {
            let theta = geom.angle_min() + i as f64 * geom.angle_increment();
            pts.push(Point3::new(radius * theta.cos(), radius * theta.sin(), 0.0));
        }
        PointCloud3::new(frame(frame_name), pts).unwrap()
    }

    #[test]
    fn identity_frame_sees_the_ring_at_its_radius() {
        let geom = full_geometry(PI / 90.0);
        let cloud = ring_cloud("lidar", 2.0, &geom);
        let cfg = VirtualizerConfig::new(frame("lidar"), vec![frame("lidar")], false, geom)
            .unwrap();
        let out = virtualize(&cloud, &TransformTree::new(), &cfg).unwrap();
        assert_eq!(out.len(), 1);
        let (v, scan, stats) = &out[0];
        assert_eq!(v.as_str(), "lidar");
        assert_eq!(stats.binned, cloud.len());
        for &r in scan.ranges() {
            assert!((r - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn config_rejects_duplicates_and_empties() {
        let geom = full_geometry(0.1);
        assert_eq!(
            VirtualizerConfig::new(frame("b"), vec![], false, geom).unwrap_err(),
            VirtualizeError::NoVirtualFrames
        );
        assert_eq!(
            VirtualizerConfig::new(
                frame("b"),
                vec![frame("v1"), frame("v2"), frame("v1")],
                false,
                geom
            )
            .unwrap_err(),
            VirtualizeError::DuplicateVirtualFrame {
                frame: "v1".to_owned()
            }
        );
    }

    #[test]
    fn one_unresolvable_frame_fails_the_whole_call() {
        let geom = full_geometry(0.1);
        let cloud = ring_cloud("cloud", 2.0, &geom);
        let mut tree = TransformTree::new();
        tree.add_static_transform(frame("cloud"), frame("v1"), [0.5, 0.0, 0.0], [0.0; 3])
            .unwrap();
        let cfg = VirtualizerConfig::new(
            frame("cloud"),
            vec![frame("v1"), frame("ghost")],
            false,
            geom,
        )
        .unwrap();
        let err = virtualize(&cloud, &tree, &cfg).unwrap_err();
        match err {
            VirtualizeError::FrameResolution { virtual_frame, .. } => {
                assert_eq!(virtual_frame, "ghost");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn each_scan_is_independent_of_its_neighbors() {
        let geom = full_geometry(PI / 180.0);
        let cloud = ring_cloud("cloud", 3.0, &geom);
        let mut tree = TransformTree::new();
        tree.add_static_transform(frame("base"), frame("cloud"), [0.1, -0.2, 0.0], [0.2, 0.0, 0.0])
            .unwrap();
        tree.add_static_transform(frame("base"), frame("v1"), [0.5, 0.5, 0.0], [0.4, 0.0, 0.0])
            .unwrap();
        tree.add_static_transform(frame("base"), frame("v2"), [-0.5, 0.0, 0.1], [0.0, 0.1, 0.0])
            .unwrap();

        let both = VirtualizerConfig::new(
            frame("base"),
            vec![frame("v1"), frame("v2")],
            false,
            geom,
        )
        .unwrap();
        let solo = VirtualizerConfig::new(frame("base"), vec![frame("v1")], false, geom).unwrap();

        let pair = virtualize(&cloud, &tree, &both).unwrap();
        let alone = virtualize(&cloud, &tree, &solo).unwrap();
        assert_eq!(pair.len(), 2);
        assert_eq!(pair[0].0.as_str(), "v1");
        assert_eq!(pair[1].0.as_str(), "v2");
        for (a, b) in pair[0].1.ranges().iter().zip(alone[0].1.ranges()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
