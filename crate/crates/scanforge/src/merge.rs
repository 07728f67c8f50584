//! Merge several planar scans into one virtual scan.
//!
//! Every input scan is expanded to points, re-expressed in the destination
//! frame, and the concatenated cloud is flattened back into a single scan,
//! as if measured from the destination frame's origin. The intermediate
//! cloud keeps its true 3D coordinates and is returned alongside the scan
//! for debugging.

use std::f64::consts::PI;

use thiserror::Error;

use crate::convert::{points_to_scan, scan_to_points, transform_cloud, DropStats, ScanGeometry};
use crate::frame_tree::{TransformTree, TreeError};
use crate::geometry::{FrameId, GeometryError, LaserScan, PointCloud3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MergeError {
    #[error("at least one input scan is required")]
    NoInputs,
    #[error("config lists {expected} inputs but {actual} scans were supplied")]
    InputCountMismatch { expected: usize, actual: usize },
    #[error("input {input:?} (frame {frame:?}): {source}")]
    FrameResolution {
        input: String,
        frame: String,
        source: TreeError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Configuration of one merge pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeConfig {
    destination_frame: FrameId,
    output_geometry: ScanGeometry,
    inputs: Vec<String>,
    emit_cloud: bool,
}

impl MergeConfig {
    pub fn new(
        destination_frame: FrameId,
        output_geometry: ScanGeometry,
        inputs: Vec<String>,
        emit_cloud: bool,
    ) -> Result<Self, MergeError> {
        if inputs.is_empty() {
            return Err(MergeError::NoInputs);
        }
        Ok(MergeConfig {
            destination_frame,
            output_geometry,
            inputs,
            emit_cloud,
        })
    }

    pub fn destination_frame(&self) -> &FrameId {
        &self.destination_frame
    }

    pub fn output_geometry(&self) -> &ScanGeometry {
        &self.output_geometry
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn emit_cloud(&self) -> bool {
        self.emit_cloud
    }
}

/// Output geometry used when none is configured: a full sweep starting at
/// -pi whose last bin sits one increment short of +pi, the smallest input
/// increment, and the union of the input range bounds.
pub fn default_output_geometry(scans: &[LaserScan]) -> Result<ScanGeometry, MergeError> {
    if scans.is_empty() {
        return Err(MergeError::NoInputs);
    }
    let inc = scans
        .iter()
        .map(LaserScan::angle_increment)
        .fold(f64::INFINITY, f64::min);
    let range_min = scans
        .iter()
        .map(LaserScan::range_min)
        .fold(f64::INFINITY, f64::min);
    let range_max = scans
        .iter()
        .map(LaserScan::range_max)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ScanGeometry::new(-PI, PI - inc, inc, range_min, range_max)?)
}

/// Merge one scan per configured input into a single scan in the
/// destination frame. Returns the merged scan, the concatenated destination
/// frame cloud (points in input order, pre-flattening), and the binning
/// accounting.
pub fn merge_scans(
    scans: &[LaserScan],
    tree: &TransformTree,
    config: &MergeConfig,
) -> Result<(LaserScan, PointCloud3, DropStats), MergeError> {
    if scans.is_empty() {
        return Err(MergeError::NoInputs);
    }
    if scans.len() != config.inputs.len() {
        return Err(MergeError::InputCountMismatch {
            expected: config.inputs.len(),
            actual: scans.len(),
        });
    }

    // resolve every frame before touching any data
    let mut transforms = Vec::with_capacity(scans.len());
    for (scan, input) in scans.iter().zip(&config.inputs) {
        let t = tree
            .lookup(scan.frame(), &config.destination_frame)
            .map_err(|source| MergeError::FrameResolution {
                input: input.clone(),
                frame: scan.frame().as_str().to_owned(),
                source,
            })?;
        transforms.push(t);
    }

    let mut merged_points = Vec::new();
    for (scan, t) in scans.iter().zip(&transforms) {
        let (points, _skipped) = scan_to_points(scan);
        let moved = transform_cloud(&points, t, config.destination_frame.clone());
        merged_points.extend_from_slice(moved.points());
    }
    let cloud = PointCloud3::from_validated(config.destination_frame.clone(), merged_points);
    let (scan, stats) = points_to_scan(
        &cloud,
        &config.output_geometry,
        config.destination_frame.clone(),
    );
    Ok((scan, cloud, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn frame(name: &str) -> FrameId {
        FrameId::new(name).unwrap()
    }

    fn beams_on_centers(frame_name: &str, ranges: Vec<f64>) -> LaserScan {
        let inc = PI / 180.0;
        let angle_min = -FRAC_PI_2;
        let angle_max = angle_min + (ranges.len() - 1) as f64 * inc;
        LaserScan::new(frame(frame_name), angle_min, angle_max, inc, 0.1, 50.0, ranges).unwrap()
    }

    fn config_for(scan: &LaserScan, inputs: Vec<String>) -> MergeConfig {
        MergeConfig::new(
            scan.frame().clone(),
            ScanGeometry::of_scan(scan).unwrap(),
            inputs,
            true,
        )
        .unwrap()
    }

    #[test]
    fn identity_pipeline_reproduces_the_input() {
        let ranges = vec![1.0, 2.5, f64::INFINITY, 4.0, 0.5];
        let scan = beams_on_centers("base", ranges.clone());
        let tree = TransformTree::new();
        let cfg = config_for(&scan, vec!["only".into()]);
        let (out, cloud, stats) = merge_scans(std::slice::from_ref(&scan), &tree, &cfg).unwrap();
        assert_eq!(out.ranges().len(), ranges.len());
        for (a, b) in out.ranges().iter().zip(&ranges) {
            if b.is_finite() {
                assert!((a - b).abs() < 1e-9);
            } else {
                assert!(!a.is_finite());
            }
        }
        assert_eq!(cloud.len(), 4);
        assert_eq!(stats.binned, 4);
    }

    #[test]
    fn merging_a_scan_with_its_copy_is_idempotent() {
        let scan = beams_on_centers("base", vec![1.0, 2.0, 3.0, f64::INFINITY, 2.0]);
        let tree = TransformTree::new();
        let cfg = MergeConfig::new(
            frame("base"),
            ScanGeometry::of_scan(&scan).unwrap(),
            vec!["a".into(), "b".into()],
            false,
        )
        .unwrap();
        let (out, _, _) = merge_scans(&[scan.clone(), scan.clone()], &tree, &cfg).unwrap();
        for (a, b) in out.ranges().iter().zip(scan.ranges()) {
            if b.is_finite() {
                assert!((a - b).abs() < 1e-9);
            } else {
                assert!(!a.is_finite());
            }
        }
    }

    #[test]
    fn output_is_bit_identical_under_input_permutation() {
        let mut tree = TransformTree::new();
        tree.add_static_transform(frame("dest"), frame("s1"), [0.5, 0.0, 0.0], [0.3, 0.0, 0.0])
            .unwrap();
        tree.add_static_transform(frame("dest"), frame("s2"), [-0.5, 0.2, 0.0], [-0.7, 0.0, 0.0])
            .unwrap();
        let a = beams_on_centers("s1", vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = beams_on_centers("s2", vec![2.0, 2.0, f64::INFINITY, 1.5, 8.0]);
        let geom = ScanGeometry::new(-PI, PI - 0.01, 0.01, 0.1, 50.0).unwrap();
        let cfg = MergeConfig::new(
            frame("dest"),
            geom,
            vec!["a".into(), "b".into()],
            false,
        )
        .unwrap();
        let (fwd, _, _) = merge_scans(&[a.clone(), b.clone()], &tree, &cfg).unwrap();
        let (rev, _, _) = merge_scans(&[b, a], &tree, &cfg).unwrap();
        for (x, y) in fwd.ranges().iter().zip(rev.ranges()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn same_frame_input_matches_an_explicit_identity_edge() {
        let ranges = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let direct = beams_on_centers("dest", ranges.clone());
        let relabeled = beams_on_centers("s1", ranges);

        let geom = ScanGeometry::of_scan(&direct).unwrap();
        let (out_direct, cloud_direct, _) = merge_scans(
            std::slice::from_ref(&direct),
            &TransformTree::new(),
            &MergeConfig::new(frame("dest"), geom, vec!["in".into()], true).unwrap(),
        )
        .unwrap();

        let mut tree = TransformTree::new();
        tree.add_static_transform(frame("dest"), frame("s1"), [0.0; 3], [0.0; 3])
            .unwrap();
        let (out_edge, cloud_edge, _) = merge_scans(
            std::slice::from_ref(&relabeled),
            &tree,
            &MergeConfig::new(frame("dest"), geom, vec!["in".into()], true).unwrap(),
        )
        .unwrap();

        for (a, b) in out_direct.ranges().iter().zip(out_edge.ranges()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in cloud_direct.points().iter().zip(cloud_edge.points()) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            assert_eq!(a.z.to_bits(), b.z.to_bits());
        }
    }

    #[test]
    fn error_cases_name_the_offender() {
        let scan = beams_on_centers("lost", vec![1.0, 2.0, 3.0]);
        let geom = ScanGeometry::of_scan(&scan).unwrap();
        let cfg = MergeConfig::new(frame("dest"), geom, vec!["front".into()], false).unwrap();

        assert_eq!(
            merge_scans(&[], &TransformTree::new(), &cfg).unwrap_err(),
            MergeError::NoInputs
        );
        assert!(matches!(
            merge_scans(&[scan.clone(), scan.clone()], &TransformTree::new(), &cfg).unwrap_err(),
            MergeError::InputCountMismatch {
                expected: 1,
                actual: 2
            }
        ));
        let err = merge_scans(std::slice::from_ref(&scan), &TransformTree::new(), &cfg)
            .unwrap_err();
        match err {
            MergeError::FrameResolution { input, frame, .. } => {
                assert_eq!(input, "front");
                assert_eq!(frame, "lost");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(MergeConfig::new(frame("dest"), geom, vec![], false).is_err());
    }

    #[test]
    fn default_geometry_takes_the_union_of_inputs() {
        let a = LaserScan::new(frame("a"), 0.0, 1.0, 0.5, 0.2, 10.0, vec![1.0; 3]).unwrap();
        let b = LaserScan::new(frame("b"), 0.0, 1.0, 0.25, 0.5, 30.0, vec![1.0; 5]).unwrap();
        let geom = default_output_geometry(&[a, b]).unwrap();
        assert_eq!(geom.angle_increment(), 0.25);
        assert_eq!(geom.range_min(), 0.2);
        assert_eq!(geom.range_max(), 30.0);
        assert_eq!(geom.angle_min(), -PI);
        assert_eq!(geom.angle_max(), PI - 0.25);
    }
}
