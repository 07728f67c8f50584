//! Shared helpers for the integration suites: an independent 4x4
//! homogeneous-matrix pose oracle built on nalgebra, a brute-force binning
//! oracle, scene builders, and process-level CLI helpers.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use nalgebra::{Matrix4, Rotation3, Vector4};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use scanforge::{FrameId, LaserScan, Point3, PointCloud3, Scene, ScanGeometry, Wall};

pub fn frame(name: &str) -> FrameId {
    FrameId::new(name).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Pose as a homogeneous 4x4 matrix; a transform route with no code in
/// common with the quaternion implementation under test.
#[derive(Debug, Clone, Copy)]
pub struct MatPose(pub Matrix4<f64>);

impl MatPose {
    pub fn identity() -> Self {
        MatPose(Matrix4::identity())
    }

    pub fn from_xyz_ypr(xyz: [f64; 3], ypr: [f64; 3]) -> Self {
        // nalgebra's euler convention is Rz(yaw) * Ry(pitch) * Rx(roll)
        let mut m = Rotation3::from_euler_angles(ypr[2], ypr[1], ypr[0]).to_homogeneous();
        m[(0, 3)] = xyz[0];
        m[(1, 3)] = xyz[1];
        m[(2, 3)] = xyz[2];
        MatPose(m)
    }

    pub fn compose(&self, other: &MatPose) -> MatPose {
        MatPose(self.0 * other.0)
    }

    pub fn inverse(&self) -> MatPose {
        MatPose(self.0.try_inverse().expect("rigid transforms invert"))
    }

    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let v = self.0 * Vector4::new(p[0], p[1], p[2], 1.0);
        [v[0], v[1], v[2]]
    }

    pub fn apply_point(&self, p: Point3) -> Point3 {
        let out = self.apply([p.x, p.y, p.z]);
        Point3::new(out[0], out[1], out[2])
    }
}

/// Brute-force reference binning: one pass per point, minimum per bin,
/// following the documented drop rules (round to nearest bin center, index
/// bounds, then range bounds).
pub fn oracle_bin_points(points: &[Point3], geom: &ScanGeometry) -> Vec<f64> {
    let n = geom.beam_count();
    let mut bins = vec![f64::INFINITY; n];
    for p in points {
        if p.x == 0.0 && p.y == 0.0 {
            continue;
        }
        let bearing = p.y.atan2(p.x);
        let index = ((bearing - geom.angle_min()) / geom.angle_increment()).round();
        if index < 0.0 || index >= n as f64 {
            continue;
        }
        let range = (p.x * p.x + p.y * p.y).sqrt();
        if range < geom.range_min() || range > geom.range_max() {
            continue;
        }
        let i = index as usize;
        if range < bins[i] {
            bins[i] = range;
        }
    }
    bins
}

/// Expand a scan's finite beams to local points the same way the paper-style
/// pipelines do, but with plain trigonometry on the spot.
pub fn oracle_scan_points(scan: &LaserScan) -> Vec<Point3> {
    let mut out = Vec::new();
    for (i, &r) in scan.ranges().iter().enumerate() {
        if !r.is_finite() {
            continue;
        }
        let theta = scan.angle_min() + i as f64 * scan.angle_increment();
        out.push(Point3::new(r * theta.cos(), r * theta.sin(), 0.0));
    }
    out
}

/// The documented default output geometry for merging: smallest input
/// increment over a full sweep starting at -pi, union of range bounds.
pub fn oracle_default_geometry(scans: &[LaserScan]) -> ScanGeometry {
    let inc = scans
        .iter()
        .map(LaserScan::angle_increment)
        .fold(f64::INFINITY, f64::min);
    let rmin = scans
        .iter()
        .map(LaserScan::range_min)
        .fold(f64::INFINITY, f64::min);
    let rmax = scans
        .iter()
        .map(LaserScan::range_max)
        .fold(f64::NEG_INFINITY, f64::max);
    ScanGeometry::new(-std::f64::consts::PI, std::f64::consts::PI - inc, inc, rmin, rmax)
        .unwrap()
}

pub fn assert_ranges_close(actual: &[f64], expected: &[f64], tol: f64, label: &str) {
    assert_eq!(actual.len(), expected.len(), "{label}: length mismatch");
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        match (a.is_finite(), e.is_finite()) {
            (true, true) => assert!(
                (a - e).abs() <= tol,
                "{label}: bin {i}: {a} vs {e} (|diff| = {})",
                (a - e).abs()
            ),
            (false, false) => {}
            _ => panic!("{label}: bin {i}: finite/infinite mismatch ({a} vs {e})"),
        }
    }
}

pub fn assert_scan_close(actual: &LaserScan, expected: &LaserScan, tol: f64, label: &str) {
    assert_eq!(actual.frame(), expected.frame(), "{label}: frame");
    assert_eq!(
        actual.angle_min().to_bits(),
        expected.angle_min().to_bits(),
        "{label}: angle_min"
    );
    assert_eq!(
        actual.angle_max().to_bits(),
        expected.angle_max().to_bits(),
        "{label}: angle_max"
    );
    assert_eq!(
        actual.angle_increment().to_bits(),
        expected.angle_increment().to_bits(),
        "{label}: angle_increment"
    );
    assert_ranges_close(actual.ranges(), expected.ranges(), tol, label);
}

pub fn assert_cloud_close(actual: &PointCloud3, expected: &PointCloud3, tol: f64, label: &str) {
    assert_eq!(actual.frame(), expected.frame(), "{label}: frame");
    assert_eq!(actual.len(), expected.len(), "{label}: point count");
    for (i, (a, e)) in actual.points().iter().zip(expected.points()).enumerate() {
        assert!(
            a.distance(e) <= tol,
            "{label}: point {i}: {a:?} vs {e:?}"
        );
    }
}

/// A 12 x 8 room around the origin with a couple of interior panels; all
/// walls straddle z = 0 so level scanners see them.
pub fn room_scene() -> Scene {
    Scene::new(vec![
        Wall::new([-6.0, -4.0], [6.0, -4.0], -1.0, 1.0).unwrap(),
        Wall::new([6.0, -4.0], [6.0, 4.0], -1.0, 1.0).unwrap(),
        Wall::new([6.0, 4.0], [-6.0, 4.0], -1.0, 1.0).unwrap(),
        Wall::new([-6.0, 4.0], [-6.0, -4.0], -1.0, 1.0).unwrap(),
        Wall::new([3.0, 1.0], [3.5, 2.0], -1.0, 1.0).unwrap(),
        Wall::new([-2.0, -3.0], [-1.0, -2.5], -1.0, 1.0).unwrap(),
    ])
}

/// A handful of random panels scattered around the origin, each straddling
/// z = 0.
pub fn random_scene(rng: &mut StdRng, walls: usize) -> Scene {
    let mut out = Vec::with_capacity(walls);
    while out.len() < walls {
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let radius = rng.random_range(3.0..9.0);
        let cx = radius * angle.cos();
        let cy = radius * angle.sin();
        let half = rng.random_range(0.3..2.0);
        let dir = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let (dx, dy) = (half * dir.cos(), half * dir.sin());
        let z_lo = rng.random_range(-1.5..-0.1);
        let z_hi = rng.random_range(0.1..1.5);
        if let Ok(wall) = Wall::new([cx - dx, cy - dy], [cx + dx, cy + dy], z_lo, z_hi) {
            out.push(wall);
        }
    }
    Scene::new(out)
}

pub fn scanforge_bin() -> &'static str {
    env!("CARGO_BIN_EXE_scanforge")
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn copy_fixtures(dest: &Path, names: &[&str]) {
    for name in names {
        std::fs::copy(data_dir().join(name), dest.join(name))
            .unwrap_or_else(|e| panic!("copying fixture {name}: {e}"));
    }
}

pub fn run_cli(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(scanforge_bin());
    cmd.args(args);
    match stdin {
        Some(text) => {
            cmd.stdin(Stdio::piped());
            cmd.stdout(Stdio::piped());
            cmd.stderr(Stdio::piped());
            let mut child = cmd.spawn().expect("spawn scanforge");
            use std::io::Write;
            child
                .stdin
                .take()
                .unwrap()
                .write_all(text.as_bytes())
                .expect("write stdin");
            child.wait_with_output().expect("scanforge output")
        }
        None => cmd.output().expect("scanforge output"),
    }
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("scanforge exited via signal")
}
