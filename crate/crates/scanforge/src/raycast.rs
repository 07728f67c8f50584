//! Synthetic scenes and an exact raycaster.
//!
//! Scenes are collections of vertical wall panels. Beams are intersected
//! with walls in closed form (2D segment intersection plus a z-interval
//! check at the hit), so generated scans and clouds carry no sampling or
//! discretization error and can serve as ground truth for the pipelines.

use thiserror::Error;

use crate::convert::ScanGeometry;
use crate::geometry::{FrameId, LaserScan, Point3, PointCloud3, RigidTransform};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("wall endpoints are closer than 1e-9 m apart")]
    DegenerateWall,
    #[error("wall z interval [{lo}, {hi}] is empty")]
    EmptyHeight { lo: f64, hi: f64 },
    #[error("wall coordinates must be finite")]
    NonFinite,
}

/// Vertical rectangular panel: the segment `p0 -> p1` extruded over
/// `z_lo..z_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    p0: [f64; 2],
    p1: [f64; 2],
    z_lo: f64,
    z_hi: f64,
}

impl Wall {
    pub fn new(p0: [f64; 2], p1: [f64; 2], z_lo: f64, z_hi: f64) -> Result<Self, SceneError> {
        let finite = p0.iter().chain(&p1).all(|v| v.is_finite())
            && z_lo.is_finite()
            && z_hi.is_finite();
        if !finite {
            return Err(SceneError::NonFinite);
        }
        let dx = p1[0] - p0[0];
        let dy = p1[1] - p0[1];
        if (dx * dx + dy * dy).sqrt() <= 1e-9 {
            return Err(SceneError::DegenerateWall);
        }
        if z_lo >= z_hi {
            return Err(SceneError::EmptyHeight { lo: z_lo, hi: z_hi });
        }
        Ok(Wall { p0, p1, z_lo, z_hi })
    }

    pub fn p0(&self) -> [f64; 2] {
        self.p0
    }

    pub fn p1(&self) -> [f64; 2] {
        self.p1
    }

    pub fn z_lo(&self) -> f64 {
        self.z_lo
    }

    pub fn z_hi(&self) -> f64 {
        self.z_hi
    }
}

/// A set of walls. An empty scene is valid and returns no hits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene {
    walls: Vec<Wall>,
}

impl Scene {
    pub fn new(walls: Vec<Wall>) -> Self {
        Scene { walls }
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }
}

/// Distance along the unit-ish ray `origin + t * dir` to the nearest wall,
/// if any. Rays parallel to a wall (|det| < 1e-12) miss it; grazing hits at
/// segment endpoints or z bounds count (closed intervals).
fn nearest_hit(scene: &Scene, origin: Point3, dir: Point3) -> Option<f64> {
    let mut best: Option<f64> = None;
    for wall in &scene.walls {
        let ex = wall.p1[0] - wall.p0[0];
        let ey = wall.p1[1] - wall.p0[1];
        let det = ex * dir.y - ey * dir.x;
        if det.abs() < 1e-12 {
            continue;
        }
        let bx = wall.p0[0] - origin.x;
        let by = wall.p0[1] - origin.y;
        let t = (ex * by - ey * bx) / det;
        let s = (dir.x * by - dir.y * bx) / det;
        if t < 0.0 || !(0.0..=1.0).contains(&s) {
            continue;
        }
        let z = origin.z + t * dir.z;
        if z < wall.z_lo || z > wall.z_hi {
            continue;
        }
        if best.map_or(true, |b| t < b) {
            best = Some(t);
        }
    }
    best
}

/// Scan the scene from `sensor_pose` (the sensor's pose in scene
/// coordinates). Beams sweep the sensor's x-y plane; a beam's range is the
/// nearest hit distance when it falls inside the range bounds, otherwise
/// the no-return sentinel.
pub fn raycast_scan(
    scene: &Scene,
    sensor_pose: &RigidTransform,
    geometry: &ScanGeometry,
    frame: FrameId,
) -> LaserScan {
    let origin = sensor_pose.translation();
    let n = geometry.beam_count();
    let mut ranges = Vec::with_capacity(n);
    for i in 0..n {
        let theta = geometry.angle_min() + i as f64 * geometry.angle_increment();
        let dir = sensor_pose.rotate(Point3::new(theta.cos(), theta.sin(), 0.0));
        let range = match nearest_hit(scene, origin, dir) {
            Some(t) if t >= geometry.range_min() && t <= geometry.range_max() => t,
            _ => f64::INFINITY,
        };
        ranges.push(range);
    }
    LaserScan::new(
        frame,
        geometry.angle_min(),
        geometry.angle_max(),
        geometry.angle_increment(),
        geometry.range_min(),
        geometry.range_max(),
        ranges,
    )
    .expect("raycast ranges satisfy the scan invariants")
}

/// Sweep several elevation angles to produce a multi-plane cloud, expressed
/// in the sensor's own frame. Beam directions are
/// `(cos φ cos θ, cos φ sin θ, sin φ)`; hits outside the range bounds are
/// discarded. Points are emitted elevation-major in beam order.
pub fn raycast_cloud(
    scene: &Scene,
    sensor_pose: &RigidTransform,
    geometry: &ScanGeometry,
    elevations: &[f64],
    frame: FrameId,
) -> PointCloud3 {
    let origin = sensor_pose.translation();
    let n = geometry.beam_count();
    let mut points = Vec::new();
    for &phi in elevations {
        let (sin_phi, cos_phi) = phi.sin_cos();
        for i in 0..n {
            let theta = geometry.angle_min() + i as f64 * geometry.angle_increment();
            let local = Point3::new(cos_phi * theta.cos(), cos_phi * theta.sin(), sin_phi);
            let dir = sensor_pose.rotate(local);
            if let Some(t) = nearest_hit(scene, origin, dir) {
                if t >= geometry.range_min() && t <= geometry.range_max() {
                    points.push(Point3::new(t * local.x, t * local.y, t * local.z));
                }
            }
        }
    }
    PointCloud3::from_validated(frame, points)
}
