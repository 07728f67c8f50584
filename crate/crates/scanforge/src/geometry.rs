//! Frame-tagged geometric primitives shared by all pipelines.
//!
//! Everything here is an immutable value type: construct, validate once,
//! then share freely across threads.

use thiserror::Error;

/// Errors produced when constructing or using the core geometric types.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("frame name must be non-empty")]
    EmptyFrameName,
    #[error("frame name {name:?} must not contain whitespace")]
    WhitespaceFrameName { name: String },
    #[error("point {index} is not finite")]
    NonFinitePoint { index: usize },
    #[error("input point is not finite")]
    NonFiniteInput,
    #[error("quaternion norm is too small to normalize")]
    ZeroQuaternion,
    #[error("beam index {index} out of bounds for {count} beams")]
    BeamIndexOutOfBounds { index: usize, count: usize },
    #[error("angle_increment must be finite and positive, got {value}")]
    BadAngleIncrement { value: f64 },
    #[error("angle_max {max} must be finite and >= angle_min {min}")]
    BadAngleOrder { min: f64, max: f64 },
    #[error("range bounds must satisfy 0 <= range_min < range_max, got [{min}, {max}]")]
    BadRangeBounds { min: f64, max: f64 },
    #[error("expected {expected} ranges for the angular extent, found {actual}")]
    RangeCountMismatch { expected: usize, actual: usize },
    #[error("range[{index}] = {value} is not a valid measurement")]
    BadRangeValue { index: usize, value: f64 },
    #[error("angular span {span} exceeds a full circle")]
    SpanTooWide { span: f64 },
}

/// Name of a coordinate frame. Non-empty, no whitespace; compared byte-exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameId(String);

impl FrameId {
    pub fn new(name: impl Into<String>) -> Result<Self, GeometryError> {
        let name = name.into();
        if name.is_empty() {
            return Err(GeometryError::EmptyFrameName);
        }
        if name.chars().any(char::is_whitespace) {
            return Err(GeometryError::WhitespaceFrameName { name });
        }
        Ok(FrameId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for FrameId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for FrameId {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrameId::new(s)
    }
}

/// A 3D point or vector in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Unit quaternion, scalar-first (w, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Quat {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Quat {
    const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn normalized(&self) -> Result<Quat, GeometryError> {
        let n = self.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(GeometryError::ZeroQuaternion);
        }
        Ok(Quat {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        })
    }

    fn conjugate(&self) -> Quat {
        Quat {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    fn mul(&self, o: &Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    /// Rotate a vector: v' = v + 2w(q_v × v) + 2 q_v × (q_v × v).
    fn rotate(&self, v: Point3) -> Point3 {
        let (qx, qy, qz, w) = (self.x, self.y, self.z, self.w);
        let cx = qy * v.z - qz * v.y;
        let cy = qz * v.x - qx * v.z;
        let cz = qx * v.y - qy * v.x;
        let ccx = qy * cz - qz * cy;
        let ccy = qz * cx - qx * cz;
        let ccz = qx * cy - qy * cx;
        Point3 {
            x: v.x + 2.0 * (w * cx + ccx),
            y: v.y + 2.0 * (w * cy + ccy),
            z: v.z + 2.0 * (w * cz + ccz),
        }
    }

    fn about_z(angle: f64) -> Quat {
        let h = angle * 0.5;
        Quat {
            w: h.cos(),
            x: 0.0,
            y: 0.0,
            z: h.sin(),
        }
    }

    fn about_y(angle: f64) -> Quat {
        let h = angle * 0.5;
        Quat {
            w: h.cos(),
            x: 0.0,
            y: h.sin(),
            z: 0.0,
        }
    }

    fn about_x(angle: f64) -> Quat {
        let h = angle * 0.5;
        Quat {
            w: h.cos(),
            x: h.sin(),
            y: 0.0,
            z: 0.0,
        }
    }
}

/// SE(3) rigid transform: rotation (unit quaternion) followed by translation.
///
/// The quaternion is renormalized after every composition so long chains do
/// not drift away from the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: Quat,
    translation: Point3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Quat::IDENTITY,
            translation: Point3::new(0.0, 0.0, 0.0),
        }
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        RigidTransform {
            rotation: Quat::IDENTITY,
            translation: Point3::new(x, y, z),
        }
    }

    /// Build from a translation and intrinsic yaw-pitch-roll angles applied
    /// as Z, then Y, then X (the `x y z yaw pitch roll` convention used by
    /// static transform broadcasters).
    pub fn from_xyz_ypr(xyz: [f64; 3], ypr: [f64; 3]) -> Result<Self, GeometryError> {
        let translation = Point3::new(xyz[0], xyz[1], xyz[2]);
        if !translation.is_finite() || ypr.iter().any(|a| !a.is_finite()) {
            return Err(GeometryError::NonFiniteInput);
        }
        let q = Quat::about_z(ypr[0])
            .mul(&Quat::about_y(ypr[1]))
            .mul(&Quat::about_x(ypr[2]));
        Ok(RigidTransform {
            rotation: q.normalized()?,
            translation,
        })
    }

    /// Build from a translation and a scalar-first (w, x, y, z) quaternion.
    /// The quaternion is normalized; a near-zero quaternion is rejected.
    pub fn from_translation_quaternion(
        translation: Point3,
        wxyz: [f64; 4],
    ) -> Result<Self, GeometryError> {
        if !translation.is_finite() || wxyz.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFiniteInput);
        }
        let q = Quat {
            w: wxyz[0],
            x: wxyz[1],
            y: wxyz[2],
            z: wxyz[3],
        };
        Ok(RigidTransform {
            rotation: q.normalized()?,
            translation,
        })
    }

    pub fn translation(&self) -> Point3 {
        self.translation
    }

    /// Rotation as scalar-first (w, x, y, z).
    pub fn rotation_wxyz(&self) -> [f64; 4] {
        [
            self.rotation.w,
            self.rotation.x,
            self.rotation.y,
            self.rotation.z,
        ]
    }

    pub fn is_identity(&self) -> bool {
        self.rotation == Quat::IDENTITY && self.translation == Point3::new(0.0, 0.0, 0.0)
    }

    /// Composition: apply `other` first, then `self`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        let rotation = self
            .rotation
            .mul(&other.rotation)
            .normalized()
            .expect("product of unit quaternions stays far from zero");
        let t = self.rotation.rotate(other.translation);
        RigidTransform {
            rotation,
            translation: Point3::new(
                t.x + self.translation.x,
                t.y + self.translation.y,
                t.z + self.translation.z,
            ),
        }
    }

    pub fn invert(&self) -> RigidTransform {
        let conj = self.rotation.conjugate();
        let t = conj.rotate(self.translation);
        RigidTransform {
            rotation: conj,
            translation: Point3::new(-t.x, -t.y, -t.z),
        }
    }

    /// Apply the transform to a point: rotate, then translate.
    pub fn apply(&self, p: Point3) -> Result<Point3, GeometryError> {
        if !p.is_finite() {
            return Err(GeometryError::NonFiniteInput);
        }
        Ok(self.apply_raw(p))
    }

    pub(crate) fn apply_raw(&self, p: Point3) -> Point3 {
        let r = self.rotation.rotate(p);
        Point3 {
            x: r.x + self.translation.x,
            y: r.y + self.translation.y,
            z: r.z + self.translation.z,
        }
    }

    /// Rotate a vector without translating it.
    pub fn rotate(&self, v: Point3) -> Point3 {
        self.rotation.rotate(v)
    }

    pub fn quaternion_norm(&self) -> f64 {
        self.rotation.norm()
    }
}

/// Number of beams implied by an inclusive angular extent:
/// `floor((angle_max - angle_min) / angle_increment) + 1`, with a 1e-9 guard
/// so spans that are an exact multiple of the increment are not truncated by
/// floating-point rounding.
pub(crate) fn beam_count(angle_min: f64, angle_max: f64, angle_increment: f64) -> usize {
    ((angle_max - angle_min) / angle_increment + 1e-9).floor() as usize + 1
}

pub(crate) fn validate_scan_params(
    angle_min: f64,
    angle_max: f64,
    angle_increment: f64,
    range_min: f64,
    range_max: f64,
) -> Result<(), GeometryError> {
    if !angle_increment.is_finite() || angle_increment <= 0.0 {
        return Err(GeometryError::BadAngleIncrement {
            value: angle_increment,
        });
    }
    if !angle_min.is_finite() || !angle_max.is_finite() || angle_max < angle_min {
        return Err(GeometryError::BadAngleOrder {
            min: angle_min,
            max: angle_max,
        });
    }
    if !range_min.is_finite() || !range_max.is_finite() || range_min < 0.0 || range_min >= range_max
    {
        return Err(GeometryError::BadRangeBounds {
            min: range_min,
            max: range_max,
        });
    }
    Ok(())
}

/// Planar range scan: evenly spaced bearings from `angle_min` to `angle_max`,
/// one range per beam. A beam with no return holds positive infinity; NaN is
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserScan {
    frame: FrameId,
    angle_min: f64,
    angle_max: f64,
    angle_increment: f64,
    range_min: f64,
    range_max: f64,
    ranges: Vec<f64>,
}

impl LaserScan {
    pub fn new(
        frame: FrameId,
        angle_min: f64,
        angle_max: f64,
        angle_increment: f64,
        range_min: f64,
        range_max: f64,
        ranges: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        validate_scan_params(angle_min, angle_max, angle_increment, range_min, range_max)?;
        let expected = beam_count(angle_min, angle_max, angle_increment);
        if ranges.len() != expected {
            return Err(GeometryError::RangeCountMismatch {
                expected,
                actual: ranges.len(),
            });
        }
        for (index, &r) in ranges.iter().enumerate() {
            let valid = if r.is_finite() {
                r >= range_min && r <= range_max
            } else {
                r == f64::INFINITY
            };
            if !valid {
                return Err(GeometryError::BadRangeValue { index, value: r });
            }
        }
        Ok(LaserScan {
            frame,
            angle_min,
            angle_max,
            angle_increment,
            range_min,
            range_max,
            ranges,
        })
    }

    pub fn frame(&self) -> &FrameId {
        &self.frame
    }

    pub fn angle_min(&self) -> f64 {
        self.angle_min
    }

    pub fn angle_max(&self) -> f64 {
        self.angle_max
    }

    pub fn angle_increment(&self) -> f64 {
        self.angle_increment
    }

    pub fn range_min(&self) -> f64 {
        self.range_min
    }

    pub fn range_max(&self) -> f64 {
        self.range_max
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }

    /// Bearing of beam `i`: `angle_min + i * angle_increment`.
    pub fn beam_angle(&self, i: usize) -> Result<f64, GeometryError> {
        if i >= self.ranges.len() {
            return Err(GeometryError::BeamIndexOutOfBounds {
                index: i,
                count: self.ranges.len(),
            });
        }
        Ok(self.angle_min + i as f64 * self.angle_increment)
    }
}

/// An unordered set of 3D points expressed in a named frame. Non-finite
/// points are rejected at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud3 {
    frame: FrameId,
    points: Vec<Point3>,
}

impl PointCloud3 {
    pub fn new(frame: FrameId, points: Vec<Point3>) -> Result<Self, GeometryError> {
        for (index, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinitePoint { index });
            }
        }
        Ok(PointCloud3 { frame, points })
    }

    /// Construct from points already known to be finite.
    pub(crate) fn from_validated(frame: FrameId, points: Vec<Point3>) -> Self {
        debug_assert!(points.iter().all(Point3::is_finite));
        PointCloud3 { frame, points }
    }

    pub fn frame(&self) -> &FrameId {
        &self.frame
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
