//! Conversions between planar scans and 3D points.
//!
//! `scan_to_points` expands polar beams into Cartesian points in the scan's
//! own frame. `points_to_scan` flattens a cloud onto the scan plane (z is
//! discarded) and bins each point by bearing, keeping the minimum range per
//! bin, which is how a scan measured from the output frame's origin would
//! see the same geometry.

use crate::geometry::{
    beam_count, validate_scan_params, FrameId, GeometryError, LaserScan, Point3, PointCloud3,
    RigidTransform,
};

/// Angular extent, resolution, and range bounds of an output scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGeometry {
    angle_min: f64,
    angle_max: f64,
    angle_increment: f64,
    range_min: f64,
    range_max: f64,
}

impl ScanGeometry {
    pub fn new(
        angle_min: f64,
        angle_max: f64,
        angle_increment: f64,
        range_min: f64,
        range_max: f64,
    ) -> Result<Self, GeometryError> {
        validate_scan_params(angle_min, angle_max, angle_increment, range_min, range_max)?;
        let span = angle_max - angle_min;
        if span > 2.0 * std::f64::consts::PI + 1e-9 {
            return Err(GeometryError::SpanTooWide { span });
        }
        Ok(ScanGeometry {
            angle_min,
            angle_max,
            angle_increment,
            range_min,
            range_max,
        })
    }

    /// Geometry of an existing scan. Fails only if the scan spans more than
    /// a full circle.
    pub fn of_scan(scan: &LaserScan) -> Result<Self, GeometryError> {
        ScanGeometry::new(
            scan.angle_min(),
            scan.angle_max(),
            scan.angle_increment(),
            scan.range_min(),
            scan.range_max(),
        )
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

    pub fn beam_count(&self) -> usize {
        beam_count(self.angle_min, self.angle_max, self.angle_increment)
    }
}

/// Accounting for one cloud-to-scan conversion. Every input point lands in
/// exactly one bucket, so `binned + bearing + range_low + range_high + z_band`
/// always equals the number of input points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DropStats {
    /// Points that contributed to a bin.
    pub binned: usize,
    /// Bearing outside the angular extent, or past the last bin center by
    /// more than half an increment.
    pub bearing: usize,
    /// In-plane range below `range_min` (includes points at the origin,
    /// whose bearing is undefined).
    pub range_low: usize,
    /// In-plane range above `range_max`.
    pub range_high: usize,
    /// Outside the optional z band; always zero on the default path.
    pub z_band: usize,
}

impl DropStats {
    pub fn dropped(&self) -> usize {
        self.bearing + self.range_low + self.range_high + self.z_band
    }

    pub fn total(&self) -> usize {
        self.binned + self.dropped()
    }
}

/// Expand each finite, in-bounds beam into a point `(r cos θ, r sin θ, 0)`
/// in the scan's own frame. Returns the cloud and the number of skipped
/// (no-return) beams.
pub fn scan_to_points(scan: &LaserScan) -> (PointCloud3, usize) {
    let mut points = Vec::with_capacity(scan.ranges().len());
    let mut skipped = 0usize;
    for (i, &r) in scan.ranges().iter().enumerate() {
        if !r.is_finite() || r < scan.range_min() || r > scan.range_max() {
            skipped += 1;
            continue;
        }
        let theta = scan.angle_min() + i as f64 * scan.angle_increment();
        points.push(Point3::new(r * theta.cos(), r * theta.sin(), 0.0));
    }
    (
        PointCloud3::from_validated(scan.frame().clone(), points),
        skipped,
    )
}

/// Flatten a cloud (already expressed in the output frame) into a planar
/// scan.
///
/// Per point: range = sqrt(x^2 + y^2) with z discarded, bearing = atan2(y, x).
/// Drop rules, applied in this order, each point counted once:
///   1. x = y = 0 (bearing undefined): range_low
///   2. bin index round((bearing - angle_min) / angle_increment), rounding
///      half away from zero, outside [0, beam_count): bearing. A bearing
///      exactly at angle_max therefore lands in the last bin, and one beyond
///      either end bin's center by more than half an increment is dropped.
///   3. range below range_min: range_low; above range_max: range_high
/// Each surviving point takes the minimum range of its bin; empty bins hold
/// positive infinity.
pub fn points_to_scan(
    cloud: &PointCloud3,
    geometry: &ScanGeometry,
    frame: FrameId,
) -> (LaserScan, DropStats) {
    bin_points(cloud, geometry, frame, None)
}

/// Same as [`points_to_scan`] but drops points outside `z_lo..=z_hi` before
/// flattening. This is an extension over the plain flattening path and is
/// never enabled by the stock pipelines.
pub fn points_to_scan_in_band(
    cloud: &PointCloud3,
    geometry: &ScanGeometry,
    frame: FrameId,
    z_lo: f64,
    z_hi: f64,
) -> (LaserScan, DropStats) {
    bin_points(cloud, geometry, frame, Some((z_lo, z_hi)))
}

fn bin_points(
    cloud: &PointCloud3,
    geometry: &ScanGeometry,
    frame: FrameId,
    z_band: Option<(f64, f64)>,
) -> (LaserScan, DropStats) {
    let bins = geometry.beam_count();
    let mut ranges = vec![f64::INFINITY; bins];
    let mut stats = DropStats::default();
    for p in cloud.points() {
        if let Some((lo, hi)) = z_band {
            if p.z < lo || p.z > hi {
                stats.z_band += 1;
                continue;
            }
        }
        if p.x == 0.0 && p.y == 0.0 {
            stats.range_low += 1;
            continue;
        }
        let bearing = p.y.atan2(p.x);
        let index = ((bearing - geometry.angle_min) / geometry.angle_increment).round();
        if index < 0.0 || index >= bins as f64 {
            stats.bearing += 1;
            continue;
        }
        let bin = index as usize;
        let range = (p.x * p.x + p.y * p.y).sqrt();
        if range < geometry.range_min {
            stats.range_low += 1;
            continue;
        }
        if range > geometry.range_max {
            stats.range_high += 1;
            continue;
        }
        if range < ranges[bin] {
            ranges[bin] = range;
        }
        stats.binned += 1;
    }
    let scan = LaserScan::new(
        frame,
        geometry.angle_min,
        geometry.angle_max,
        geometry.angle_increment,
        geometry.range_min,
        geometry.range_max,
        ranges,
    )
    .expect("binned ranges satisfy the scan invariants");
    (scan, stats)
}

/// Map every point through `t` and relabel the cloud. An exact identity
/// transform copies the points untouched, so same-frame pipelines stay
/// bit-identical to chained ones.
pub fn transform_cloud(
    cloud: &PointCloud3,
    t: &RigidTransform,
    new_frame: FrameId,
) -> PointCloud3 {
    if t.is_identity() {
        return PointCloud3::from_validated(new_frame, cloud.points().to_vec());
    }
    let points = cloud.points().iter().map(|&p| t.apply_raw(p)).collect();
    PointCloud3::from_validated(new_frame, points)
}
