//! Static lake environment: bounds, docking stations and obstacles.
//!
//! Coordinates follow the marine convention used throughout the crate: heading
//! is measured from the +x axis towards the +y axis, and the vessel's body y
//! axis points to starboard. All geometry is planar; station heights and z
//! coordinates are carried for prompt rendering only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::Disturbance;

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point reached by moving `dist` along `heading`.
    pub fn offset(&self, heading: f64, dist: f64) -> Point2 {
        Point2::new(self.x + dist * heading.cos(), self.y + dist * heading.sin())
    }

    pub fn lerp(&self, other: Point2, s: f64) -> Point2 {
        Point2::new(
            self.x + (other.x - self.x) * s,
            self.y + (other.y - self.y) * s,
        )
    }
}

impl std::fmt::Display for Point2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:.2}, {:.2})", self.x, self.y)
    }
}

/// Euclidean distance between two points.
pub fn distance(a: Point2, b: Point2) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Wraps an angle to `[-π, π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut wrapped = (angle + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if wrapped >= PI {
        wrapped -= 2.0 * PI;
    }
    wrapped
}

/// Axis-aligned lake rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DockingStation {
    pub id: String,
    pub position: Point2,
    pub z: f64,
    pub length: f64,
    pub width: f64,
    pub height: f64,
    /// Heading the vessel must hold while recording, radians in `[-π, π)`.
    pub approach_heading: f64,
}

impl DockingStation {
    /// Corners of the solid keep-out rectangle. The length axis is aligned with
    /// the approach heading.
    pub fn footprint(&self) -> [Point2; 4] {
        let (s, c) = self.approach_heading.sin_cos();
        let hl = self.length / 2.0;
        let hw = self.width / 2.0;
        let corner = |a: f64, b: f64| {
            Point2::new(
                self.position.x + a * c - b * s,
                self.position.y + a * s + b * c,
            )
        };
        [
            corner(-hl, -hw),
            corner(hl, -hw),
            corner(hl, hw),
            corner(-hl, hw),
        ]
    }

    /// Distance from `p` to the footprint rectangle, zero inside.
    pub fn footprint_distance(&self, p: Point2) -> f64 {
        let (s, c) = self.approach_heading.sin_cos();
        let dx = p.x - self.position.x;
        let dy = p.y - self.position.y;
        let along = dx * c + dy * s;
        let across = -dx * s + dy * c;
        let ex = (along.abs() - self.length / 2.0).max(0.0);
        let ey = (across.abs() - self.width / 2.0).max(0.0);
        ex.hypot(ey)
    }

    fn footprint_contains(&self, p: Point2) -> bool {
        let (s, c) = self.approach_heading.sin_cos();
        let dx = p.x - self.position.x;
        let dy = p.y - self.position.y;
        let along = dx * c + dy * s;
        let across = -dx * s + dy * c;
        along.abs() < self.length / 2.0 && across.abs() < self.width / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstacle {
    Circle {
        center: Point2,
        radius: f64,
    },
    /// Convex polygon, vertices counter-clockwise.
    Polygon {
        vertices: Vec<Point2>,
    },
}

impl Obstacle {
    /// Distance from `p` to the obstacle boundary, or `None` when `p` lies
    /// strictly inside.
    pub fn distance_from(&self, p: Point2) -> Option<f64> {
        match self {
            Obstacle::Circle { center, radius } => {
                let d = distance(p, *center) - radius;
                (d >= 0.0).then_some(d)
            }
            Obstacle::Polygon { vertices } => {
                if polygon_contains(vertices, p) {
                    return None;
                }
                let n = vertices.len();
                let d = (0..n)
                    .map(|i| segment_distance(p, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min);
                Some(d)
            }
        }
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounding_box(&self) -> (Point2, Point2) {
        match self {
            Obstacle::Circle { center, radius } => (
                Point2::new(center.x - radius, center.y - radius),
                Point2::new(center.x + radius, center.y + radius),
            ),
            Obstacle::Polygon { vertices } => {
                let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo.x = lo.x.min(v.x);
                    lo.y = lo.y.min(v.y);
                    hi.x = hi.x.max(v.x);
                    hi.y = hi.y.max(v.y);
                }
                (lo, hi)
            }
        }
    }
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Strict interior test for a counter-clockwise convex polygon.
fn polygon_contains(vertices: &[Point2], p: Point2) -> bool {
    let n = vertices.len();
    (0..n).all(|i| cross(vertices[i], vertices[(i + 1) % n], p) > 0.0)
}

/// Distance from `p` to the closed segment from `a` to `b`.
pub fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return distance(p, a);
    }
    let s = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len2).clamp(0.0, 1.0);
    distance(p, a.lerp(b, s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub bounds: Bounds,
    pub stations: Vec<DockingStation>,
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub disturbance: Disturbance,
}

impl WorldState {
    pub fn station(&self, id: &str) -> Option<&DockingStation> {
        self.stations.iter().find(|s| s.id == id)
    }

    pub fn station_ids(&self) -> impl Iterator<Item = &str> {
        self.stations.iter().map(|s| s.id.as_str())
    }

    /// Checks every structural invariant of the world. `standoff` is the
    /// approach distance used to derive the record poses.
    pub fn validate(&self, standoff: f64) -> Result<(), ValidationError> {
        let b = &self.bounds;
        let finite = [b.min_x, b.min_y, b.max_x, b.max_y];
        if finite.iter().any(|v| !v.is_finite()) || b.min_x >= b.max_x || b.min_y >= b.max_y {
            return Err(ValidationError::new(
                "bounds",
                "must be finite with min < max",
            ));
        }

        for (i, st) in self.stations.iter().enumerate() {
            let path = format!("stations[{i}]");
            if st.id.is_empty() {
                return Err(ValidationError::new(
                    format!("{path}.id"),
                    "must not be empty",
                ));
            }
            if self.stations[..i].iter().any(|o| o.id == st.id) {
                return Err(ValidationError::new(
                    format!("{path}.id"),
                    format!("duplicate station id `{}`", st.id),
                ));
            }
            if !st.position.is_finite() || !st.z.is_finite() {
                return Err(ValidationError::new(
                    format!("{path}.position"),
                    "must be finite",
                ));
            }
            for (name, v) in [
                ("length", st.length),
                ("width", st.width),
                ("height", st.height),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(ValidationError::new(
                        format!("{path}.{name}"),
                        "must be > 0",
                    ));
                }
            }
            if !(st.approach_heading.is_finite() && (-PI..PI).contains(&st.approach_heading)) {
                return Err(ValidationError::new(
                    format!("{path}.approach_heading"),
                    "must lie in [-pi, pi)",
                ));
            }
            if !st.footprint().iter().all(|c| b.contains(*c)) {
                return Err(ValidationError::new(
                    path.clone(),
                    format!("station `{}` lies outside the lake bounds", st.id),
                ));
            }
            if standoff <= st.length.max(st.width) / 2.0 {
                return Err(ValidationError::new(
                    "executor.standoff",
                    format!(
                        "standoff {standoff} does not clear the footprint of `{}`",
                        st.id
                    ),
                ));
            }
            let (approach, _) = approach_point(st, standoff);
            if !b.contains(approach) {
                return Err(ValidationError::new(
                    path.clone(),
                    format!("approach point of `{}` lies outside the lake bounds", st.id),
                ));
            }
            for (j, other) in self.stations[..i].iter().enumerate() {
                if footprints_overlap(st, other) {
                    return Err(ValidationError::new(
                        path.clone(),
                        format!(
                            "footprint of `{}` overlaps stations[{j}] `{}`",
                            st.id, other.id
                        ),
                    ));
                }
            }
        }

        for (i, ob) in self.obstacles.iter().enumerate() {
            let path = format!("obstacles[{i}]");
            match ob {
                Obstacle::Circle { center, radius } => {
                    if !center.is_finite() {
                        return Err(ValidationError::new(
                            format!("{path}.center"),
                            "must be finite",
                        ));
                    }
                    if !(radius.is_finite() && *radius > 0.0) {
                        return Err(ValidationError::new(
                            format!("{path}.radius"),
                            "must be > 0",
                        ));
                    }
                }
                Obstacle::Polygon { vertices } => {
                    if vertices.len() < 3 {
                        return Err(ValidationError::new(
                            format!("{path}.vertices"),
                            "polygon needs at least 3 vertices",
                        ));
                    }
                    if vertices.iter().any(|v| !v.is_finite()) {
                        return Err(ValidationError::new(
                            format!("{path}.vertices"),
                            "must be finite",
                        ));
                    }
                    let n = vertices.len();
                    let convex_ccw = (0..n).all(|k| {
                        cross(vertices[k], vertices[(k + 1) % n], vertices[(k + 2) % n]) > 0.0
                    });
                    if !convex_ccw {
                        return Err(ValidationError::new(
                            format!("{path}.vertices"),
                            "polygon must be convex, counter-clockwise, without collinear vertices",
                        ));
                    }
                }
            }
            let (lo, hi) = ob.bounding_box();
            if !(b.contains(lo) && b.contains(hi)) {
                return Err(ValidationError::new(
                    path,
                    "obstacle lies outside the lake bounds",
                ));
            }
        }

        let d = &self.disturbance;
        if ![d.current.0, d.current.1, d.wind_force.0, d.wind_force.1]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(ValidationError::new("disturbance", "must be finite"));
        }
        Ok(())
    }
}

fn footprints_overlap(a: &DockingStation, b: &DockingStation) -> bool {
    // separating axis test on the two rectangles' edge normals
    let ca = a.footprint();
    let cb = b.footprint();
    let axes = [
        a.approach_heading,
        a.approach_heading + PI / 2.0,
        b.approach_heading,
        b.approach_heading + PI / 2.0,
    ];
    axes.iter().all(|&theta| {
        let (s, c) = theta.sin_cos();
        let project = |pts: &[Point2; 4]| {
            pts.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let v = p.x * c + p.y * s;
                    (lo.min(v), hi.max(v))
                })
        };
        let (alo, ahi) = project(&ca);
        let (blo, bhi) = project(&cb);
        alo < bhi && blo < ahi
    })
}

/// True iff `p` is inside the bounds and at least `clearance` away from every
/// obstacle and station footprint. Points exactly at the clearance are free.
pub fn is_collision_free(p: Point2, world: &WorldState, clearance: f64) -> bool {
    if !p.is_finite() || !world.bounds.contains(p) {
        return false;
    }
    let obstacles_clear = world
        .obstacles
        .iter()
        .all(|ob| ob.distance_from(p).is_some_and(|d| d >= clearance));
    obstacles_clear
        && world
            .stations
            .iter()
            .all(|st| !st.footprint_contains(p) && st.footprint_distance(p) >= clearance)
}

/// Record pose for a station: `standoff` meters behind the station center
/// along its approach heading, facing the station.
pub fn approach_point(station: &DockingStation, standoff: f64) -> (Point2, f64) {
    let heading = station.approach_heading;
    (station.position.offset(heading, -standoff), heading)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid `{field}`: {message}")]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}
