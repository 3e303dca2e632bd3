//! Lookahead line-of-sight guidance.

use crate::world::{wrap_angle, Point2};

/// Signed cross-track error of `p` relative to the directed segment
/// `from`→`to`. Positive values lie on the +90° side of the segment course.
pub fn cross_track_error(p: Point2, from: Point2, to: Point2) -> f64 {
    let course = (to.y - from.y).atan2(to.x - from.x);
    let (s, c) = course.sin_cos();
    -(p.x - from.x) * s + (p.y - from.y) * c
}

/// Distance of the projection of `p` along the segment, measured from `from`.
pub fn along_track_distance(p: Point2, from: Point2, to: Point2) -> f64 {
    let course = (to.y - from.y).atan2(to.x - from.x);
    let (s, c) = course.sin_cos();
    (p.x - from.x) * c + (p.y - from.y) * s
}

/// Desired heading `course + atan2(-e, lookahead)`, wrapped to `[-π, π)`.
pub fn los_heading(position: Point2, wp_prev: Point2, wp_next: Point2, lookahead: f64) -> f64 {
    debug_assert!(lookahead > 0.0);
    debug_assert!(wp_prev != wp_next);
    let course = (wp_next.y - wp_prev.y).atan2(wp_next.x - wp_prev.x);
    let e = cross_track_error(position, wp_prev, wp_next);
    wrap_angle(course + (-e).atan2(lookahead))
}
