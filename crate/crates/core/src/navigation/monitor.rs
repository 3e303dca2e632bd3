//! Progress monitoring and failure classification for MoveTo actions.

use serde::{Deserialize, Serialize};

use super::guidance::{along_track_distance, cross_track_error};
use super::path::Path;
use super::ControlConfig;
use crate::dynamics::VesselState;
use crate::world::distance;

/// Machine-readable cause of an action failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    PathBlocked,
    Timeout,
    ControlDeviation,
}

impl FailureReason {
    pub fn token(&self) -> &'static str {
        match self {
            FailureReason::PathBlocked => "PathBlocked",
            FailureReason::Timeout => "Timeout",
            FailureReason::ControlDeviation => "ControlDeviation",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            FailureReason::PathBlocked => "no collision-free path to the target exists",
            FailureReason::Timeout => "the target was not reached within the time budget",
            FailureReason::ControlDeviation => "the vessel was pushed too far off the planned path",
        }
    }
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonitorVerdict {
    InProgress,
    WaypointReached,
    GoalReached,
    Failed(FailureReason),
}

/// Tracks one MoveTo execution. Holds the timeout budget and the time at
/// which the cross-track error first exceeded the deviation limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressMonitor {
    pub budget: f64,
    capture_radius: f64,
    deviation_limit: f64,
    deviation_window: f64,
    deviating_since: Option<f64>,
}

impl ProgressMonitor {
    pub fn new(path: &Path, config: &ControlConfig) -> Self {
        let nominal = path.total_length / config.cruise_speed;
        Self {
            budget: config.min_budget.max(config.timeout_factor * nominal),
            capture_radius: config.capture_radius,
            deviation_limit: config.deviation_limit,
            deviation_window: config.deviation_window,
            deviating_since: None,
        }
    }

    /// Classifies the current state. `index` is the waypoint being steered
    /// to; `elapsed` is the time since the action started.
    ///
    /// Intermediate waypoints also count as reached once the along-track
    /// projection passes the end of their segment.
    pub fn check(
        &mut self,
        state: &VesselState,
        path: &Path,
        index: usize,
        elapsed: f64,
    ) -> MonitorVerdict {
        let pos = state.position();
        let wps = &path.waypoints;
        let last = wps.len() - 1;
        if distance(pos, wps[last]) <= self.capture_radius {
            return MonitorVerdict::GoalReached;
        }
        let index = index.clamp(1.min(last), last);
        if index < last {
            let from = wps[index - 1];
            let to = wps[index];
            let passed = along_track_distance(pos, from, to) >= distance(from, to);
            if distance(pos, to) <= self.capture_radius || passed {
                return MonitorVerdict::WaypointReached;
            }
        }
        if elapsed > self.budget {
            return MonitorVerdict::Failed(FailureReason::Timeout);
        }
        if index >= 1 {
            let e = cross_track_error(pos, wps[index - 1], wps[index]).abs();
            if e > self.deviation_limit {
                let since = *self.deviating_since.get_or_insert(elapsed);
                if elapsed - since > self.deviation_window {
                    return MonitorVerdict::Failed(FailureReason::ControlDeviation);
                }
            } else {
                self.deviating_since = None;
            }
        }
        MonitorVerdict::InProgress
    }
}
