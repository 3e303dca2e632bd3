//! Guidance, control and progress monitoring for MoveTo goals.

pub mod control;
pub mod guidance;
pub mod monitor;
pub mod path;
pub mod pid;

pub use control::{compute_twist, heading_twist, ThrustAllocator, Twist};
pub use guidance::{cross_track_error, los_heading};
pub use monitor::{FailureReason, MonitorVerdict, ProgressMonitor};
pub use path::{plan_path, Path, PlanPathError};
pub use pid::{pid_step, PidGains, PidState};

use serde::{Deserialize, Serialize};

/// Tunables for planning, guidance, control and monitoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    /// Occupancy grid cell size, m.
    pub resolution: f64,
    /// Minimum distance kept from obstacles and station footprints, m.
    pub clearance: f64,
    /// LOS lookahead distance, m.
    pub lookahead: f64,
    pub cruise_speed: f64,
    pub capture_radius: f64,
    pub deviation_limit: f64,
    /// Seconds the cross-track error may stay above the limit.
    pub deviation_window: f64,
    /// Timeout budget multiplier on the nominal transit time.
    pub timeout_factor: f64,
    /// Lower bound on the timeout budget, s.
    pub min_budget: f64,
    /// Heading loop; output is the yaw-rate command in rad/s.
    pub heading_pid: PidGains,
    /// Surge loop; output is a force correction in N.
    pub speed_pid: PidGains,
    /// Yaw-rate tracking bandwidth used by thrust allocation, 1/s.
    pub yaw_rate_gain: f64,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            resolution: 1.0,
            clearance: 2.5,
            lookahead: 3.0,
            cruise_speed: 1.5,
            capture_radius: 2.0,
            deviation_limit: 10.0,
            deviation_window: 5.0,
            timeout_factor: 3.0,
            min_budget: 30.0,
            heading_pid: PidGains {
                kp: 0.8,
                ki: 0.02,
                kd: 0.1,
                output_limit: 0.6,
                integral_limit: 2.0,
            },
            speed_pid: PidGains {
                kp: 200.0,
                ki: 5.0,
                kd: 0.0,
                output_limit: 450.0,
                integral_limit: 5.0,
            },
            yaw_rate_gain: 3.0,
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<(), crate::world::ValidationError> {
        let positive = [
            ("resolution", self.resolution),
            ("lookahead", self.lookahead),
            ("cruise_speed", self.cruise_speed),
            ("capture_radius", self.capture_radius),
            ("deviation_limit", self.deviation_limit),
            ("deviation_window", self.deviation_window),
            ("timeout_factor", self.timeout_factor),
            ("min_budget", self.min_budget),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(crate::world::ValidationError::new(
                    format!("control.{name}"),
                    "must be > 0",
                ));
            }
        }
        if !(self.clearance.is_finite() && self.clearance >= 0.0) {
            return Err(crate::world::ValidationError::new(
                "control.clearance",
                "must be >= 0",
            ));
        }
        for (name, g) in [
            ("heading_pid", self.heading_pid),
            ("speed_pid", self.speed_pid),
        ] {
            let ok = [g.kp, g.ki, g.kd, g.output_limit, g.integral_limit]
                .iter()
                .all(|v| v.is_finite() && *v >= 0.0);
            if !ok {
                return Err(crate::world::ValidationError::new(
                    format!("control.{name}"),
                    "gains and limits must be >= 0",
                ));
            }
        }
        if !(self.yaw_rate_gain.is_finite() && self.yaw_rate_gain >= 0.0) {
            return Err(crate::world::ValidationError::new(
                "control.yaw_rate_gain",
                "must be >= 0",
            ));
        }
        Ok(())
    }
}
