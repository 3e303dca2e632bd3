//! Twist generation and differential thrust allocation.

use serde::{Deserialize, Serialize};

use super::guidance::los_heading;
use super::path::Path;
use super::pid::{PidGains, PidState};
use super::ControlConfig;
use crate::dynamics::{rpm_for_thrust, PodCommand, PodSetting, VesselParams, VesselState};
use crate::world::wrap_angle;

/// Velocity-level command.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub surge_cmd: f64,
    pub yaw_rate_cmd: f64,
}

/// Drives the heading towards `desired` and scales `cruise` by
/// `max(0, cos(heading error))`.
pub fn heading_twist(
    heading_pid: &mut PidState,
    state: &VesselState,
    desired: f64,
    cruise: f64,
    dt: f64,
) -> Twist {
    let err = wrap_angle(desired - state.psi);
    let yaw_rate_cmd = heading_pid.update(err, dt);
    Twist {
        surge_cmd: cruise * err.cos().max(0.0),
        yaw_rate_cmd,
    }
}

/// LOS-guided twist along the segment ending at `path.waypoints[index]`.
pub fn compute_twist(
    heading_pid: &mut PidState,
    state: &VesselState,
    path: &Path,
    index: usize,
    config: &ControlConfig,
    dt: f64,
) -> Twist {
    let wps = &path.waypoints;
    if wps.len() < 2 {
        return Twist::default();
    }
    let index = index.clamp(1, wps.len() - 1);
    let desired = los_heading(
        state.position(),
        wps[index - 1],
        wps[index],
        config.lookahead,
    );
    heading_twist(heading_pid, state, desired, config.cruise_speed, dt)
}

/// Maps a twist to pod settings. Azimuths stay at zero; common-mode thrust
/// comes from the surge loop and differential thrust from the yaw-rate
/// command. Differential thrust has priority when the pods saturate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustAllocator {
    pub speed_pid: PidState,
    pub yaw_rate_gain: f64,
}

impl ThrustAllocator {
    pub fn new(speed_gains: PidGains, yaw_rate_gain: f64) -> Self {
        Self {
            speed_pid: PidState::new(speed_gains),
            yaw_rate_gain,
        }
    }

    pub fn from_config(config: &ControlConfig) -> Self {
        Self::new(config.speed_pid, config.yaw_rate_gain)
    }

    pub fn allocate(
        &mut self,
        tw: &Twist,
        state: &VesselState,
        params: &VesselParams,
        dt: f64,
    ) -> PodCommand {
        let surge_cmd = tw.surge_cmd.clamp(-params.u_max, params.u_max);
        let yaw_cmd = tw.yaw_rate_cmd.clamp(-params.r_max, params.r_max);

        let force = params.drag_surge * surge_cmd + self.speed_pid.update(surge_cmd - state.u, dt);
        let moment = params.drag_yaw * yaw_cmd
            + self.yaw_rate_gain * params.yaw_inertia * (yaw_cmd - state.r);

        let t_max = params.max_pod_thrust();
        let differential = (moment / (2.0 * params.pod_offset_y)).clamp(-t_max, t_max);
        let headroom = t_max - differential.abs();
        let common = (force / 2.0).clamp(-headroom, headroom);

        let rpm = |thrust: f64| {
            rpm_for_thrust(thrust, params.thrust_coeff).clamp(-params.rpm_max, params.rpm_max)
        };
        PodCommand {
            port: PodSetting {
                rpm: rpm(common + differential),
                azimuth: 0.0,
            },
            starboard: PodSetting {
                rpm: rpm(common - differential),
                azimuth: 0.0,
            },
        }
    }
}
