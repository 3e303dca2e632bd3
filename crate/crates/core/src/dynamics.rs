//! Planar 3-DOF vessel model driven by two thrust pods.
//!
//! Forces are computed in the body frame (x forward, y starboard). The port
//! pod sits at `(-pod_offset_x, -pod_offset_y)` and the starboard pod at
//! `(-pod_offset_x, +pod_offset_y)`, so more port thrust yields a positive yaw
//! moment.

use serde::{Deserialize, Serialize};

use crate::world::{wrap_angle, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselState {
    pub x: f64,
    pub y: f64,
    /// Heading in `[-π, π)`.
    pub psi: f64,
    /// Surge velocity, m/s.
    pub u: f64,
    /// Sway velocity, m/s.
    pub v: f64,
    /// Yaw rate, rad/s.
    pub r: f64,
    pub t: f64,
}

impl VesselState {
    pub fn at_rest(x: f64, y: f64, psi: f64) -> Self {
        Self {
            x,
            y,
            psi: wrap_angle(psi),
            u: 0.0,
            v: 0.0,
            r: 0.0,
            t: 0.0,
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn speed(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PodSetting {
    pub rpm: f64,
    /// Rotation relative to the hull centerline, radians.
    pub azimuth: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PodCommand {
    pub port: PodSetting,
    pub starboard: PodSetting,
}

/// Constant environmental forcing, earth frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    /// Water current velocity (vx, vy), m/s.
    #[serde(default)]
    pub current: (f64, f64),
    /// Wind force (fx, fy), N.
    #[serde(default)]
    pub wind_force: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VesselParams {
    /// Hull length overall, m (prompt description only).
    pub length: f64,
    /// Hull beam, m (prompt description only).
    pub beam: f64,
    pub mass: f64,
    pub yaw_inertia: f64,
    pub drag_surge: f64,
    pub drag_sway: f64,
    pub drag_yaw: f64,
    /// Thrust coefficient k_T, N/rpm².
    pub thrust_coeff: f64,
    /// Distance of the pods aft of the center of gravity, m.
    pub pod_offset_x: f64,
    /// Lateral distance of each pod from the centerline, m.
    pub pod_offset_y: f64,
    pub rpm_max: f64,
    pub azimuth_max: f64,
    pub u_max: f64,
    pub r_max: f64,
}

impl Default for VesselParams {
    fn default() -> Self {
        // Full thrust of both pods (2 * 1e-4 * 1500^2 = 450 N) balances surge
        // drag at 2 m/s.
        Self {
            length: 3.5,
            beam: 1.6,
            mass: 180.0,
            yaw_inertia: 250.0,
            drag_surge: 225.0,
            drag_sway: 400.0,
            drag_yaw: 250.0,
            thrust_coeff: 1e-4,
            pod_offset_x: 1.4,
            pod_offset_y: 0.5,
            rpm_max: 1500.0,
            azimuth_max: std::f64::consts::FRAC_PI_4,
            u_max: 2.5,
            r_max: 1.0,
        }
    }
}

impl VesselParams {
    pub fn validate(&self) -> Result<(), crate::world::ValidationError> {
        let positive = [
            ("length", self.length),
            ("beam", self.beam),
            ("mass", self.mass),
            ("yaw_inertia", self.yaw_inertia),
            ("drag_surge", self.drag_surge),
            ("drag_sway", self.drag_sway),
            ("drag_yaw", self.drag_yaw),
            ("thrust_coeff", self.thrust_coeff),
            ("pod_offset_y", self.pod_offset_y),
            ("rpm_max", self.rpm_max),
            ("azimuth_max", self.azimuth_max),
            ("u_max", self.u_max),
            ("r_max", self.r_max),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(crate::world::ValidationError::new(
                    format!("vessel.params.{name}"),
                    "must be > 0",
                ));
            }
        }
        if !self.pod_offset_x.is_finite() {
            return Err(crate::world::ValidationError::new(
                "vessel.params.pod_offset_x",
                "must be finite",
            ));
        }
        Ok(())
    }

    /// Largest thrust a single pod can deliver, N.
    pub fn max_pod_thrust(&self) -> f64 {
        thrust_from_rpm(self.rpm_max, self.thrust_coeff)
    }
}

/// Signed quadratic propeller law `T = k_T · rpm · |rpm|`.
pub fn thrust_from_rpm(rpm: f64, thrust_coeff: f64) -> f64 {
    thrust_coeff * rpm * rpm.abs()
}

/// Inverse of [`thrust_from_rpm`].
pub fn rpm_for_thrust(thrust: f64, thrust_coeff: f64) -> f64 {
    thrust.signum() * (thrust.abs() / thrust_coeff).sqrt()
}

/// Advances the vessel by one semi-implicit Euler step of length `dt`.
///
/// Velocities are updated first from the body-frame forces; the pose is then
/// integrated with the new velocities plus the earth-frame current. Commands
/// outside the actuator limits are clamped, as are the resulting surge speed
/// and yaw rate.
pub fn step(
    state: &VesselState,
    cmd: &PodCommand,
    dist: &Disturbance,
    params: &VesselParams,
    dt: f64,
) -> VesselState {
    debug_assert!(dt > 0.0 && dt <= 0.5, "dt out of range: {dt}");

    let pods = [
        (cmd.port, -params.pod_offset_y),
        (cmd.starboard, params.pod_offset_y),
    ];
    let mut fx = 0.0;
    let mut fy = 0.0;
    let mut mz = 0.0;
    for (pod, lateral) in pods {
        let rpm = pod.rpm.clamp(-params.rpm_max, params.rpm_max);
        let azimuth = pod.azimuth.clamp(-params.azimuth_max, params.azimuth_max);
        let thrust = thrust_from_rpm(rpm, params.thrust_coeff);
        let (s, c) = azimuth.sin_cos();
        let px = thrust * c;
        let py = thrust * s;
        fx += px;
        fy += py;
        mz += -params.pod_offset_x * py - lateral * px;
    }

    let (sin_psi, cos_psi) = state.psi.sin_cos();
    let (wx, wy) = dist.wind_force;
    fx += wx * cos_psi + wy * sin_psi;
    fy += -wx * sin_psi + wy * cos_psi;

    fx -= params.drag_surge * state.u;
    fy -= params.drag_sway * state.v;
    mz -= params.drag_yaw * state.r;

    let u = (state.u + dt * fx / params.mass).clamp(-params.u_max, params.u_max);
    let v = state.v + dt * fy / params.mass;
    let r = (state.r + dt * mz / params.yaw_inertia).clamp(-params.r_max, params.r_max);

    let (cx, cy) = dist.current;
    let x = state.x + dt * (u * cos_psi - v * sin_psi + cx);
    let y = state.y + dt * (u * sin_psi + v * cos_psi + cy);
    let psi = wrap_angle(state.psi + dt * r);

    VesselState {
        x,
        y,
        psi,
        u,
        v,
        r,
        t: state.t + dt,
    }
}
