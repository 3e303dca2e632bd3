use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Symmetric output limit.
    pub output_limit: f64,
    /// Symmetric anti-windup limit on the integral accumulator.
    pub integral_limit: f64,
}

/// PID loop state. The derivative term is zero on the first update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidState {
    pub gains: PidGains,
    pub integral: f64,
    pub prev_error: Option<f64>,
}

impl PidState {
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            integral: 0.0,
            prev_error: None,
        }
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev_error = None;
    }

    pub fn update(&mut self, error: f64, dt: f64) -> f64 {
        let (out, next) = pid_step(*self, error, dt);
        *self = next;
        out
    }
}

/// One PID update: `kp·e + ki·∫e + kd·de/dt`, integral and output clamped.
pub fn pid_step(pid: PidState, error: f64, dt: f64) -> (f64, PidState) {
    debug_assert!(dt > 0.0);
    let g = pid.gains;
    let integral = (pid.integral + error * dt).clamp(-g.integral_limit, g.integral_limit);
    let derivative = pid.prev_error.map_or(0.0, |prev| (error - prev) / dt);
    let output =
        (g.kp * error + g.ki * integral + g.kd * derivative).clamp(-g.output_limit, g.output_limit);
    (
        output,
        PidState {
            gains: g,
            integral,
            prev_error: Some(error),
        },
    )
}
