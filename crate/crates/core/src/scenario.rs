//! Scenario files.
//!
//! A scenario is a TOML document with `format_version = 1`. Top-level tables:
//! `bounds`, `[[stations]]`, `[[obstacles]]`, `disturbance`, `vessel`
//! (initial pose plus optional `vessel.params`), `mission`, `control`,
//! `executor` and optionally `backend.remote`. See `scenarios/lake4.toml` for
//! a complete example.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Disturbance, VesselParams, VesselState};
use crate::executor::ExecutorConfig;
use crate::navigation::ControlConfig;
use crate::planner::{CapabilitySet, MissionSpec, RemoteConfig, StructuredMission};
use crate::world::{
    approach_point, is_collision_free, Bounds, DockingStation, Obstacle, Point2, ValidationError,
    WorldState,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StationEntry {
    id: String,
    x: f64,
    y: f64,
    #[serde(default)]
    z: f64,
    length: f64,
    width: f64,
    height: f64,
    approach_heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VesselEntry {
    x: f64,
    y: f64,
    #[serde(default)]
    psi: f64,
    #[serde(default)]
    params: VesselParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MissionEntry {
    text: String,
    /// Shorthand: `visit_all` or `ordered:ds_1,ds_2`.
    #[serde(default)]
    structured: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BackendSection {
    #[serde(default)]
    remote: Option<RemoteConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    format_version: u32,
    bounds: Bounds,
    #[serde(default)]
    stations: Vec<StationEntry>,
    #[serde(default)]
    obstacles: Vec<Obstacle>,
    #[serde(default)]
    disturbance: Disturbance,
    vessel: VesselEntry,
    mission: MissionEntry,
    #[serde(default)]
    control: ControlConfig,
    #[serde(default)]
    executor: ExecutorConfig,
    #[serde(default)]
    backend: BackendSection,
    #[serde(default)]
    prompt_template: Option<String>,
}

/// Validated scenario: world, initial vessel state, mission and tunables.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: WorldState,
    pub initial_state: VesselState,
    pub params: VesselParams,
    pub mission: MissionSpec,
    pub control: ControlConfig,
    pub executor: ExecutorConfig,
    pub capabilities: CapabilitySet,
    pub remote: Option<RemoteConfig>,
    /// Custom prompt template; the built-in one is used when absent.
    pub prompt_template: Option<String>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(ValidationError::new(
                "format_version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    file.format_version
                ),
            )
            .into());
        }
        let structured = file
            .mission
            .structured
            .as_deref()
            .map(|s| s.parse::<StructuredMission>())
            .transpose()
            .map_err(|e| ValidationError::new("mission.structured", e))?;

        let world = WorldState {
            bounds: file.bounds,
            stations: file
                .stations
                .into_iter()
                .map(|s| DockingStation {
                    id: s.id,
                    position: Point2::new(s.x, s.y),
                    z: s.z,
                    length: s.length,
                    width: s.width,
                    height: s.height,
                    approach_heading: s.approach_heading,
                })
                .collect(),
            obstacles: file.obstacles,
            disturbance: file.disturbance,
        };
        let scenario = Scenario {
            world,
            initial_state: VesselState {
                x: file.vessel.x,
                y: file.vessel.y,
                psi: file.vessel.psi,
                u: 0.0,
                v: 0.0,
                r: 0.0,
                t: 0.0,
            },
            params: file.vessel.params,
            mission: MissionSpec {
                raw_text: file.mission.text,
                structured,
            },
            control: file.control,
            executor: file.executor,
            capabilities: CapabilitySet::default(),
            remote: file.backend.remote,
            prompt_template: file.prompt_template,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Checks every invariant, reporting the first violation with its field
    /// path.
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.params.validate()?;
        self.control.validate()?;
        self.executor.validate()?;
        self.capabilities.validate()?;
        self.world.validate(self.executor.standoff)?;
        self.mission.validate(&self.world)?;

        let s = &self.initial_state;
        if ![s.x, s.y, s.psi].iter().all(|v| v.is_finite()) {
            return Err(ValidationError::new(
                "vessel",
                "initial pose must be finite",
            ));
        }
        if !(-std::f64::consts::PI..std::f64::consts::PI).contains(&s.psi) {
            return Err(ValidationError::new("vessel.psi", "must lie in [-pi, pi)"));
        }
        let clearance = self.control.clearance;
        if !is_collision_free(s.position(), &self.world, clearance) {
            return Err(ValidationError::new(
                "vessel",
                format!("initial position is not collision-free at clearance {clearance} m"),
            ));
        }
        for (i, st) in self.world.stations.iter().enumerate() {
            let (p, _) = approach_point(st, self.executor.standoff);
            if !is_collision_free(p, &self.world, clearance) {
                return Err(ValidationError::new(
                    format!("stations[{i}]"),
                    format!(
                        "approach point {p} of `{}` is not collision-free at clearance {clearance} m",
                        st.id
                    ),
                ));
            }
        }
        if let Some(remote) = &self.remote {
            if !(remote.timeout_s.is_finite() && remote.timeout_s > 0.0) {
                return Err(ValidationError::new(
                    "backend.remote.timeout_s",
                    "must be > 0",
                ));
            }
        }
        Ok(())
    }

    pub fn template(&self) -> &str {
        self.prompt_template
            .as_deref()
            .unwrap_or(crate::planner::DEFAULT_TEMPLATE)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_toml_str(&text)
}
