//! Symbolic plan generation: prompt rendering, backends, parsing and
//! replanning with controller feedback.

mod heuristic;
mod parse;
mod prompt;
pub mod remote;

pub use heuristic::{heuristic_plan, heuristic_plan_with_progress, tour_length, HeuristicBackend};
pub use parse::{parse_plan, PlanError};
pub use prompt::{build_prompt, PromptBundle, TemplateError, DEFAULT_TEMPLATE};
pub use remote::{ChatTransport, HttpTransport, RemoteBackend, RemoteConfig};

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{VesselParams, VesselState};
use crate::navigation::FailureReason;
use crate::world::{Point2, ValidationError, WorldState};

/// Machine-readable form of a mission.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuredMission {
    VisitAll,
    VisitOrdered(Vec<String>),
}

impl FromStr for StructuredMission {
    type Err = String;

    /// Parses the shorthand `visit_all` or `ordered:ds_1,ds_2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "visit_all" {
            return Ok(StructuredMission::VisitAll);
        }
        if let Some(rest) = s.strip_prefix("ordered:") {
            let ids: Vec<String> = rest
                .split(',')
                .map(|id| id.trim().to_string())
                .filter(|id| !id.is_empty())
                .collect();
            if ids.is_empty() {
                return Err("`ordered:` needs at least one station id".into());
            }
            return Ok(StructuredMission::VisitOrdered(ids));
        }
        Err(format!("unrecognised mission shorthand `{s}`"))
    }
}

impl std::fmt::Display for StructuredMission {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StructuredMission::VisitAll => f.write_str("visit_all"),
            StructuredMission::VisitOrdered(ids) => write!(f, "ordered:{}", ids.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSpec {
    pub raw_text: String,
    pub structured: Option<StructuredMission>,
}

impl MissionSpec {
    /// Builds a mission from either a shorthand or free text. Shorthands get a
    /// generated natural-language description.
    pub fn from_cli(text: &str) -> Self {
        match text.parse::<StructuredMission>() {
            Ok(structured) => Self {
                raw_text: describe(&structured),
                structured: Some(structured),
            },
            Err(_) => Self {
                raw_text: text.to_string(),
                structured: None,
            },
        }
    }

    pub fn validate(&self, world: &WorldState) -> Result<(), ValidationError> {
        if self.raw_text.trim().is_empty() {
            return Err(ValidationError::new("mission.text", "must not be empty"));
        }
        if let Some(StructuredMission::VisitOrdered(ids)) = &self.structured {
            for (i, id) in ids.iter().enumerate() {
                if world.station(id).is_none() {
                    return Err(ValidationError::new(
                        format!("mission.structured[{i}]"),
                        format!("unknown station `{id}`"),
                    ));
                }
                if ids[..i].contains(id) {
                    return Err(ValidationError::new(
                        format!("mission.structured[{i}]"),
                        format!("station `{id}` listed twice"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Stations the mission requires, in mission order. `None` when only the
    /// free-text form is known.
    pub fn required_stations(&self, world: &WorldState) -> Option<Vec<String>> {
        match &self.structured {
            Some(StructuredMission::VisitAll) => {
                Some(world.station_ids().map(str::to_string).collect())
            }
            Some(StructuredMission::VisitOrdered(ids)) => Some(ids.clone()),
            None => None,
        }
    }
}

fn describe(mission: &StructuredMission) -> String {
    match mission {
        StructuredMission::VisitAll => "Inspect all port terminals and record data.".to_string(),
        StructuredMission::VisitOrdered(ids) => format!(
            "Inspect docking stations {} in this order and record data.",
            ids.join(", ")
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    MoveTo,
    RecordData,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capability {
    pub name: String,
    pub kind: ActionKind,
    pub description: String,
}

/// Symbolic actions a plan may use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilitySet {
    pub actions: Vec<Capability>,
}

impl Default for CapabilitySet {
    fn default() -> Self {
        Self {
            actions: vec![
                Capability {
                    name: "move_to_docking_station".into(),
                    kind: ActionKind::MoveTo,
                    description: "navigate to the approach point of the target docking station"
                        .into(),
                },
                Capability {
                    name: "record_data".into(),
                    kind: ActionKind::RecordData,
                    description: "align with the target docking station and record camera data"
                        .into(),
                },
            ],
        }
    }
}

impl CapabilitySet {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.actions.is_empty() {
            return Err(ValidationError::new("capabilities", "must not be empty"));
        }
        for (i, a) in self.actions.iter().enumerate() {
            if self.actions[..i].iter().any(|b| b.name == a.name) {
                return Err(ValidationError::new(
                    format!("capabilities[{i}].name"),
                    format!("duplicate action `{}`", a.name),
                ));
            }
        }
        Ok(())
    }

    pub fn kind_of(&self, name: &str) -> Option<ActionKind> {
        self.actions.iter().find(|a| a.name == name).map(|a| a.kind)
    }

    pub fn name_of(&self, kind: ActionKind) -> Option<&str> {
        self.actions
            .iter()
            .find(|a| a.kind == kind)
            .map(|a| a.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "action", content = "target", rename_all = "snake_case")]
pub enum Action {
    #[serde(rename = "move_to_docking_station")]
    MoveTo(String),
    RecordData(String),
}

impl Action {
    pub fn target(&self) -> &str {
        match self {
            Action::MoveTo(s) | Action::RecordData(s) => s,
        }
    }

    pub fn kind(&self) -> ActionKind {
        match self {
            Action::MoveTo(_) => ActionKind::MoveTo,
            Action::RecordData(_) => ActionKind::RecordData,
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Action::MoveTo(s) => write!(f, "move_to_docking_station({s})"),
            Action::RecordData(s) => write!(f, "record_data({s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicPlan {
    pub steps: Vec<Action>,
    pub reasoning: String,
}

impl SymbolicPlan {
    /// Checks the structural plan invariants: non-empty, every record step
    /// directly preceded by a move to the same station, and no immediate
    /// repetition.
    pub fn check_invariants(&self) -> Result<(), PlanError> {
        if self.steps.is_empty() {
            return Err(PlanError::Invariant("plan has no steps".into()));
        }
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 && self.steps[i - 1] == *step {
                return Err(PlanError::Invariant(format!("step {i} repeats {step}")));
            }
            if let Action::RecordData(s) = step {
                let preceded = i > 0 && self.steps[i - 1] == Action::MoveTo(s.clone());
                if !preceded {
                    return Err(PlanError::Invariant(format!(
                        "step {i} {step} is not directly preceded by move_to_docking_station({s})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Wire form `{"plan":[{"action":..,"target":..}],"reasoning":..}`.
    pub fn to_json(&self, capabilities: &CapabilitySet) -> String {
        let steps: Vec<serde_json::Value> = self
            .steps
            .iter()
            .map(|a| {
                let name = capabilities.name_of(a.kind()).unwrap_or(match a.kind() {
                    ActionKind::MoveTo => "move_to_docking_station",
                    ActionKind::RecordData => "record_data",
                });
                serde_json::json!({ "action": name, "target": a.target() })
            })
            .collect();
        serde_json::json!({ "plan": steps, "reasoning": self.reasoning }).to_string()
    }

    pub fn record_targets(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().filter_map(|a| match a {
            Action::RecordData(s) => Some(s.as_str()),
            Action::MoveTo(_) => None,
        })
    }
}

/// Failure report sent back to the planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackReport {
    pub failed_action: Action,
    pub reason: FailureReason,
    pub usv_current_location: Point2,
    /// Number of failures so far for the failed action's station, from 1.
    pub attempt: u32,
}

/// What the mission has achieved so far; drives remainder-only replanning.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    /// Stations with a recorded data capture, in capture order.
    pub completed: Vec<String>,
    /// Stations given up on after exhausting their replan budget.
    pub unreachable: Vec<String>,
    /// Stations moved to the end of the visit order after failures, oldest
    /// demotion first.
    pub deferred: Vec<String>,
}

impl Progress {
    pub fn is_settled(&self, id: &str) -> bool {
        self.completed.iter().any(|c| c == id) || self.unreachable.iter().any(|u| u == id)
    }

    /// Moves `id` to the end of the deferred list.
    pub fn demote(&mut self, id: &str) {
        self.deferred.retain(|d| d != id);
        self.deferred.push(id.to_string());
    }

    pub fn mark_unreachable(&mut self, id: &str) {
        self.deferred.retain(|d| d != id);
        if !self.unreachable.iter().any(|u| u == id) {
            self.unreachable.push(id.to_string());
        }
    }
}

/// Everything a backend may consult for one planning episode.
#[derive(Debug, Clone, Copy)]
pub struct PlanRequest<'a> {
    pub prompt: &'a PromptBundle,
    pub world: &'a WorldState,
    pub mission: &'a MissionSpec,
    pub start: Point2,
    pub progress: &'a Progress,
    /// Rejection message for a corrective re-prompt.
    pub correction: Option<&'a str>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request timed out")]
    Timeout,
    #[error("endpoint returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    Response(String),
    #[error("backend cannot serve this request: {0}")]
    Unsupported(String),
}

/// Source of raw plan text.
pub trait PlanBackend {
    fn name(&self) -> &'static str;

    /// Whether a rejected response earns one corrective re-prompt.
    fn reprompt_on_rejection(&self) -> bool;

    fn complete(&mut self, request: &PlanRequest<'_>) -> Result<String, BackendError>;

    /// Verbatim request/response log, if the backend keeps one.
    fn transcript(&self) -> &[remote::Exchange] {
        &[]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratePlanError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("plan rejected after {} response(s): {}", raw_responses.len(), errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    PlanRejected {
        errors: Vec<PlanError>,
        raw_responses: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplanError {
    #[error("replan budget exhausted for `{station}` after {attempt} failed attempts")]
    ReplanBudgetExhausted { station: String, attempt: u32 },
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Generate(#[from] GeneratePlanError),
}

/// Obtains raw text from the backend and parses it. A rejected response is
/// re-prompted once with the error appended when the backend allows it.
pub fn generate_plan(
    backend: &mut dyn PlanBackend,
    request: &PlanRequest<'_>,
    capabilities: &CapabilitySet,
) -> Result<SymbolicPlan, GeneratePlanError> {
    let first = backend.complete(request)?;
    let first_err = match parse_plan(&first, request.world, capabilities) {
        Ok(plan) => return Ok(plan),
        Err(e) => e,
    };
    if !backend.reprompt_on_rejection() {
        return Err(GeneratePlanError::PlanRejected {
            errors: vec![first_err],
            raw_responses: vec![first],
        });
    }

    let note = format!(
        "Your previous response was rejected: {first_err}. Reply with a single JSON object \
         with keys \"plan\" and \"reasoning\" that satisfies every rule above."
    );
    let retry = PlanRequest {
        correction: Some(&note),
        ..*request
    };
    let second = backend.complete(&retry)?;
    parse_plan(&second, request.world, capabilities).map_err(|second_err| {
        GeneratePlanError::PlanRejected {
            errors: vec![first_err, second_err],
            raw_responses: vec![first, second],
        }
    })
}

/// Inputs shared by every prompt of a mission.
#[derive(Debug, Clone, Copy)]
pub struct PlanningContext<'a> {
    pub template: &'a str,
    pub world: &'a WorldState,
    pub params: &'a VesselParams,
    pub mission: &'a MissionSpec,
    pub capabilities: &'a CapabilitySet,
    pub max_replans: u32,
}

impl PlanningContext<'_> {
    /// One planning episode without failure feedback.
    pub fn plan(
        &self,
        backend: &mut dyn PlanBackend,
        state: &VesselState,
        progress: &Progress,
    ) -> Result<(SymbolicPlan, PromptBundle), ReplanError> {
        let prompt = build_prompt(
            self.template,
            self.world,
            state,
            self.params,
            self.mission,
            self.capabilities,
            None,
            progress,
        )?;
        let request = PlanRequest {
            prompt: &prompt,
            world: self.world,
            mission: self.mission,
            start: state.position(),
            progress,
            correction: None,
        };
        let plan = generate_plan(backend, &request, self.capabilities)?;
        Ok((plan, prompt))
    }
}

/// Regenerates the plan after a failure. The failed station is demoted to
/// the end of the remaining visit order; past `max_replans` failures for the
/// same station the budget is exhausted.
pub fn replan_with_feedback(
    backend: &mut dyn PlanBackend,
    ctx: &PlanningContext<'_>,
    state: &VesselState,
    feedback: &FeedbackReport,
    progress: &mut Progress,
) -> Result<(SymbolicPlan, PromptBundle), ReplanError> {
    let station = feedback.failed_action.target();
    if feedback.attempt > ctx.max_replans {
        return Err(ReplanError::ReplanBudgetExhausted {
            station: station.to_string(),
            attempt: feedback.attempt,
        });
    }
    progress.demote(station);
    let prompt = build_prompt(
        ctx.template,
        ctx.world,
        state,
        ctx.params,
        ctx.mission,
        ctx.capabilities,
        Some(feedback),
        progress,
    )?;
    let request = PlanRequest {
        prompt: &prompt,
        world: ctx.world,
        mission: ctx.mission,
        start: state.position(),
        progress,
        correction: None,
    };
    let plan = generate_plan(backend, &request, ctx.capabilities)?;
    Ok((plan, prompt))
}
