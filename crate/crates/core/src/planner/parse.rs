use serde_json::Value;

use super::{Action, ActionKind, CapabilitySet, SymbolicPlan};
use crate::world::WorldState;

/// Why a raw backend response was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("plan invariant violated: {0}")]
    Invariant(String),
}

impl PlanError {
    pub fn class(&self) -> &'static str {
        match self {
            PlanError::Schema(_) => "SchemaError",
            PlanError::UnknownAction(_) => "UnknownAction",
            PlanError::UnknownTarget(_) => "UnknownTarget",
            PlanError::Invariant(_) => "InvariantError",
        }
    }
}

/// First JSON object embedded in `raw`, skipping prose and code fences.
fn first_json_object(raw: &str) -> Option<serde_json::Map<String, Value>> {
    raw.char_indices()
        .filter(|&(_, c)| c == '{')
        .find_map(|(i, _)| {
            let mut stream = serde_json::Deserializer::from_str(&raw[i..]).into_iter::<Value>();
            match stream.next() {
                Some(Ok(Value::Object(map))) => Some(map),
                _ => None,
            }
        })
}

/// Parses and validates a backend response. Violations are rejected, never
/// repaired.
pub fn parse_plan(
    raw: &str,
    world: &WorldState,
    capabilities: &CapabilitySet,
) -> Result<SymbolicPlan, PlanError> {
    let obj = first_json_object(raw)
        .ok_or_else(|| PlanError::Schema("no JSON object found in response".into()))?;

    let steps = obj
        .get("plan")
        .ok_or_else(|| PlanError::Schema("missing key `plan`".into()))?
        .as_array()
        .ok_or_else(|| PlanError::Schema("`plan` must be an array".into()))?;
    let reasoning = obj
        .get("reasoning")
        .ok_or_else(|| PlanError::Schema("missing key `reasoning`".into()))?
        .as_str()
        .ok_or_else(|| PlanError::Schema("`reasoning` must be a string".into()))?;

    let mut actions = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let step = step
            .as_object()
            .ok_or_else(|| PlanError::Schema(format!("plan[{i}] must be an object")))?;
        let name = step
            .get("action")
            .and_then(Value::as_str)
            .ok_or_else(|| PlanError::Schema(format!("plan[{i}].action must be a string")))?;
        let target = step
            .get("target")
            .and_then(Value::as_str)
            .ok_or_else(|| PlanError::Schema(format!("plan[{i}].target must be a string")))?;
        let kind = capabilities
            .kind_of(name)
            .ok_or_else(|| PlanError::UnknownAction(name.to_string()))?;
        if world.station(target).is_none() {
            return Err(PlanError::UnknownTarget(target.to_string()));
        }
        actions.push(match kind {
            ActionKind::MoveTo => Action::MoveTo(target.to_string()),
            ActionKind::RecordData => Action::RecordData(target.to_string()),
        });
    }

    let plan = SymbolicPlan {
        steps: actions,
        reasoning: reasoning.to_string(),
    };
    plan.check_invariants()?;
    Ok(plan)
}
