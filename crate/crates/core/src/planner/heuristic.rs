//! Deterministic offline planner: greedy nearest-neighbour ordering for
//! `visit_all`, verbatim order for `ordered:` missions.

use super::{
    Action, BackendError, CapabilitySet, PlanBackend, PlanRequest, Progress, StructuredMission,
    SymbolicPlan,
};
use crate::world::{distance, Point2, WorldState};

/// Straight-line length of visiting `order` (station positions) from `start`.
pub fn tour_length(start: Point2, order: &[String], world: &WorldState) -> f64 {
    let mut pos = start;
    let mut total = 0.0;
    for id in order {
        let next = world.station(id).expect("known station").position;
        total += distance(pos, next);
        pos = next;
    }
    total
}

fn greedy_order(start: Point2, mut pending: Vec<String>, world: &WorldState) -> Vec<String> {
    let mut pos = start;
    let mut order = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        // strict `<` keeps the earliest candidate on ties
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, id) in pending.iter().enumerate() {
            let d = distance(pos, world.station(id).expect("known station").position);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        let id = pending.remove(best);
        pos = world.station(&id).expect("known station").position;
        order.push(id);
    }
    order
}

/// Plan for the whole mission from `start`.
pub fn heuristic_plan(
    mission: &StructuredMission,
    start: Point2,
    world: &WorldState,
) -> SymbolicPlan {
    heuristic_plan_with_progress(mission, start, world, &Progress::default())
}

/// Plan for the stations not yet settled. Deferred stations go last, in
/// demotion order. The plan is empty when nothing remains.
pub fn heuristic_plan_with_progress(
    mission: &StructuredMission,
    start: Point2,
    world: &WorldState,
    progress: &Progress,
) -> SymbolicPlan {
    let required: Vec<String> = match mission {
        StructuredMission::VisitAll => world.station_ids().map(str::to_string).collect(),
        StructuredMission::VisitOrdered(ids) => ids.clone(),
    };
    let pending: Vec<String> = required
        .iter()
        .filter(|id| !progress.is_settled(id) && !progress.deferred.contains(id))
        .cloned()
        .collect();
    let deferred: Vec<String> = progress
        .deferred
        .iter()
        .filter(|id| required.contains(id) && !progress.is_settled(id))
        .cloned()
        .collect();

    let (mut order, rule) = match mission {
        StructuredMission::VisitAll => (
            greedy_order(start, pending, world),
            "nearest-neighbour order by straight-line distance from the current position",
        ),
        StructuredMission::VisitOrdered(_) => (pending, "the order requested by the mission"),
    };
    order.extend(deferred.iter().cloned());

    let steps = order
        .iter()
        .flat_map(|id| [Action::MoveTo(id.clone()), Action::RecordData(id.clone())])
        .collect();
    let mut reasoning = format!(
        "Visit {} following {}; total straight-line tour length {:.2} m.",
        order.join(" -> "),
        rule,
        tour_length(start, &order, world)
    );
    if !deferred.is_empty() {
        reasoning.push_str(&format!(
            " Deferred to the end after failed attempts: {}.",
            deferred.join(", ")
        ));
    }
    SymbolicPlan { steps, reasoning }
}

/// Backend wrapping the heuristic planner. Output is serialized to the same
/// JSON wire form a remote model would produce.
#[derive(Debug, Clone, Default)]
pub struct HeuristicBackend {
    pub capabilities: CapabilitySet,
}

impl PlanBackend for HeuristicBackend {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn reprompt_on_rejection(&self) -> bool {
        false
    }

    fn complete(&mut self, request: &PlanRequest<'_>) -> Result<String, BackendError> {
        let structured = request.mission.structured.as_ref().ok_or_else(|| {
            BackendError::Unsupported(
                "the heuristic backend needs a structured mission (visit_all or ordered:...)"
                    .into(),
            )
        })?;
        let plan = heuristic_plan_with_progress(
            structured,
            request.start,
            request.world,
            request.progress,
        );
        if plan.steps.is_empty() {
            return Err(BackendError::Unsupported("no stations left to plan".into()));
        }
        Ok(plan.to_json(&self.capabilities))
    }
}
