//! Mission execution loop: plan, execute each action in closed loop, feed
//! failures back for replanning and check completion.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{step, VesselParams, VesselState};
use crate::navigation::{
    compute_twist, cross_track_error, heading_twist, plan_path, ControlConfig, FailureReason,
    MonitorVerdict, Path, PidState, ProgressMonitor, ThrustAllocator,
};
use crate::planner::{
    replan_with_feedback, Action, FeedbackReport, PlanBackend, PlanningContext, Progress,
    PromptBundle, ReplanError, SymbolicPlan,
};
use crate::scenario::Scenario;
use crate::world::{approach_point, wrap_angle, Point2, ValidationError, WorldState};

pub const STATUS_COMPLETED: &str = "Mission Completed";
pub const STATUS_INCOMPLETE: &str = "Mission Incomplete";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecutorConfig {
    /// Simulation step, s.
    pub dt: f64,
    /// Simulated-time cap for the whole mission, s.
    pub max_sim_time: f64,
    /// Failures tolerated per station before it is declared unreachable.
    pub max_replans: u32,
    /// Heading tolerance for data capture, rad.
    pub align_tolerance: f64,
    /// Distance from station center to the approach point, m.
    pub standoff: f64,
    /// Time allowed to rotate onto the recording heading, s.
    pub align_timeout: f64,
    /// Upper bound on planning episodes per mission.
    pub max_episodes: u32,
}

impl Default for ExecutorConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            max_sim_time: 1800.0,
            max_replans: 3,
            align_tolerance: 0.05,
            standoff: 8.0,
            align_timeout: 60.0,
            max_episodes: 24,
        }
    }
}

impl ExecutorConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= 0.5) {
            return Err(ValidationError::new("executor.dt", "must lie in (0, 0.5]"));
        }
        for (name, value) in [
            ("max_sim_time", self.max_sim_time),
            ("align_tolerance", self.align_tolerance),
            ("standoff", self.standoff),
            ("align_timeout", self.align_timeout),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ValidationError::new(
                    format!("executor.{name}"),
                    "must be > 0",
                ));
            }
        }
        if self.max_episodes == 0 {
            return Err(ValidationError::new(
                "executor.max_episodes",
                "must be >= 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeStatus {
    Success,
    Failed(FailureReason),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionOutcome {
    /// Planning episode the action belongs to, from 0.
    pub episode: usize,
    /// Index of the action within its plan.
    pub step: usize,
    pub action: Action,
    pub status: OutcomeStatus,
    pub start_time: f64,
    pub end_time: f64,
    pub end_location: Point2,
    /// Largest |cross-track error| seen on the active segment, m. Zero for
    /// record actions.
    pub max_cross_track: f64,
    /// Path followed by a MoveTo; absent when none could be planned.
    pub path: Option<Path>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRecord {
    pub station: String,
    pub timestamp: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub alignment_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeTrigger {
    Initial,
    Feedback,
    /// Completion check found stations still pending.
    Continuation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEpisode {
    pub trigger: EpisodeTrigger,
    pub start_time: f64,
    pub plan: SymbolicPlan,
    pub prompt: PromptBundle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    AllTasksDone,
    SimTimeExhausted,
    EpisodeLimit,
    PlannerError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionReport {
    pub final_status: String,
    pub stop_reason: StopReason,
    pub backend: String,
    pub mission: String,
    pub required_stations: Vec<String>,
    pub unreachable: Vec<String>,
    pub records: Vec<DataRecord>,
    pub outcomes: Vec<ActionOutcome>,
    pub plans: Vec<PlanEpisode>,
    pub feedback: Vec<FeedbackReport>,
    pub planner_errors: Vec<String>,
    /// Run seed, recorded for provenance; the simulation draws no random
    /// numbers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub trajectory: Vec<VesselState>,
}

impl MissionReport {
    pub fn is_completed(&self) -> bool {
        self.final_status == STATUS_COMPLETED
    }

    /// Waypoints of every planned MoveTo path, in execution order.
    pub fn planned_waypoints(&self) -> Vec<Point2> {
        self.outcomes
            .iter()
            .filter_map(|o| o.path.as_ref())
            .flat_map(|p| p.waypoints.iter().copied())
            .collect()
    }

    pub fn recorded_stations(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.station.as_str()).collect()
    }
}

/// Result of one action. `trajectory` holds the states produced after the
/// starting state.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionExecution {
    pub outcome: ActionOutcome,
    pub state: VesselState,
    pub trajectory: Vec<VesselState>,
    pub record: Option<DataRecord>,
}

/// Runs a single action in closed loop from `state`. Simulation stops with
/// a `Timeout` failure once `config.max_sim_time` is reached.
pub fn execute_action(
    action: &Action,
    world: &WorldState,
    state: &VesselState,
    params: &VesselParams,
    control: &ControlConfig,
    config: &ExecutorConfig,
) -> ActionExecution {
    let station = world
        .station(action.target())
        .expect("plan targets are validated against the world");
    let (goal, heading) = approach_point(station, config.standoff);
    match action {
        Action::MoveTo(_) => move_to(action, goal, world, state, params, control, config),
        Action::RecordData(id) => {
            record_data(action, id, heading, world, state, params, control, config)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    action: &Action,
    status: OutcomeStatus,
    start: &VesselState,
    end: VesselState,
    max_cross_track: f64,
    path: Option<Path>,
    trajectory: Vec<VesselState>,
    record: Option<DataRecord>,
) -> ActionExecution {
    ActionExecution {
        outcome: ActionOutcome {
            episode: 0,
            step: 0,
            action: action.clone(),
            status,
            start_time: start.t,
            end_time: end.t,
            end_location: end.position(),
            max_cross_track,
            path,
        },
        state: end,
        trajectory,
        record,
    }
}

fn move_to(
    action: &Action,
    goal: Point2,
    world: &WorldState,
    start: &VesselState,
    params: &VesselParams,
    control: &ControlConfig,
    config: &ExecutorConfig,
) -> ActionExecution {
    let path = match plan_path(
        start.position(),
        goal,
        world,
        control.resolution,
        control.clearance,
    ) {
        Ok(p) => p,
        Err(_) => {
            return finish(
                action,
                OutcomeStatus::Failed(FailureReason::PathBlocked),
                start,
                *start,
                0.0,
                None,
                Vec::new(),
                None,
            )
        }
    };

    let mut monitor = ProgressMonitor::new(&path, control);
    let mut heading_pid = PidState::new(control.heading_pid);
    let mut allocator = ThrustAllocator::from_config(control);
    let mut state = *start;
    let mut trajectory = Vec::new();
    let mut index = 1;
    let mut max_cross_track: f64 = 0.0;
    let last = path.waypoints.len() - 1;

    let status = loop {
        match monitor.check(&state, &path, index, state.t - start.t) {
            MonitorVerdict::GoalReached => break OutcomeStatus::Success,
            MonitorVerdict::Failed(reason) => break OutcomeStatus::Failed(reason),
            MonitorVerdict::WaypointReached => {
                index += 1;
                continue;
            }
            MonitorVerdict::InProgress => {}
        }
        if state.t >= config.max_sim_time {
            break OutcomeStatus::Failed(FailureReason::Timeout);
        }
        let tw = compute_twist(&mut heading_pid, &state, &path, index, control, config.dt);
        let cmd = allocator.allocate(&tw, &state, params, config.dt);
        state = step(&state, &cmd, &world.disturbance, params, config.dt);
        trajectory.push(state);
        let seg = index.clamp(1, last.max(1));
        if last >= 1 {
            let e = cross_track_error(
                state.position(),
                path.waypoints[seg - 1],
                path.waypoints[seg],
            );
            max_cross_track = max_cross_track.max(e.abs());
        }
    };
    finish(
        action,
        status,
        start,
        state,
        max_cross_track,
        Some(path),
        trajectory,
        None,
    )
}

#[allow(clippy::too_many_arguments)]
fn record_data(
    action: &Action,
    id: &str,
    heading: f64,
    world: &WorldState,
    start: &VesselState,
    params: &VesselParams,
    control: &ControlConfig,
    config: &ExecutorConfig,
) -> ActionExecution {
    let mut heading_pid = PidState::new(control.heading_pid);
    let mut allocator = ThrustAllocator::from_config(control);
    let mut state = *start;
    let mut trajectory = Vec::new();
    let status = loop {
        let err = wrap_angle(heading - state.psi);
        if err.abs() <= config.align_tolerance {
            let record = DataRecord {
                station: id.to_string(),
                timestamp: state.t,
                x: state.x,
                y: state.y,
                psi: state.psi,
                alignment_error: err.abs(),
            };
            return finish(
                action,
                OutcomeStatus::Success,
                start,
                state,
                0.0,
                None,
                trajectory,
                Some(record),
            );
        }
        if state.t - start.t > config.align_timeout || state.t >= config.max_sim_time {
            break OutcomeStatus::Failed(FailureReason::Timeout);
        }
        let tw = heading_twist(&mut heading_pid, &state, heading, 0.0, config.dt);
        let cmd = allocator.allocate(&tw, &state, params, config.dt);
        state = step(&state, &cmd, &world.disturbance, params, config.dt);
        trajectory.push(state);
    };
    finish(action, status, start, state, 0.0, None, trajectory, None)
}

/// True when every required station has a record or is unreachable.
pub fn completion_check(records: &[DataRecord], progress: &Progress, required: &[String]) -> bool {
    required
        .iter()
        .all(|id| records.iter().any(|r| &r.station == id) || progress.unreachable.contains(id))
}

fn pending(required: &[String], progress: &Progress) -> bool {
    required.iter().any(|id| !progress.is_settled(id))
}

/// Runs a validated scenario to termination. Every failure ends up in the
/// report; nothing is returned as an error.
pub fn run_mission(scenario: &Scenario, backend: &mut dyn PlanBackend) -> MissionReport {
    let world = &scenario.world;
    let config = &scenario.executor;
    let ctx = PlanningContext {
        template: scenario.template(),
        world,
        params: &scenario.params,
        mission: &scenario.mission,
        capabilities: &scenario.capabilities,
        max_replans: config.max_replans,
    };

    let mut state = scenario.initial_state;
    let mut report = MissionReport {
        final_status: STATUS_INCOMPLETE.to_string(),
        stop_reason: StopReason::AllTasksDone,
        backend: backend.name().to_string(),
        mission: scenario.mission.raw_text.clone(),
        required_stations: scenario
            .mission
            .required_stations(world)
            .unwrap_or_default(),
        unreachable: Vec::new(),
        records: Vec::new(),
        outcomes: Vec::new(),
        plans: Vec::new(),
        feedback: Vec::new(),
        planner_errors: Vec::new(),
        seed: None,
        trajectory: vec![state],
    };
    let known_required = scenario.mission.structured.is_some();
    let mut progress = Progress::default();
    let mut attempts: BTreeMap<String, u32> = BTreeMap::new();

    let mut next = ctx
        .plan(backend, &state, &progress)
        .map(|p| (EpisodeTrigger::Initial, p));
    loop {
        let (trigger, (plan, prompt)) = match next {
            Ok(ok) => ok,
            Err(ReplanError::ReplanBudgetExhausted { station, attempt }) => {
                report.planner_errors.push(format!(
                    "replan budget exhausted for `{station}` after {attempt} failed attempts"
                ));
                progress.mark_unreachable(&station);
                if pending(&report.required_stations, &progress)
                    && report.plans.len() < config.max_episodes as usize
                {
                    next = ctx
                        .plan(backend, &state, &progress)
                        .map(|p| (EpisodeTrigger::Continuation, p));
                    continue;
                }
                break;
            }
            Err(e) => {
                report.planner_errors.push(e.to_string());
                report.stop_reason = StopReason::PlannerError;
                break;
            }
        };
        if !known_required && report.plans.is_empty() {
            report.required_stations = plan.record_targets().map(str::to_string).collect();
            report.required_stations.dedup();
        }
        let episode = report.plans.len();
        report.plans.push(PlanEpisode {
            trigger,
            start_time: state.t,
            plan: plan.clone(),
            prompt,
        });

        let mut failure = None;
        for (i, action) in plan.steps.iter().enumerate() {
            let mut run = execute_action(
                action,
                world,
                &state,
                &scenario.params,
                &scenario.control,
                config,
            );
            run.outcome.episode = episode;
            run.outcome.step = i;
            state = run.state;
            report.trajectory.extend(run.trajectory);
            let status = run.outcome.status;
            report.outcomes.push(run.outcome);
            if let Some(record) = run.record {
                if !progress.completed.contains(&record.station) {
                    progress.completed.push(record.station.clone());
                }
                report.records.push(record);
            }
            if let OutcomeStatus::Failed(reason) = status {
                failure = Some((action.clone(), reason));
                break;
            }
        }

        if state.t >= config.max_sim_time {
            report.stop_reason = StopReason::SimTimeExhausted;
            break;
        }
        if report.plans.len() >= config.max_episodes as usize {
            if failure.is_some()
                || !completion_check(&report.records, &progress, &report.required_stations)
            {
                report.stop_reason = StopReason::EpisodeLimit;
            }
            break;
        }
        match failure {
            Some((action, reason)) => {
                let counter = attempts.entry(action.target().to_string()).or_insert(0);
                *counter += 1;
                let feedback = FeedbackReport {
                    failed_action: action,
                    reason,
                    usv_current_location: state.position(),
                    attempt: *counter,
                };
                next = replan_with_feedback(backend, &ctx, &state, &feedback, &mut progress)
                    .map(|p| (EpisodeTrigger::Feedback, p));
                report.feedback.push(feedback);
            }
            None => {
                if completion_check(&report.records, &progress, &report.required_stations) {
                    break;
                }
                next = ctx
                    .plan(backend, &state, &progress)
                    .map(|p| (EpisodeTrigger::Continuation, p));
            }
        }
    }

    report.unreachable = progress.unreachable.clone();
    let all_recorded = report
        .required_stations
        .iter()
        .all(|id| report.records.iter().any(|r| &r.station == id));
    if all_recorded && !report.required_stations.is_empty() {
        report.final_status = STATUS_COMPLETED.to_string();
    }
    report
}
