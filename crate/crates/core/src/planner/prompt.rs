//! Prompt rendering: system text with vessel and environment description,
//! mission goal, and an optional feedback paragraph.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CapabilitySet, FeedbackReport, MissionSpec, Progress};
use crate::dynamics::{VesselParams, VesselState};
use crate::world::{Obstacle, WorldState};

pub const DEFAULT_TEMPLATE: &str = r#"You are the mission planner of an unmanned surface vessel (USV) operating on a lake.

USV description:
{usv_description}

Environment:
{environment_description}

The USV is currently at {usv_current_location}.

Mission goal: {mission_goal}

Symbolic actions the USV can perform:
{capabilities}

Reply with a single JSON object of the form
{"plan": [{"action": "move_to_docking_station", "target": "ds_1"}, {"action": "record_data", "target": "ds_1"}], "reasoning": "why this order was chosen"}
Every record_data step must directly follow a move_to_docking_station step with the same target.
Unless the mission fixes the order, order the stations to minimise the total distance travelled."#;

const REQUIRED_SLOTS: [&str; 2] = ["usv_current_location", "mission_goal"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_text: String,
    pub mission_text: String,
    pub feedback_text: Option<String>,
}

impl PromptBundle {
    /// User-turn text: mission, then feedback when present.
    pub fn user_text(&self) -> String {
        match &self.feedback_text {
            Some(fb) => format!("{}\n\n{}", self.mission_text, fb),
            None => self.mission_text.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("template is missing the `{{{0}}}` slot")]
    MissingSlot(String),
    #[error("template placeholder `{{{0}}}` has no value")]
    UnfilledPlaceholder(String),
}

/// `{identifier}` tokens in order of appearance. JSON snippets such as
/// `{"plan": ...}` are not placeholders.
fn placeholders(template: &str) -> Vec<(usize, usize, &str)> {
    let bytes = template.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let mut j = i + 1;
            while j < bytes.len()
                && (bytes[j].is_ascii_lowercase() || bytes[j] == b'_' || bytes[j].is_ascii_digit())
            {
                j += 1;
            }
            if j > i + 1 && j < bytes.len() && bytes[j] == b'}' {
                out.push((i, j + 1, &template[i + 1..j]));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

fn fmt_deg(rad: f64) -> String {
    format!("{:.1} deg", rad.to_degrees())
}

fn usv_description(params: &VesselParams) -> String {
    format!(
        "Length {:.2} m, beam {:.2} m. Propulsion: two rotatable pods for steerable thrust, \
         up to {:.0} rpm each. Maximum surge speed {:.2} m/s.",
        params.length, params.beam, params.rpm_max, params.u_max
    )
}

fn environment_description(world: &WorldState) -> String {
    let b = &world.bounds;
    let mut out = format!(
        "Lake bounds: x from {:.2} to {:.2} m, y from {:.2} to {:.2} m.\n",
        b.min_x, b.max_x, b.min_y, b.max_y
    );
    let _ = writeln!(out, "Docking stations ({}):", world.stations.len());
    for st in &world.stations {
        let _ = writeln!(
            out,
            "- {}: position (x={:.2}, y={:.2}, z={:.2}) m, dimensions l={:.2} w={:.2} h={:.2} m, recording heading {}",
            st.id,
            st.position.x,
            st.position.y,
            st.z,
            st.length,
            st.width,
            st.height,
            fmt_deg(st.approach_heading)
        );
    }
    if world.obstacles.is_empty() {
        out.push_str("No known obstacles.");
    } else {
        let _ = writeln!(out, "Known obstacles ({}):", world.obstacles.len());
        for ob in &world.obstacles {
            match ob {
                Obstacle::Circle { center, radius } => {
                    let _ = writeln!(
                        out,
                        "- circle at (x={:.2}, y={:.2}) m, radius {:.2} m",
                        center.x, center.y, radius
                    );
                }
                Obstacle::Polygon { vertices } => {
                    let pts: Vec<String> = vertices
                        .iter()
                        .map(|v| format!("({:.2}, {:.2})", v.x, v.y))
                        .collect();
                    let _ = writeln!(out, "- polygon {}", pts.join(" "));
                }
            }
        }
    }
    out.trim_end().to_string()
}

fn capabilities_description(caps: &CapabilitySet) -> String {
    caps.actions
        .iter()
        .map(|a| format!("- {}(target): {}", a.name, a.description))
        .collect::<Vec<_>>()
        .join("\n")
}

fn list_or_none(ids: &[String]) -> String {
    if ids.is_empty() {
        "none".to_string()
    } else {
        ids.join(", ")
    }
}

fn progress_paragraph(progress: &Progress) -> String {
    format!(
        "Stations already inspected: {}. Stations marked unreachable: {}.",
        list_or_none(&progress.completed),
        list_or_none(&progress.unreachable)
    )
}

/// Renders the three prompt parts. Both `{usv_current_location}` and
/// `{mission_goal}` must appear in `template`; the optional description
/// slots are appended as sections when the template omits them.
#[allow(clippy::too_many_arguments)]
pub fn build_prompt(
    template: &str,
    world: &WorldState,
    state: &VesselState,
    params: &VesselParams,
    mission: &MissionSpec,
    capabilities: &CapabilitySet,
    feedback: Option<&FeedbackReport>,
    progress: &Progress,
) -> Result<PromptBundle, TemplateError> {
    let slots = placeholders(template);
    for required in REQUIRED_SLOTS {
        if !slots.iter().any(|(_, _, name)| *name == required) {
            return Err(TemplateError::MissingSlot(required.to_string()));
        }
    }

    let location = format!(
        "(x={:.2}, y={:.2}) m, heading {}",
        state.x,
        state.y,
        fmt_deg(state.psi)
    );
    let values = [
        ("usv_current_location", location),
        ("mission_goal", mission.raw_text.clone()),
        ("usv_description", usv_description(params)),
        ("environment_description", environment_description(world)),
        ("capabilities", capabilities_description(capabilities)),
    ];

    let mut system_text = String::with_capacity(template.len() * 2);
    let mut cursor = 0;
    for &(start, end, name) in &slots {
        let value = values
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| TemplateError::UnfilledPlaceholder(name.to_string()))?;
        system_text.push_str(&template[cursor..start]);
        system_text.push_str(value);
        cursor = end;
    }
    system_text.push_str(&template[cursor..]);

    for (name, title) in [
        ("usv_description", "USV description"),
        ("environment_description", "Environment"),
        ("capabilities", "Symbolic actions the USV can perform"),
    ] {
        if !slots.iter().any(|(_, _, n)| *n == name) {
            let value = &values
                .iter()
                .find(|(k, _)| *k == name)
                .expect("known slot")
                .1;
            let _ = write!(system_text, "\n\n{title}:\n{value}");
        }
    }

    let mut mission_text = format!("Mission goal: {}", mission.raw_text);
    let feedback_text = feedback.map(|fb| {
        format!(
            "Feedback from the low-level controller (attempt {}): the action {} failed with \
             reason {} ({}). The USV is now at (x={:.2}, y={:.2}) m. {} Produce a new plan for \
             the remaining stations only, starting from the current location, that avoids the \
             cause of this failure.",
            fb.attempt,
            fb.failed_action,
            fb.reason.token(),
            fb.reason.describe(),
            fb.usv_current_location.x,
            fb.usv_current_location.y,
            progress_paragraph(progress)
        )
    });
    if feedback.is_none() && (!progress.completed.is_empty() || !progress.unreachable.is_empty()) {
        let _ = write!(
            mission_text,
            "\n\n{} Plan only the remaining stations.",
            progress_paragraph(progress)
        );
    }

    Ok(PromptBundle {
        system_text,
        mission_text,
        feedback_text,
    })
}
