#![allow(dead_code)]

use std::path::PathBuf;

use usv_mission::executor::{run_mission, MissionReport};
use usv_mission::planner::{HeuristicBackend, MissionSpec};
use usv_mission::scenario::{load_scenario, Scenario};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

pub fn lake(name: &str) -> Scenario {
    load_scenario(&scenario_path(name)).expect("fixture scenario loads")
}

pub fn with_mission(mut scenario: Scenario, mission: &str) -> Scenario {
    scenario.mission = MissionSpec::from_cli(mission);
    scenario
}

pub fn run_heuristic(scenario: &Scenario) -> MissionReport {
    run_mission(scenario, &mut HeuristicBackend::default())
}

/// Local stand-in for a chat-completion endpoint. Replies are served in
/// order; every request body is kept for inspection.
pub struct FakeEndpoint {
    pub base_url: String,
    requests: std::sync::Arc<std::sync::Mutex<Vec<serde_json::Value>>>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl FakeEndpoint {
    /// `replies` are assistant message contents, or `Err(status)` for an
    /// HTTP error. The server stops after the last reply.
    pub fn start(replies: Vec<Result<String, u16>>) -> Self {
        let server = tiny_http::Server::http("127.0.0.1:0").expect("bind fake endpoint");
        let addr = server.server_addr().to_ip().expect("tcp address");
        let requests = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
        let log = requests.clone();
        let handle = std::thread::spawn(move || {
            for reply in replies {
                let Ok(mut req) = server.recv() else { return };
                let mut body = String::new();
                let _ = req.as_reader().read_to_string(&mut body);
                let auth = req
                    .headers()
                    .iter()
                    .find(|h| h.field.equiv("Authorization"))
                    .map(|h| h.value.to_string());
                let mut value: serde_json::Value =
                    serde_json::from_str(&body).unwrap_or(serde_json::Value::Null);
                if let Some(obj) = value.as_object_mut() {
                    obj.insert("_path".into(), req.url().into());
                    obj.insert("_auth".into(), auth.into());
                }
                log.lock().unwrap().push(value);
                let response = match reply {
                    Ok(content) => tiny_http::Response::from_string(
                        serde_json::json!({
                            "id": "fake",
                            "choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]
                        })
                        .to_string(),
                    )
                    .with_status_code(200),
                    Err(status) => tiny_http::Response::from_string("{\"error\":\"scripted\"}")
                        .with_status_code(status),
                };
                let _ = req.respond(response);
            }
        });
        Self {
            base_url: format!("http://{addr}/v1"),
            requests,
            handle: Some(handle),
        }
    }

    pub fn requests(&self) -> Vec<serde_json::Value> {
        self.requests.lock().unwrap().clone()
    }
}

impl Drop for FakeEndpoint {
    fn drop(&mut self) {
        // the server thread exits once its replies are used up; a test that
        // consumed fewer replies just leaves it parked on accept
        if let Some(h) = self.handle.take() {
            if h.is_finished() {
                let _ = h.join();
            }
        }
    }
}

pub fn valid_plan_json(ids: &[&str]) -> String {
    let steps: Vec<serde_json::Value> = ids
        .iter()
        .flat_map(|id| {
            [
                serde_json::json!({"action": "move_to_docking_station", "target": id}),
                serde_json::json!({"action": "record_data", "target": id}),
            ]
        })
        .collect();
    serde_json::json!({"plan": steps, "reasoning": "scripted"}).to_string()
}
