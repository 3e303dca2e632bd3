//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use usv_mission::cli::{execute, exit_code, BackendKind, RunArgs, EXIT_INCOMPLETE};
use usv_mission::dynamics::{step, VesselParams, VesselState};
use usv_mission::executor::{run_mission, MissionReport, OutcomeStatus};
use usv_mission::navigation::path::{
    polyline_length, raw_route, segment_is_free, smooth, Cell, OccupancyGrid,
};
use usv_mission::navigation::{
    heading_twist, los_heading, pid_step, ControlConfig, FailureReason, PidGains, PidState,
    ThrustAllocator,
};
use usv_mission::planner::{
    generate_plan, heuristic_plan, parse_plan, Action, CapabilitySet, GeneratePlanError,
    HttpTransport, MissionSpec, PlanRequest, Progress, PromptBundle, RemoteBackend, RemoteConfig,
    StructuredMission,
};
use usv_mission::world::{
    distance, is_collision_free, segment_distance, wrap_angle, Bounds, DockingStation, Obstacle,
    Point2, WorldState,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn station_at(id: &str, x: f64, y: f64) -> DockingStation {
    DockingStation {
        id: id.into(),
        position: Point2::new(x, y),
        z: 0.0,
        length: 4.0,
        width: 6.0,
        height: 3.0,
        approach_heading: 0.0,
    }
}

fn open_world(stations: Vec<DockingStation>) -> WorldState {
    WorldState {
        bounds: Bounds {
            min_x: 0.0,
            min_y: 0.0,
            max_x: 200.0,
            max_y: 200.0,
        },
        stations,
        obstacles: vec![],
        disturbance: Default::default(),
    }
}

// ---------------------------------------------------------------- 1

fn oracle_greedy(start: Point2, stations: &[(String, Point2)]) -> Vec<String> {
    let mut left: Vec<(String, Point2)> = stations.to_vec();
    let mut here = start;
    let mut out = Vec::new();
    while !left.is_empty() {
        let mut best = 0;
        for i in 1..left.len() {
            if distance(here, left[i].1) < distance(here, left[best].1) {
                best = i;
            }
        }
        let (id, p) = left.remove(best);
        out.push(id);
        here = p;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn open_tour(start: Point2, pts: &[Point2]) -> f64 {
    let mut here = start;
    let mut total = 0.0;
    for &p in pts {
        total += distance(here, p);
        here = p;
    }
    total
}

fn ordering_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let perms = permutations(4);
    assert_eq!(perms.len(), 24);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let start = Point2::new(rng.random_range(0.0..200.0), rng.random_range(0.0..200.0));
        let stations: Vec<(String, Point2)> = (0..4)
            .map(|i| {
                (
                    format!("ds_{}", i + 1),
                    Point2::new(rng.random_range(0.0..200.0), rng.random_range(0.0..200.0)),
                )
            })
            .collect();
        let world = open_world(
            stations
                .iter()
                .map(|(id, p)| station_at(id, p.x, p.y))
                .collect(),
        );
        let plan = heuristic_plan(&StructuredMission::VisitAll, start, &world);
        let got: Vec<String> = plan.record_targets().map(str::to_string).collect();
        let want = oracle_greedy(start, &stations);
        check(got == want, || {
            format!("greedy mismatch: {got:?} vs {want:?}")
        })?;

        let pos = |id: &String| stations.iter().find(|(s, _)| s == id).unwrap().1;
        let greedy_len = open_tour(start, &got.iter().map(pos).collect::<Vec<_>>());
        let best = perms
            .iter()
            .map(|p| open_tour(start, &p.iter().map(|&i| stations[i].1).collect::<Vec<_>>()))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(greedy_len / best);
        check(greedy_len <= 2.0 * best + 1e-9, || {
            format!("tour {greedy_len:.2} > 2 x optimum {best:.2}")
        })?;
    }
    let elapsed = t0.elapsed();
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "50 worlds, worst greedy/optimum {worst:.3}, {elapsed:.2?}"
    ))
}

// ---------------------------------------------------------------- 2

fn ordered_mission() -> Outcome {
    let scenario = common::with_mission(common::lake("lake4.toml"), "ordered:ds_1,ds_2,ds_3,ds_4");
    let t0 = Instant::now();
    let a = common::run_heuristic(&scenario);
    let elapsed = t0.elapsed();
    let b = common::run_heuristic(&scenario);
    check(
        a.recorded_stations() == ["ds_1", "ds_2", "ds_3", "ds_4"],
        || format!("records {:?}", a.recorded_stations()),
    )?;
    check(a.is_completed(), || a.final_status.clone())?;
    check(a == b, || "two runs differ".into())?;
    check(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "records ds_1..ds_4 in order, {:.1} s simulated, {elapsed:.2?} wall",
        a.trajectory.last().unwrap().t
    ))
}

// ---------------------------------------------------------------- 3

/// Checks capture of every planned goal and the deviation bound against the
/// planned polyline, using the trajectory slice of each MoveTo.
fn fidelity_of(
    report: &MissionReport,
    deviation_limit: f64,
    capture: f64,
) -> Result<(f64, f64), String> {
    let mut worst_capture: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    let mut moves = 0;
    for o in &report.outcomes {
        let (Action::MoveTo(_), Some(path)) = (&o.action, &o.path) else {
            continue;
        };
        moves += 1;
        check(o.status == OutcomeStatus::Success, || {
            format!("{} failed: {:?}", o.action, o.status)
        })?;
        let slice: Vec<&VesselState> = report
            .trajectory
            .iter()
            .filter(|s| s.t >= o.start_time - 1e-9 && s.t <= o.end_time + 1e-9)
            .collect();
        let goal = *path.waypoints.last().unwrap();
        let closest = slice
            .iter()
            .map(|s| distance(s.position(), goal))
            .fold(f64::INFINITY, f64::min);
        worst_capture = worst_capture.max(closest);
        check(closest <= capture, || {
            format!("{}: closest approach {closest:.2} m", o.action)
        })?;
        for s in &slice {
            let d = path
                .waypoints
                .windows(2)
                .map(|w| segment_distance(s.position(), w[0], w[1]))
                .fold(f64::INFINITY, f64::min);
            worst_dev = worst_dev.max(d);
        }
        check(o.max_cross_track < deviation_limit, || {
            format!("{}: cross-track {:.2} m", o.action, o.max_cross_track)
        })?;
        worst_dev = worst_dev.max(o.max_cross_track);
    }
    check(worst_dev < deviation_limit, || {
        format!("deviation {worst_dev:.2} m")
    })?;
    check(moves >= 4, || format!("only {moves} moves"))?;
    Ok((worst_capture, worst_dev))
}

fn fidelity() -> Outcome {
    let scenario = common::lake("lake4.toml");
    let limit = scenario.control.deviation_limit;
    let capture = scenario.control.capture_radius;
    check(capture == 2.0, || format!("capture radius {capture}"))?;
    let calm = common::run_heuristic(&scenario);
    check(calm.is_completed(), || calm.final_status.clone())?;
    let (c0, d0) = fidelity_of(&calm, limit, capture)?;

    let mut worst_current: f64 = 0.0;
    for k in 0..8 {
        let angle = k as f64 * PI / 4.0;
        let mut drift = scenario.clone();
        drift.world.disturbance.current = (0.3 * angle.cos(), 0.3 * angle.sin());
        let r = common::run_heuristic(&drift);
        check(r.is_completed(), || {
            format!("current at {angle:.2} rad: {}", r.final_status)
        })?;
        // capture of the goal only; the deviation bound is not part of the
        // drift criterion
        let (c, _) = fidelity_of(&r, f64::INFINITY, capture)
            .map_err(|e| format!("current at {angle:.2} rad: {e}"))?;
        worst_current = worst_current.max(c);
    }
    Ok(format!(
        "calm: closest approach <= {c0:.2} m, max deviation {d0:.2} m; 0.3 m/s current (8 directions): closest approach <= {worst_current:.2} m"
    ))
}

// ---------------------------------------------------------------- 4

fn replanning() -> Outcome {
    let scenario = common::lake("lake4_blocked.toml");
    let report = common::run_heuristic(&scenario);
    let again = common::run_heuristic(&scenario);
    check(report == again, || "two runs differ".into())?;
    check(report.plans.len() >= 2, || {
        format!("{} episodes", report.plans.len())
    })?;
    check(
        report
            .feedback
            .iter()
            .any(|f| f.reason == FailureReason::PathBlocked && f.failed_action.target() == "ds_1"),
        || format!("feedback {:?}", report.feedback),
    )?;
    for id in ["ds_2", "ds_3", "ds_4"] {
        check(report.recorded_stations().contains(&id), || {
            format!("{id} not recorded")
        })?;
    }
    check(report.unreachable == ["ds_1"], || {
        format!("unreachable {:?}", report.unreachable)
    })?;

    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_usv-mission"))
        .args(["run", "--scenario"])
        .arg(common::scenario_path("lake4_blocked.toml"))
        .arg("--out")
        .arg(out.path().join("run"))
        .output()
        .map_err(|e| e.to_string())?;
    let code = status.status.code();
    check(code == Some(EXIT_INCOMPLETE), || {
        format!("exit code {code:?}")
    })?;
    Ok(format!(
        "{} episodes, {} PathBlocked reports for ds_1, ds_2..ds_4 recorded, exit code 1",
        report.plans.len(),
        report.feedback.len()
    ))
}

// ---------------------------------------------------------------- 5

fn dijkstra(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Option<f64> {
    let (cols, rows) = (grid.cols(), grid.rows());
    let idx = |(c, r): Cell| r * cols + c;
    let mut dist = vec![f64::INFINITY; cols * rows];
    let mut done = vec![false; cols * rows];
    dist[idx(start)] = 0.0;
    loop {
        // O(n^2) selection keeps the oracle free of heap subtleties
        let mut best: Option<usize> = None;
        for i in 0..dist.len() {
            if !done[i] && dist[i].is_finite() && best.is_none_or(|b| dist[i] < dist[b]) {
                best = Some(i);
            }
        }
        let i = best?;
        if i == idx(goal) {
            return Some(dist[i]);
        }
        done[i] = true;
        let (c, r) = ((i % cols) as isize, (i / cols) as isize);
        for dc in -1isize..=1 {
            for dr in -1isize..=1 {
                if dc == 0 && dr == 0 {
                    continue;
                }
                let (nc, nr) = (c + dc, r + dr);
                if nc < 0 || nr < 0 || nc >= cols as isize || nr >= rows as isize {
                    continue;
                }
                let n = (nc as usize, nr as usize);
                if grid.is_blocked(n) {
                    continue;
                }
                if dc != 0
                    && dr != 0
                    && (grid.is_blocked(((c + dc) as usize, r as usize))
                        || grid.is_blocked((c as usize, (r + dr) as usize)))
                {
                    continue;
                }
                let w = if dc != 0 && dr != 0 { 2f64.sqrt() } else { 1.0 };
                let j = idx(n);
                if dist[i] + w < dist[j] {
                    dist[j] = dist[i] + w;
                }
            }
        }
    }
}

fn random_obstacle_world(rng: &mut ChaCha8Rng) -> WorldState {
    let mut obstacles = Vec::new();
    for _ in 0..rng.random_range(4..12) {
        if rng.random_bool(0.5) {
            obstacles.push(Obstacle::Circle {
                center: Point2::new(rng.random_range(5.0..35.0), rng.random_range(5.0..35.0)),
                radius: rng.random_range(1.0..4.0),
            });
        } else {
            let (x, y) = (rng.random_range(3.0..30.0), rng.random_range(3.0..30.0));
            let (w, h) = (rng.random_range(1.0..6.0), rng.random_range(1.0..6.0));
            obstacles.push(Obstacle::Polygon {
                vertices: vec![
                    Point2::new(x, y),
                    Point2::new(x + w, y),
                    Point2::new(x + w, y + h),
                    Point2::new(x, y + h),
                ],
            });
        }
    }
    WorldState {
        bounds: Bounds {
            min_x: 0.0,
            min_y: 0.0,
            max_x: 40.0,
            max_y: 40.0,
        },
        stations: vec![],
        obstacles,
        disturbance: Default::default(),
    }
}

fn path_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (resolution, clearance) = (1.0, 0.5);
    let mut solved = 0;
    let mut disconnected = 0;
    for _ in 0..100 {
        let world = random_obstacle_world(&mut rng);
        let mut grid = OccupancyGrid::build(&world, resolution, clearance);
        check(grid.cols() == 40 && grid.rows() == 40, || {
            "grid is not 40x40".into()
        })?;
        for _ in 0..rng.random_range(0..200) {
            let cell = (rng.random_range(0..40), rng.random_range(0..40));
            grid.set_blocked(cell, true);
        }
        let free: Vec<Cell> = (0..40)
            .flat_map(|c| (0..40).map(move |r| (c, r)))
            .filter(|&c| !grid.is_blocked(c))
            .collect();
        let start = free[rng.random_range(0..free.len())];
        let goal = free[rng.random_range(0..free.len())];
        let astar = grid.astar(start, goal).map(|p| p.cost);
        let oracle = dijkstra(&grid, start, goal);
        match (astar, oracle) {
            (Some(a), Some(d)) => {
                check((a - d).abs() < 1e-9, || format!("A* {a} vs Dijkstra {d}"))?;
                solved += 1;
            }
            (None, None) => disconnected += 1,
            other => return Err(format!("reachability disagrees: {other:?}")),
        }

        // smoothing on the unmodified world grid between free cell centers
        let world_grid = OccupancyGrid::build(&world, resolution, clearance);
        let a = world_grid.center(start);
        let b = world_grid.center(goal);
        if !is_collision_free(a, &world, clearance) || !is_collision_free(b, &world, clearance) {
            continue;
        }
        if let Ok(raw) = raw_route(a, b, &world, resolution, clearance) {
            let spacing = resolution / 2.0;
            let smoothed = smooth(&raw, &world, clearance, spacing);
            let (lr, ls) = (polyline_length(&raw), polyline_length(&smoothed));
            check(ls <= lr + 1e-9, || format!("smoothed {ls} > raw {lr}"))?;
            check(
                smoothed.first() == raw.first() && smoothed.last() == raw.last(),
                || "endpoints moved".into(),
            )?;
            for w in smoothed.windows(2) {
                let n = (distance(w[0], w[1]) / spacing).ceil().max(1.0) as usize;
                for k in 0..=n {
                    let p = w[0].lerp(w[1], k as f64 / n as f64);
                    check(is_collision_free(p, &world, clearance), || {
                        format!("smoothed path collides at {p}")
                    })?;
                }
                check(
                    segment_is_free(w[0], w[1], &world, clearance, spacing),
                    || "segment check failed".into(),
                )?;
            }
        }
    }
    let elapsed = t0.elapsed();
    check(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("100 grids ({solved} connected, {disconnected} disconnected), costs equal, smoothing sound, {elapsed:.2?}"))
}

// ---------------------------------------------------------------- 6

/// Simulates heading hold and returns the time after which the error stays
/// within `tol` until the end of a 90 s run.
fn settle_time(target: f64, cruise: f64, tol: f64) -> Option<f64> {
    let control = ControlConfig::default();
    let params = VesselParams::default();
    let dt = 0.1;
    let mut pid = PidState::new(control.heading_pid);
    let mut alloc = ThrustAllocator::from_config(&control);
    let mut s = VesselState::at_rest(0.0, 0.0, 0.0);
    let mut settled_at: Option<f64> = None;
    while s.t < 90.0 {
        let tw = heading_twist(&mut pid, &s, target, cruise, dt);
        let cmd = alloc.allocate(&tw, &s, &params, dt);
        s = step(&s, &cmd, &Default::default(), &params, dt);
        if wrap_angle(target - s.psi).abs() <= tol {
            settled_at.get_or_insert(s.t);
        } else {
            settled_at = None;
        }
    }
    settled_at
}

fn control_properties() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut targets: Vec<f64> = (0..24).map(|k| -PI + k as f64 * PI / 12.0).collect();
    targets.extend([3.1, -3.1, 0.01, -0.02]);
    for &target in &targets {
        for cruise in [0.0, 1.5] {
            let t = settle_time(target, cruise, 0.05)
                .ok_or_else(|| format!("heading {target:.3} (cruise {cruise}) never holds"))?;
            check(t <= 60.0, || {
                format!("heading {target:.3} (cruise {cruise}) settles at {t:.1} s")
            })?;
            worst = worst.max(t);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut max_err: f64 = 0.0;
    for _ in 0..2000 {
        let mut p = || {
            Point2::new(
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
            )
        };
        let (pos, a, b) = (p(), p(), p());
        if distance(a, b) < 1e-3 {
            continue;
        }
        let look = rng.random_range(0.5..10.0);
        let theta = rng.random_range(-PI..PI);
        let rot = |q: Point2| {
            Point2::new(
                q.x * theta.cos() - q.y * theta.sin(),
                q.x * theta.sin() + q.y * theta.cos(),
            )
        };
        let h0 = los_heading(pos, a, b, look);
        let h1 = los_heading(rot(pos), rot(a), rot(b), look);
        max_err = max_err.max(wrap_angle(h1 - (h0 + theta)).abs());
    }
    check(max_err <= 1e-9, || {
        format!("LOS equivariance error {max_err:e}")
    })?;

    let gains = |kp, ki, kd| PidGains {
        kp,
        ki,
        kd,
        output_limit: 10.0,
        integral_limit: 10.0,
    };
    let (out, _) = pid_step(PidState::new(gains(1.0, 0.0, 0.0)), 0.5, 0.1);
    check(out == 0.5, || format!("P example gave {out}"))?;
    let (out, _) = pid_step(PidState::new(gains(0.8, 0.02, 0.1)), 0.0, 0.1);
    check(out == 0.0, || format!("zero example gave {out}"))?;
    let (o1, s1) = pid_step(PidState::new(gains(0.0, 1.0, 0.0)), 1.0, 0.1);
    let (o2, _) = pid_step(s1, 1.0, 0.1);
    check(o1 == 0.1 && o2 == 0.2, || {
        format!("I example gave {o1}, {o2}")
    })?;
    Ok(format!(
        "{} headings held within 0.05 rad by {worst:.1} s; LOS equivariance error {max_err:.1e}; PID examples exact",
        targets.len()
    ))
}

// ---------------------------------------------------------------- 7

fn fuzz_corpus() -> Vec<String> {
    let valid = common::valid_plan_json(&["ds_1", "ds_2"]);
    let mut corpus: Vec<String> = vec![
        String::new(),
        " ".into(),
        "null".into(),
        "[]".into(),
        "{}".into(),
        "{".into(),
        "}{".into(),
        "I'm sorry, I can't help with that.".into(),
        r#"{"plan": []}"#.into(),
        r#"{"plan": [], "reasoning": "nothing"}"#.into(),
        r#"{"plan": null, "reasoning": ""}"#.into(),
        r#"{"plan": {}, "reasoning": ""}"#.into(),
        r#"{"plan": "move", "reasoning": ""}"#.into(),
        r#"{"plan": [1, 2, 3], "reasoning": ""}"#.into(),
        r#"{"plan": [null], "reasoning": ""}"#.into(),
        r#"{"plan": [[]], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "fly_to", "target": "ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_9"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"target": "ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": 7, "target": "ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "record_data", "target": 1}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "record_data", "target": "ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1"}, {"action": "record_data", "target": "ds_2"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1"}, {"action": "move_to_docking_station", "target": "ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1"}, {"action": "record_data", "target": "ds_1"}, {"action": "record_data", "target": "ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "MOVE_TO_DOCKING_STATION", "target": "ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "DS_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": " ds_1"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": ""}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1\u0000"}], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1"}], "reasoning": 5}"#.into(),
        r#"{"reasoning": "no plan key"}"#.into(),
        r#"{"Plan": [], "reasoning": ""}"#.into(),
        r#"{"plan": [{"action": "record_data", "target": "ds_1"}, {"action": "move_to_docking_station", "target": "ds_1"}], "reasoning": ""}"#.into(),
        "```json\n{\"plan\": [{\"action\": \"teleport\", \"target\": \"ds_1\"}], \"reasoning\": \"\"}\n```".into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1", "speed": 99}], "reasoning": ""}"#.into(),
        "{\"plan\": [{\"action\": \"move_to_docking_station\", \"target\": \"ds_1\"}], \"reasoning\": \"\"".into(),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1"}], "reasoning": "", "plan": []}"#.into(),
        "{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{{".into(),
        "]]]]]]]]".into(),
        "\u{feff}{\"plan\": 1}".into(),
        "{\"plan\": [{\"action\": \"move_to_docking_station\", \"target\": \"ds_1\"}], \"reasoning\": \"\u{202e}evil\"}".into(),
        format!("{{\"plan\": [{}], \"reasoning\": \"\"}}", vec![r#"{"action": "move_to_docking_station", "target": "ds_1"}"#; 50].join(",")),
        "9".repeat(400),
        r#"{"plan": [{"action": "move_to_docking_station", "target": "ds_1"}, {"action": "record_data", "target": "ds_3"}], "reasoning": ""}"#.into(),
    ];
    // every truncation of a valid answer
    for cut in (0..valid.len()).step_by(3) {
        corpus.push(valid[..cut].to_string());
    }
    // random byte soup and single-character corruptions
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alphabet: Vec<char> = "{}[]\":,abcdefgnrtuls_0123456789 \\\n".chars().collect();
    for _ in 0..60 {
        let n = rng.random_range(1..80);
        corpus.push(
            (0..n)
                .map(|_| alphabet[rng.random_range(0..alphabet.len())])
                .collect(),
        );
    }
    for _ in 0..60 {
        let mut chars: Vec<char> = valid.chars().collect();
        let i = rng.random_range(0..chars.len());
        chars[i] = alphabet[rng.random_range(0..alphabet.len())];
        corpus.push(chars.into_iter().collect());
    }
    corpus
}

fn schema_robustness() -> Outcome {
    let world = open_world(vec![
        station_at("ds_1", 50.0, 50.0),
        station_at("ds_2", 100.0, 50.0),
    ]);
    let caps = CapabilitySet::default();
    let corpus = fuzz_corpus();
    check(corpus.len() >= 200, || {
        format!("corpus has {} entries", corpus.len())
    })?;
    let classes = [
        "SchemaError",
        "UnknownAction",
        "UnknownTarget",
        "InvariantError",
    ];
    let (mut accepted, mut rejected) = (0, 0);
    for raw in &corpus {
        match parse_plan(raw, &world, &caps) {
            Ok(plan) => {
                accepted += 1;
                check(plan.check_invariants().is_ok(), || {
                    format!("accepted invalid plan from {raw:?}")
                })?;
                check(
                    plan.steps
                        .iter()
                        .all(|a| world.station(a.target()).is_some()),
                    || format!("accepted unknown target from {raw:?}"),
                )?;
            }
            Err(e) => {
                rejected += 1;
                check(classes.contains(&e.class()), || {
                    format!("unclassified error {e:?}")
                })?;
            }
        }
    }

    // one corrective re-prompt against a scripted endpoint
    let good = common::valid_plan_json(&["ds_1"]);
    let retry_ok = reprompt_run(vec![Ok("Sure! Here is the plan.".into()), Ok(good.clone())])?;
    check(retry_ok.0.is_ok(), || {
        format!("re-prompt did not recover: {:?}", retry_ok.0)
    })?;
    check(retry_ok.1 == 2, || {
        format!("{} requests for one rejection", retry_ok.1)
    })?;
    let retry_fail = reprompt_run(vec![Ok("nope".into()), Ok("still nope".into()), Ok(good)])?;
    check(
        matches!(&retry_fail.0, Err(GeneratePlanError::PlanRejected { raw_responses, .. }) if raw_responses.len() == 2),
        || format!("expected rejection after two replies: {:?}", retry_fail.0),
    )?;
    check(retry_fail.1 == 2, || {
        format!("{} requests after two rejections", retry_fail.1)
    })?;
    Ok(format!(
        "{} responses ({accepted} accepted, {rejected} rejected with a class); scripted endpoint saw exactly one re-prompt",
        corpus.len()
    ))
}

type GenerateResult = Result<usv_mission::planner::SymbolicPlan, GeneratePlanError>;

fn reprompt_run(replies: Vec<Result<String, u16>>) -> Result<(GenerateResult, usize), String> {
    let endpoint = common::FakeEndpoint::start(replies);
    let config = RemoteConfig {
        base_url: endpoint.base_url.clone(),
        model: "fake".into(),
        timeout_s: 5.0,
        api_key_env: "UNUSED".into(),
    };
    let transport = HttpTransport::new(&config, "test-key".into()).map_err(|e| e.to_string())?;
    let mut backend = RemoteBackend::new(transport, "fake");
    let world = open_world(vec![station_at("ds_1", 50.0, 50.0)]);
    let mission = MissionSpec::from_cli("Inspect ds_1");
    let prompt = PromptBundle {
        system_text: "system".into(),
        mission_text: "Mission goal: Inspect ds_1".into(),
        feedback_text: None,
    };
    let progress = Progress::default();
    let request = PlanRequest {
        prompt: &prompt,
        world: &world,
        mission: &mission,
        start: Point2::new(0.0, 0.0),
        progress: &progress,
        correction: None,
    };
    let result = generate_plan(&mut backend, &request, &CapabilitySet::default());
    let seen = endpoint.requests();
    if let Some(second) = seen.get(1) {
        let text = second["messages"][1]["content"]
            .as_str()
            .unwrap_or_default();
        check(text.contains("previous response was rejected"), || {
            "re-prompt lacks correction".into()
        })?;
    }
    Ok((result, seen.len()))
}

// ---------------------------------------------------------------- 8

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let args = RunArgs {
            scenario: common::scenario_path("lake4.toml"),
            mission: Some("visit_all".into()),
            backend: BackendKind::Heuristic,
            seed: 42,
            out: dir.path().join(name),
            plot: true,
            dt: None,
            max_sim_time: None,
        };
        let result = execute(&args);
        check(exit_code(&result) == 0, || {
            format!("run {name} failed: {result:?}")
        })?;
        let read = |f: &str| std::fs::read(args.out.join(f)).map_err(|e| e.to_string());
        Ok((read("mission_report.json")?, read("plot.svg")?))
    };
    let (r1, p1) = run("a")?;
    let (r2, p2) = run("b")?;
    check(r1 == r2, || "mission_report.json differs".into())?;
    check(p1 == p2, || "plot.svg differs".into())?;
    // same check on the incomplete scenario, in process
    let blocked = common::lake("lake4_blocked.toml");
    let a = run_mission(
        &blocked,
        &mut usv_mission::planner::HeuristicBackend::default(),
    );
    let b = run_mission(
        &blocked,
        &mut usv_mission::planner::HeuristicBackend::default(),
    );
    check(
        usv_mission::report::report_json(&a) == usv_mission::report::report_json(&b),
        || "blocked report differs".into(),
    )?;
    Ok(format!(
        "report ({} bytes) and plot ({} bytes) byte-identical",
        r1.len(),
        p1.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 ordering oracle", ordering_oracle),
        ("2 ordered mission contract", ordered_mission),
        ("3 planned-vs-executed fidelity", fidelity),
        ("4 replanning loop", replanning),
        ("5 path-planner oracle", path_oracle),
        ("6 control properties", control_properties),
        ("7 plan-schema robustness", schema_robustness),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{:.2?}]", t0.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
