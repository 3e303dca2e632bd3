//! Mission planning and simulation for an unmanned surface vessel.
//!
//! A plan backend (remote chat-completion model or an offline heuristic)
//! turns a mission into a symbolic plan of `move_to_docking_station` and
//! `record_data` steps. The executor runs each step through path planning,
//! line-of-sight guidance, PID control and a 3-DOF vessel model, and feeds
//! failures back to the planner for replanning.

pub mod cli;
pub mod dynamics;
pub mod executor;
pub mod navigation;
pub mod planner;
pub mod plot;
pub mod report;
pub mod scenario;
pub mod world;
