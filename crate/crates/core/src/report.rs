//! Run-directory artifacts. Every file is written to a temporary sibling and
//! renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::executor::MissionReport;
use crate::planner::remote::Exchange;

pub const REPORT_FILE: &str = "mission_report.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const PLOT_FILE: &str = "plot.svg";

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn report_json(report: &MissionReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn trajectory_csv(report: &MissionReport) -> String {
    let mut out = String::from("t,x,y,psi,u,v,r\n");
    for s in &report.trajectory {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.t, s.x, s.y, s.psi, s.u, s.v, s.r
        );
    }
    out
}

/// Writes the report, trajectory, one `plan_{i}.json` per planning episode
/// and, when given, `transcript.json` with every backend exchange. Returns
/// the paths written.
pub fn write_run_dir(
    dir: &Path,
    report: &MissionReport,
    transcript: &[Exchange],
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> std::io::Result<()> {
        let path = dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        written.push(path);
        Ok(())
    };
    put(REPORT_FILE.into(), report_json(report))?;
    put(TRAJECTORY_FILE.into(), trajectory_csv(report))?;
    for (i, episode) in report.plans.iter().enumerate() {
        let mut s = serde_json::to_string_pretty(episode).expect("plan serializes");
        s.push('\n');
        put(format!("plan_{i}.json"), s)?;
    }
    if !transcript.is_empty() {
        let mut s = serde_json::to_string_pretty(transcript).expect("transcript serializes");
        s.push('\n');
        put("transcript.json".into(), s)?;
    }
    Ok(written)
}
