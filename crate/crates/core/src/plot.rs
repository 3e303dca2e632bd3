//! Planned-vs-executed SVG plot.
//!
//! World coordinates map to SVG pixels without a vertical flip, so positive
//! headings read clockwise on screen, matching the vessel frame.

use std::fmt::Write as _;

use crate::executor::MissionReport;
use crate::world::{Obstacle, Point2, WorldState};

const MARGIN: f64 = 40.0;
const LEGEND_HEIGHT: f64 = 56.0;
const TARGET_WIDTH: f64 = 800.0;

struct Frame {
    origin: Point2,
    scale: f64,
}

impl Frame {
    fn map(&self, p: Point2) -> (f64, f64) {
        (
            MARGIN + (p.x - self.origin.x) * self.scale,
            MARGIN + (p.y - self.origin.y) * self.scale,
        )
    }
}

fn points_attr(frame: &Frame, pts: impl IntoIterator<Item = Point2>) -> String {
    pts.into_iter()
        .map(|p| {
            let (x, y) = frame.map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the lake, stations, obstacles, planned waypoints (one marker
/// each) and the executed trajectory (a single polyline, omitted when the
/// trajectory has fewer than two points).
pub fn render_plot(report: &MissionReport, world: &WorldState) -> String {
    let b = &world.bounds;
    let scale = TARGET_WIDTH / b.width();
    let frame = Frame {
        origin: Point2::new(b.min_x, b.min_y),
        scale,
    };
    let width = 2.0 * MARGIN + b.width() * scale;
    let height = 2.0 * MARGIN + b.height() * scale + LEGEND_HEIGHT;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(&report.final_status));
    let _ = writeln!(
        svg,
        r##"<rect class="lake" x="{MARGIN:.2}" y="{MARGIN:.2}" width="{:.2}" height="{:.2}" fill="#e6f2fa" stroke="#336699" stroke-width="1.5"/>"##,
        b.width() * scale,
        b.height() * scale
    );

    for ob in &world.obstacles {
        match ob {
            Obstacle::Circle { center, radius } => {
                let (cx, cy) = frame.map(*center);
                let _ = writeln!(
                    svg,
                    r##"<circle class="obstacle" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="#8c8c8c"/>"##,
                    radius * scale
                );
            }
            Obstacle::Polygon { vertices } => {
                let _ = writeln!(
                    svg,
                    r##"<polygon class="obstacle" points="{}" fill="#8c8c8c"/>"##,
                    points_attr(&frame, vertices.iter().copied())
                );
            }
        }
    }

    for st in &world.stations {
        let _ = writeln!(
            svg,
            r##"<polygon class="station" points="{}" fill="#f2b84b" stroke="#7a5200"/>"##,
            points_attr(&frame, st.footprint())
        );
        let (lx, ly) = frame.map(st.position);
        let _ = writeln!(
            svg,
            r#"<text class="station-label" x="{lx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            ly - 4.0,
            escape(&st.id)
        );
    }

    if report.trajectory.len() >= 2 {
        let _ = writeln!(
            svg,
            r##"<polyline class="executed" points="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
            points_attr(&frame, report.trajectory.iter().map(|s| s.position()))
        );
    }

    for p in report.planned_waypoints() {
        let (x, y) = frame.map(p);
        let _ = writeln!(
            svg,
            r##"<circle class="planned-waypoint" cx="{x:.2}" cy="{y:.2}" r="3.00" fill="none" stroke="#1f5fbf" stroke-width="1.5"/>"##
        );
    }

    let ly = MARGIN + b.height() * scale + 28.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    let _ = writeln!(
        svg,
        r##"<circle cx="{:.2}" cy="{ly:.2}" r="3.00" fill="none" stroke="#1f5fbf" stroke-width="1.5"/>"##,
        MARGIN + 6.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}">planned waypoints</text>"#,
        MARGIN + 16.0,
        ly + 4.0
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
        MARGIN + 160.0,
        MARGIN + 184.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}">executed trajectory</text>"#,
        MARGIN + 190.0,
        ly + 4.0
    );
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
