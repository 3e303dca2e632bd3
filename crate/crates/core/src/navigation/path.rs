//! Occupancy-grid A* with line-of-sight shortcut smoothing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::world::{distance, is_collision_free, Point2, WorldState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<Point2>,
    pub total_length: f64,
}

impl Path {
    pub fn from_waypoints(waypoints: Vec<Point2>) -> Self {
        let total_length = polyline_length(&waypoints);
        Self {
            waypoints,
            total_length,
        }
    }

    pub fn goal(&self) -> Point2 {
        *self
            .waypoints
            .last()
            .expect("path has at least one waypoint")
    }
}

pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| distance(w[0], w[1])).sum()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanPathError {
    #[error("start {0} is not collision-free")]
    StartBlocked(Point2),
    #[error("goal {0} is not collision-free")]
    GoalBlocked(Point2),
    #[error("no path from {start} to {goal} at the configured clearance")]
    NoPathFound { start: Point2, goal: Point2 },
}

/// Grid cell index as (column, row).
pub type Cell = (usize, usize);

/// Eight neighbour moves with their unit costs.
pub const MOVES: [(isize, isize, f64); 8] = [
    (1, 0, 1.0),
    (-1, 0, 1.0),
    (0, 1, 1.0),
    (0, -1, 1.0),
    (1, 1, SQRT_2),
    (1, -1, SQRT_2),
    (-1, 1, SQRT_2),
    (-1, -1, SQRT_2),
];

/// Boolean occupancy grid covering the lake bounds. A cell is blocked when
/// its center fails the clearance check.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    origin: Point2,
    resolution: f64,
    cols: usize,
    rows: usize,
    blocked: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<Cell>,
    /// Path cost in meters.
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    f: f64,
    h: f64,
    index: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // reversed so the max-heap pops the lowest f, then lowest h, then lowest
    // row-major index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl OccupancyGrid {
    pub fn build(world: &WorldState, resolution: f64, clearance: f64) -> Self {
        assert!(resolution > 0.0, "grid resolution must be positive");
        let b = world.bounds;
        let cols = ((b.width() / resolution).ceil() as usize).max(1);
        let rows = ((b.height() / resolution).ceil() as usize).max(1);
        let origin = Point2::new(b.min_x, b.min_y);
        let mut grid = Self {
            origin,
            resolution,
            cols,
            rows,
            blocked: vec![false; cols * rows],
        };
        for row in 0..rows {
            for col in 0..cols {
                let center = grid.center((col, row));
                grid.blocked[row * cols + col] = !is_collision_free(center, world, clearance);
            }
        }
        grid
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_blocked(&self, cell: Cell) -> bool {
        self.blocked[self.index(cell)]
    }

    pub fn set_blocked(&mut self, cell: Cell, blocked: bool) {
        let i = self.index(cell);
        self.blocked[i] = blocked;
    }

    fn index(&self, (col, row): Cell) -> usize {
        row * self.cols + col
    }

    pub fn center(&self, (col, row): Cell) -> Point2 {
        Point2::new(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell containing `p`, clamped to the grid.
    pub fn cell_of(&self, p: Point2) -> Cell {
        let col = ((p.x - self.origin.x) / self.resolution).floor().max(0.0) as usize;
        let row = ((p.y - self.origin.y) / self.resolution).floor().max(0.0) as usize;
        (col.min(self.cols - 1), row.min(self.rows - 1))
    }

    /// Neighbours of `cell` reachable in one move. Diagonal moves may not cut
    /// the corner of a blocked cell.
    pub fn neighbors(&self, cell: Cell) -> impl Iterator<Item = (Cell, f64)> + '_ {
        MOVES.iter().filter_map(move |&(dc, dr, unit)| {
            let col = cell.0 as isize + dc;
            let row = cell.1 as isize + dr;
            if col < 0 || row < 0 || col >= self.cols as isize || row >= self.rows as isize {
                return None;
            }
            let next = (col as usize, row as usize);
            if self.is_blocked(next) {
                return None;
            }
            if dc != 0 && dr != 0 {
                let side_a = (col as usize, cell.1);
                let side_b = (cell.0, row as usize);
                if self.is_blocked(side_a) || self.is_blocked(side_b) {
                    return None;
                }
            }
            Some((next, unit * self.resolution))
        })
    }

    fn octile(&self, a: Cell, b: Cell) -> f64 {
        let dx = a.0.abs_diff(b.0) as f64;
        let dy = a.1.abs_diff(b.1) as f64;
        let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
        ((hi - lo) + SQRT_2 * lo) * self.resolution
    }

    /// A* search with the octile heuristic.
    pub fn astar(&self, start: Cell, goal: Cell) -> Option<GridPath> {
        let n = self.cols * self.rows;
        let start_i = self.index(start);
        let goal_i = self.index(goal);
        let mut g = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut closed = vec![false; n];
        let mut heap = BinaryHeap::new();

        g[start_i] = 0.0;
        let h0 = self.octile(start, goal);
        heap.push(Frontier {
            f: h0,
            h: h0,
            index: start_i,
        });

        while let Some(Frontier { index, .. }) = heap.pop() {
            if closed[index] {
                continue;
            }
            closed[index] = true;
            if index == goal_i {
                break;
            }
            let cell = (index % self.cols, index / self.cols);
            for (next, cost) in self.neighbors(cell) {
                let ni = self.index(next);
                if closed[ni] {
                    continue;
                }
                let tentative = g[index] + cost;
                if tentative < g[ni] {
                    g[ni] = tentative;
                    parent[ni] = index;
                    let h = self.octile(next, goal);
                    heap.push(Frontier {
                        f: tentative + h,
                        h,
                        index: ni,
                    });
                }
            }
        }

        if !g[goal_i].is_finite() {
            return None;
        }
        let mut cells = vec![goal];
        let mut cur = goal_i;
        while cur != start_i {
            cur = parent[cur];
            cells.push((cur % self.cols, cur / self.cols));
        }
        cells.reverse();
        Some(GridPath {
            cells,
            cost: g[goal_i],
        })
    }
}

/// True iff every sample from `a` to `b`, spaced at most `spacing` apart, is
/// collision-free at `clearance`.
pub fn segment_is_free(
    a: Point2,
    b: Point2,
    world: &WorldState,
    clearance: f64,
    spacing: f64,
) -> bool {
    let len = distance(a, b);
    let samples = ((len / spacing).ceil() as usize).max(1);
    (0..=samples).all(|k| is_collision_free(a.lerp(b, k as f64 / samples as f64), world, clearance))
}

/// Greedy shortcut smoothing: from each kept waypoint jump to the farthest
/// later waypoint with a free straight segment.
pub fn smooth(points: &[Point2], world: &WorldState, clearance: f64, spacing: f64) -> Vec<Point2> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let mut out = vec![points[0]];
    let mut i = 0;
    while i < points.len() - 1 {
        let mut next = i + 1;
        for j in (i + 2..points.len()).rev() {
            if segment_is_free(points[i], points[j], world, clearance, spacing) {
                next = j;
                break;
            }
        }
        out.push(points[next]);
        i = next;
    }
    out
}

/// Unsmoothed grid route: start, interior cell centers, goal, with repeated
/// points dropped.
pub fn raw_route(
    start: Point2,
    goal: Point2,
    world: &WorldState,
    resolution: f64,
    clearance: f64,
) -> Result<Vec<Point2>, PlanPathError> {
    if !is_collision_free(start, world, clearance) {
        return Err(PlanPathError::StartBlocked(start));
    }
    if !is_collision_free(goal, world, clearance) {
        return Err(PlanPathError::GoalBlocked(goal));
    }
    if start == goal {
        return Ok(vec![start]);
    }
    let grid = OccupancyGrid::build(world, resolution, clearance);
    let start_cell = grid.cell_of(start);
    let goal_cell = grid.cell_of(goal);
    let mut grid = grid;
    // endpoint cells stay traversable even when their centers are not free
    grid.set_blocked(start_cell, false);
    grid.set_blocked(goal_cell, false);
    let found = grid
        .astar(start_cell, goal_cell)
        .ok_or(PlanPathError::NoPathFound { start, goal })?;

    let mut points = vec![start];
    let interior = found.cells.len().saturating_sub(1);
    for &cell in found.cells.iter().take(interior).skip(1) {
        points.push(grid.center(cell));
    }
    points.push(goal);
    points.dedup();
    Ok(points)
}

/// Collision-free route from `start` to `goal`: A* on the occupancy grid
/// followed by shortcut smoothing. The first waypoint is `start`, the last is
/// `goal`.
pub fn plan_path(
    start: Point2,
    goal: Point2,
    world: &WorldState,
    resolution: f64,
    clearance: f64,
) -> Result<Path, PlanPathError> {
    let raw = raw_route(start, goal, world, resolution, clearance)?;
    let smoothed = smooth(&raw, world, clearance, resolution / 2.0);
    Ok(Path::from_waypoints(smoothed))
}
