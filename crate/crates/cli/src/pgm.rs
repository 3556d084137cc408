//! ASCII PGM (P2) occupancy snapshots: 0 = occupied, 255 = free, 128 = wall.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use stepfield_core::floorfield::{Cell, Scenario};

/// Gray levels of the occupancy palette.
pub const OCCUPIED: u8 = 0;
/// Free floor.
pub const FREE: u8 = 255;
/// Wall cells.
pub const WALL: u8 = 128;

/// Renders an occupancy snapshot: walls from the scenario, `occupied` cells
/// on top of the free floor.
pub fn render_occupancy(scenario: &Scenario, occupied: &[Cell]) -> String {
    let (w, h) = (scenario.width() as usize, scenario.height() as usize);
    let mut gray = vec![FREE; w * h];
    for y in 0..h {
        for x in 0..w {
            if scenario.is_wall(Cell::new(x as i32, y as i32)) {
                gray[y * w + x] = WALL;
            }
        }
    }
    for c in occupied {
        if scenario.in_bounds(*c) {
            gray[c.y as usize * w + c.x as usize] = OCCUPIED;
        }
    }
    let mut out = format!("P2\n{w} {h}\n255\n");
    for row in gray.chunks(w) {
        let line: Vec<String> = row.iter().map(|g| g.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Writes an occupancy snapshot to `path`.
pub fn write_occupancy(path: &Path, scenario: &Scenario, occupied: &[Cell]) -> Result<()> {
    fs::write(path, render_occupancy(scenario, occupied))
        .with_context(|| format!("writing {}", path.display()))
}
