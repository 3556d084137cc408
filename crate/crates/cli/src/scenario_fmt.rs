//! Plain-text scenario maps.
//!
//! Format: one header line `width height`, then `height` lines of `width`
//! characters each — `.` free, `#` wall, `E` exit. Row 0 is the first map
//! line (y grows downwards). Load and save round-trip bit-exactly.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use stepfield_core::floorfield::{Cell, Scenario};

/// Parses a scenario from map text.
pub fn parse(text: &str) -> Result<Scenario> {
    let mut lines = text.lines();
    let header = lines.next().context("missing header line")?;
    let mut parts = header.split_whitespace();
    let width: u32 = parts
        .next()
        .context("header needs `width height`")?
        .parse()
        .context("bad width")?;
    let height: u32 = parts
        .next()
        .context("header needs `width height`")?
        .parse()
        .context("bad height")?;
    if parts.next().is_some() {
        bail!("header must be exactly `width height`");
    }
    let mut walls = Vec::new();
    let mut exits = Vec::new();
    for y in 0..height {
        let row = lines
            .next()
            .with_context(|| format!("missing map row {y}"))?;
        let chars: Vec<char> = row.chars().collect();
        if chars.len() != width as usize {
            bail!("row {y} has {} cells, expected {width}", chars.len());
        }
        for (x, ch) in chars.iter().enumerate() {
            let c = Cell::new(x as i32, y as i32);
            match ch {
                '.' => {}
                '#' => walls.push(c),
                'E' => exits.push(c),
                other => bail!("row {y}: unknown cell character {other:?}"),
            }
        }
    }
    if let Some(extra) = lines.next() {
        if !extra.trim().is_empty() {
            bail!("trailing content after map rows: {extra:?}");
        }
    }
    Ok(Scenario::new(width, height, &walls, &exits)?)
}

/// Renders a scenario back to map text (inverse of [`parse`]).
pub fn render(scenario: &Scenario) -> String {
    let mut out = format!("{} {}\n", scenario.width(), scenario.height());
    for y in 0..scenario.height() as i32 {
        for x in 0..scenario.width() as i32 {
            let c = Cell::new(x, y);
            out.push(if scenario.is_exit(c) {
                'E'
            } else if scenario.is_wall(c) {
                '#'
            } else {
                '.'
            });
        }
        out.push('\n');
    }
    out
}

/// Loads a scenario from a map file.
pub fn load(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Saves a scenario to a map file.
pub fn save(path: &Path, scenario: &Scenario) -> Result<()> {
    fs::write(path, render(scenario)).with_context(|| format!("writing {}", path.display()))
}
