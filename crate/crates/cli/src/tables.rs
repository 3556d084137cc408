//! CSV/JSON emitters for the kinematics tables.
//!
//! Rounding follows the published precision: average speeds to 2 decimals,
//! relative deviations to 3. Output is byte-stable for a fixed input.

use anyhow::Result;
use serde::Serialize;
use stepfield_core::kinematics::{
    report_all, select_neighborhood, speed_map, BorderMode, SelectionMode, SpeedProfile,
};

/// Serializable row of the results table.
#[derive(Debug, Serialize)]
pub struct ResultsRow {
    pub d2: u64,
    pub v_av: f64,
    pub dev_rel: f64,
    pub dev_abs: f64,
    pub n_vn: Option<u32>,
    pub n_moore: Option<u32>,
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

/// Builds the results-table rows for all enumerated neighborhoods.
pub fn results_rows(v_max: u32, mode: BorderMode) -> Vec<ResultsRow> {
    report_all(v_max, mode)
        .into_iter()
        .map(|r| ResultsRow {
            d2: r.d2,
            v_av: round_to(r.v_av, 2),
            dev_rel: round_to(r.dev_rel, 3),
            dev_abs: round_to(r.dev_abs, 6),
            n_vn: r.composable.map(|(n, _)| n),
            n_moore: r.composable.map(|(_, m)| m),
        })
        .collect()
}

/// Results table as CSV.
pub fn results_csv(v_max: u32, mode: BorderMode) -> String {
    let mut out = String::from("d2,v_av,dev_rel,dev_abs,n_vn,n_moore\n");
    for r in results_rows(v_max, mode) {
        let (vn, moore) = match (r.n_vn, r.n_moore) {
            (Some(n), Some(m)) => (n.to_string(), m.to_string()),
            _ => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{:.2},{:.3},{:.6},{},{}\n",
            r.d2, r.v_av, r.dev_rel, r.dev_abs, vn, moore
        ));
    }
    out
}

/// Results table as pretty JSON.
pub fn results_json(v_max: u32, mode: BorderMode) -> Result<String> {
    Ok(serde_json::to_string_pretty(&results_rows(v_max, mode))?)
}

/// Selection table (canonical and scoring picks per speed) as CSV.
pub fn selection_csv() -> String {
    let mut out = String::from("v,canonical_d2,scoring_d2\n");
    for v in 1..=10u32 {
        let canonical = select_neighborhood(v, SelectionMode::Canonical).expect("v in range");
        let scoring = select_neighborhood(v, SelectionMode::Scoring).expect("v in range");
        out.push_str(&format!("{v},{canonical},{scoring}\n"));
    }
    out
}

/// Quarter-plane speed map as CSV. Rows are printed from `y = v_max` down to
/// `y = 0` (the orientation of the published table); unreachable cells are
/// left empty.
pub fn speed_map_csv(v_max: u32) -> Result<String> {
    let grid = speed_map(v_max)?;
    let mut out = String::new();
    for row in grid.iter().rev() {
        let line: Vec<String> = row
            .iter()
            .map(|c| c.map(|v| v.to_string()).unwrap_or_default())
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Speed map as JSON (`null` marks unreachable cells), row `y = 0` first.
pub fn speed_map_json(v_max: u32) -> Result<String> {
    Ok(serde_json::to_string_pretty(&speed_map(v_max)?)?)
}

/// Samples `v(φ)` of one neighborhood for plotting: `samples` evenly spaced
/// angles over `[0, π/2]`, CSV columns `phi_rad,phi_deg,v`.
pub fn profile_csv(d2: u64, samples: u32, mode: BorderMode) -> Result<String> {
    let profile = match mode {
        BorderMode::Staircase => SpeedProfile::staircase(d2),
        BorderMode::Hull => SpeedProfile::hull(d2),
    }?;
    let n = samples.max(2);
    let mut out = String::from("phi_rad,phi_deg,v\n");
    for i in 0..n {
        let phi = std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64;
        out.push_str(&format!(
            "{:.8},{:.4},{:.8}\n",
            phi,
            phi.to_degrees(),
            profile.v_of_phi(phi)
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_fifty_rows_and_is_stable() {
        let csv = results_csv(10, BorderMode::Staircase);
        assert_eq!(csv.lines().count(), 51);
        assert_eq!(csv, results_csv(10, BorderMode::Staircase));
        assert!(csv.lines().nth(1).unwrap().starts_with("1,0.79,0.105"));
        // 18 is not Moore/von-Neumann composable: empty split columns.
        let row18 = csv.lines().find(|l| l.starts_with("18,")).unwrap();
        assert!(row18.ends_with(",,"));
    }

    #[test]
    fn selection_table() {
        let csv = selection_csv();
        assert!(csv.contains("7,53,53\n"));
        assert!(csv.contains("10,109,106\n"));
    }

    #[test]
    fn speed_map_matches_published_corners() {
        let csv = speed_map_csv(10).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[10], "0,1,2,3,4,5,6,7,8,9,10"); // y = 0 row printed last
        assert_eq!(rows[0], "10,10,10,10,,,,,,,"); // y = 10 row printed first
    }

    #[test]
    fn profile_samples_cover_the_quadrant() {
        let csv = profile_csv(5, 5, BorderMode::Staircase).unwrap();
        let last = csv.lines().last().unwrap();
        assert!(last.starts_with("1.57079633,90.0000,2.00000000"));
    }
}
