//! Mask file format: a self-describing JSON document with the geometry, the
//! state set, the row-major state grid, and a human-readable ASCII preview.

use std::path::Path;

use ris_core::{Complex64, RisGeometry, StateMask, StateSet};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDoc {
    pub q_x: usize,
    pub q_y: usize,
    pub d_x_m: f64,
    pub d_y_m: f64,
    pub wavelength_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub amplitude: f64,
    pub phase_deg: f64,
}

/// On-disk mask document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskDoc {
    pub geometry: GeometryDoc,
    pub states: Vec<StateDoc>,
    /// One row per n_y, each row listing state indices by n_x.
    pub grid: Vec<Vec<usize>>,
    /// '.' = state 0, '#' = state 1, digits for larger sets.
    pub preview: Vec<String>,
}

fn preview_char(k: usize, n_states: usize) -> char {
    if n_states == 2 {
        if k == 0 {
            '.'
        } else {
            '#'
        }
    } else {
        char::from_digit((k % 36) as u32, 36).unwrap_or('?')
    }
}

/// Builds the JSON document for a mask.
pub fn mask_doc(mask: &StateMask, set: &StateSet) -> MaskDoc {
    let geo = mask.geometry();
    let states = set
        .coefficients()
        .iter()
        .map(|c| StateDoc { amplitude: c.norm(), phase_deg: c.arg().to_degrees() })
        .collect();
    let mut grid = Vec::with_capacity(geo.q_y());
    let mut preview = Vec::with_capacity(geo.q_y());
    for n_y in 0..geo.q_y() {
        let row: Vec<usize> = (0..geo.q_x()).map(|n_x| mask.get(n_x, n_y)).collect();
        preview.push(row.iter().map(|&k| preview_char(k, set.len())).collect());
        grid.push(row);
    }
    MaskDoc {
        geometry: GeometryDoc {
            q_x: geo.q_x(),
            q_y: geo.q_y(),
            d_x_m: geo.d_x(),
            d_y_m: geo.d_y(),
            wavelength_m: geo.wavelength(),
        },
        states,
        grid,
        preview,
    }
}

/// Writes a mask document as pretty-printed JSON.
pub fn write_mask(path: &Path, mask: &StateMask, set: &StateSet) -> Result<()> {
    let doc = mask_doc(mask, set);
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Spec(format!("mask serialization failed: {e}")))?;
    std::fs::write(path, text + "\n").map_err(CliError::io(path))
}

/// Reads a mask document back into core types.
pub fn read_mask(path: &Path) -> Result<(StateMask, StateSet)> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let doc: MaskDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
    let g = &doc.geometry;
    let geometry = RisGeometry::new(g.q_x, g.q_y, g.d_x_m, g.d_y_m, g.wavelength_m)?;
    let set = StateSet::new(
        doc.states
            .iter()
            .map(|s| Complex64::from_polar(s.amplitude, s.phase_deg.to_radians()))
            .collect(),
    )?;
    if doc.grid.len() != g.q_y {
        return Err(CliError::Spec(format!(
            "{}: grid has {} rows, geometry expects {}",
            path.display(),
            doc.grid.len(),
            g.q_y
        )));
    }
    let mut states = Vec::with_capacity(g.q_x * g.q_y);
    for (n_y, row) in doc.grid.iter().enumerate() {
        if row.len() != g.q_x {
            return Err(CliError::Spec(format!(
                "{}: grid row {n_y} has {} columns, geometry expects {}",
                path.display(),
                row.len(),
                g.q_x
            )));
        }
        states.extend_from_slice(row);
    }
    let mask = StateMask::new(geometry, states, &set)?;
    Ok((mask, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ris_core::{
        ideal_continuous_mask, quantize_mask, two_state_set, Direction, Scenario,
    };
    use std::f64::consts::PI;

    fn sample_mask() -> (StateMask, StateSet) {
        let lam = 299_792_458.0 / 28e9;
        let geo = RisGeometry::new(5, 4, lam / 2.0, lam / 2.0, lam).unwrap();
        let scenario = Scenario::new(
            geo,
            Direction::from_degrees(0.0, 0.0).unwrap(),
            Direction::from_degrees(60.0, 0.0).unwrap(),
        );
        let set = two_state_set(0.0, PI, None).unwrap();
        (quantize_mask(&ideal_continuous_mask(&scenario), &set), set)
    }

    #[test]
    fn preview_uses_hash_and_dot_for_two_states() {
        let (mask, set) = sample_mask();
        let doc = mask_doc(&mask, &set);
        assert_eq!(doc.preview.len(), 4);
        for (n_y, row) in doc.preview.iter().enumerate() {
            assert_eq!(row.len(), 5);
            for (n_x, ch) in row.chars().enumerate() {
                let expect = if mask.get(n_x, n_y) == 0 { '.' } else { '#' };
                assert_eq!(ch, expect);
            }
        }
    }

    #[test]
    fn grid_rows_follow_n_y() {
        let (mask, set) = sample_mask();
        let doc = mask_doc(&mask, &set);
        assert_eq!(doc.grid[2][3], mask.get(3, 2));
    }

    #[test]
    fn round_trip_preserves_mask_and_states() {
        let (mask, set) = sample_mask();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.json");
        write_mask(&path, &mask, &set).unwrap();
        let (back_mask, back_set) = read_mask(&path).unwrap();
        assert_eq!(back_mask.states(), mask.states());
        assert_eq!(back_set.len(), set.len());
        for k in 0..set.len() {
            assert!((back_set.coefficient(k) - set.coefficient(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let (mask, set) = sample_mask();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.json");
        let mut doc = mask_doc(&mask, &set);
        doc.grid.pop();
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let err = read_mask(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
