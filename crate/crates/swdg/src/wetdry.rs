//! Wet/dry classification of cells and the thin-layer velocity convention.
//!
//! A node is dry when its depth falls below the wet tolerance. A cell with
//! at least one dry node is semi-dry; it straddles the wet/dry interface.
//! Semi-dry cells where the highest point of the free surface does not rise
//! above the highest point of the bottom, i.e.
//!
//! ```text
//! max_i H_i - max_i b_i < TOL_wet,     H_i = h_i + b_i,
//! ```
//!
//! hold water only in a depression of the bottom: the surface gradient there
//! is an artifact of the linear representation, not a physical forcing.
//! Such cells (and fully dry cells, where the criterion holds trivially)
//! have the gravity source and pressure gradient switched off so puddles at
//! rest stay at rest.

use crate::error::SolverError;
use crate::state::{CellField, ScalarField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    Wet,
    SemiDryPhysical,
    SemiDryGravityOff,
    Dry,
}

/// Per-cell classes and per-node dry masks for one stage state.
#[derive(Clone, Debug)]
pub struct WetDryFlags {
    pub class: Vec<CellClass>,
    pub dry_node: Vec<[bool; 3]>,
}

impl WetDryFlags {
    /// True when the cell's gravity terms (bottom source and depth-gradient
    /// pressure) are suppressed: artificially sloped semi-dry cells and
    /// fully dry cells.
    #[inline]
    pub fn gravity_off(&self, c: usize) -> bool {
        matches!(self.class[c], CellClass::SemiDryGravityOff | CellClass::Dry)
    }

    pub fn count_gravity_off(&self) -> usize {
        (0..self.class.len()).filter(|&c| self.gravity_off(c)).count()
    }
}

/// Nodal velocity with the thin-layer cutoff: m/h when h is at least the
/// tolerance (boundary inclusive), zero otherwise.
#[inline]
pub fn nodal_velocity(h: f64, m: f64, tol_wet: f64) -> f64 {
    if h >= tol_wet {
        m / h
    } else {
        0.0
    }
}

/// Classifies every cell. Nodal maxima are exact extrema for P1 data.
pub fn classify_cells(
    field: &CellField,
    bathy: &ScalarField,
    tol_wet: f64,
) -> Result<WetDryFlags, SolverError> {
    if !(tol_wet > 0.0) {
        return Err(SolverError::InvalidTolerance(tol_wet));
    }
    let n = field.num_cells();
    let mut class = Vec::with_capacity(n);
    let mut dry_node = Vec::with_capacity(n);
    for c in 0..n {
        let h = &field.cells[c].h;
        let b = &bathy.cells[c];
        let dry = [h[0] < tol_wet, h[1] < tol_wet, h[2] < tol_wet];
        let num_dry = dry.iter().filter(|&&d| d).count();
        let cl = if num_dry == 0 {
            CellClass::Wet
        } else if num_dry == 3 {
            CellClass::Dry
        } else {
            let max_surface = (h[0] + b[0]).max(h[1] + b[1]).max(h[2] + b[2]);
            let max_bottom = b[0].max(b[1]).max(b[2]);
            if max_surface - max_bottom < tol_wet {
                CellClass::SemiDryGravityOff
            } else {
                CellClass::SemiDryPhysical
            }
        };
        class.push(cl);
        dry_node.push(dry);
    }
    Ok(WetDryFlags { class, dry_node })
}
