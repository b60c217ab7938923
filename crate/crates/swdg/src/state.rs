//! Nodal storage for piecewise linear (P1) fields of the conserved variables.
//!
//! Every cell carries its own three nodal values per variable, collocated at
//! the cell vertices. Values at a shared vertex may differ between the two
//! incident cells; that discontinuity is the point of the DG representation.

use std::ops::{Add, Mul, Sub};

/// Conserved state at one point: depth h and momentum (hu, hv).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct State {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
}

impl State {
    pub const ZERO: State = State { h: 0.0, hu: 0.0, hv: 0.0 };

    pub const fn new(h: f64, hu: f64, hv: f64) -> Self {
        State { h, hu, hv }
    }
}

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State::new(self.h + o.h, self.hu + o.hu, self.hv + o.hv)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.h - o.h, self.hu - o.hu, self.hv - o.hv)
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, s: f64) -> State {
        State::new(self.h * s, self.hu * s, self.hv * s)
    }
}

/// The three nodal states of one cell, stored per variable.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CellNodal {
    pub h: [f64; 3],
    pub hu: [f64; 3],
    pub hv: [f64; 3],
}

impl CellNodal {
    pub fn node(&self, i: usize) -> State {
        State::new(self.h[i], self.hu[i], self.hv[i])
    }

    pub fn set_node(&mut self, i: usize, s: State) {
        self.h[i] = s.h;
        self.hu[i] = s.hu;
        self.hv[i] = s.hv;
    }

    /// Cell mean; exact for P1 since the mass-weighted average of the basis
    /// functions is uniform.
    pub fn mean(&self) -> State {
        State::new(
            (self.h[0] + self.h[1] + self.h[2]) / 3.0,
            (self.hu[0] + self.hu[1] + self.hu[2]) / 3.0,
            (self.hv[0] + self.hv[1] + self.hv[2]) / 3.0,
        )
    }
}

/// A full discrete field: one `CellNodal` per cell.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellField {
    pub cells: Vec<CellNodal>,
}

impl CellField {
    pub fn zeros(num_cells: usize) -> Self {
        CellField { cells: vec![CellNodal::default(); num_cells] }
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn min_nodal_h(&self) -> f64 {
        self.cells
            .iter()
            .flat_map(|c| c.h.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A scalar P1 field stored like `CellField`: three nodal values per cell.
/// Used for bathymetry, which is continuous but kept in cell-local layout
/// so assembly never chases vertex indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarField {
    pub cells: Vec<[f64; 3]>,
}

impl ScalarField {
    pub fn zeros(num_cells: usize) -> Self {
        ScalarField { cells: vec![[0.0; 3]; num_cells] }
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn mean(&self, c: usize) -> f64 {
        let v = &self.cells[c];
        (v[0] + v[1] + v[2]) / 3.0
    }
}
