//! Integral diagnostics over a nodal field: conserved totals, error norms
//! against a reference field, and convergence-rate estimates.
//!
//! All integrals use the midpoint volume rule, which is exact for the
//! quadratic integrands that arise from squaring or pairing linear nodal
//! data, so the reported L² norms are the exact norms of the P1 fields.

use crate::quadrature::{volume_value, VOLUME_WEIGHT};
use crate::mesh::Mesh;
use crate::state::{CellField, ScalarField};

/// Total water volume ∫ h dx.
pub fn total_mass(field: &CellField, mesh: &Mesh) -> f64 {
    let mut total = 0.0;
    for c in 0..mesh.num_cells() {
        total += mesh.area(c) * field.cells[c].mean().h;
    }
    total
}

/// Total energy ∫ ½ h (u² + v²) + g h (½ h + b) dx.
///
/// Velocities follow the dry-cutoff convention: below `tol_wet` the kinetic
/// term is dropped along with the momentum it would amplify.
pub fn total_energy(
    field: &CellField,
    bathy: &ScalarField,
    mesh: &Mesh,
    g: f64,
    tol_wet: f64,
) -> f64 {
    let mut total = 0.0;
    for c in 0..mesh.num_cells() {
        let cell = &field.cells[c];
        let w = mesh.area(c) * VOLUME_WEIGHT;
        for q in 0..3 {
            let h = volume_value(&cell.h, q);
            let hu = volume_value(&cell.hu, q);
            let hv = volume_value(&cell.hv, q);
            let b = volume_value(&bathy.cells[c], q);
            let kinetic = if h >= tol_wet {
                0.5 * (hu * hu + hv * hv) / h
            } else {
                0.0
            };
            total += w * (kinetic + g * h * (0.5 * h + b));
        }
    }
    total
}

/// Discrepancy between two nodal fields in the maximum and L² norms, with
/// the momentum components measured jointly as a vector.
#[derive(Clone, Copy, Debug, Default)]
pub struct ErrorNorms {
    pub linf_h: f64,
    pub l2_h: f64,
    pub linf_m: f64,
    pub l2_m: f64,
}

pub fn error_norms(field: &CellField, reference: &CellField, mesh: &Mesh) -> ErrorNorms {
    assert_eq!(field.num_cells(), reference.num_cells());
    assert_eq!(field.num_cells(), mesh.num_cells());
    let mut norms = ErrorNorms::default();
    let mut sum_h = 0.0;
    let mut sum_m = 0.0;
    for c in 0..mesh.num_cells() {
        let mut dh = [0.0; 3];
        let mut dhu = [0.0; 3];
        let mut dhv = [0.0; 3];
        for i in 0..3 {
            dh[i] = field.cells[c].h[i] - reference.cells[c].h[i];
            dhu[i] = field.cells[c].hu[i] - reference.cells[c].hu[i];
            dhv[i] = field.cells[c].hv[i] - reference.cells[c].hv[i];
            norms.linf_h = norms.linf_h.max(dh[i].abs());
            norms.linf_m = norms.linf_m.max(dhu[i].hypot(dhv[i]));
        }
        let w = mesh.area(c) * VOLUME_WEIGHT;
        for q in 0..3 {
            let eh = volume_value(&dh, q);
            let eu = volume_value(&dhu, q);
            let ev = volume_value(&dhv, q);
            sum_h += w * eh * eh;
            sum_m += w * (eu * eu + ev * ev);
        }
    }
    norms.l2_h = sum_h.sqrt();
    norms.l2_m = sum_m.sqrt();
    norms
}

/// Observed convergence orders for a refinement sequence.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// Rate between each consecutive mesh pair.
    pub pairwise: Vec<f64>,
    /// Least-squares slope of log error against log spacing.
    pub fitted: f64,
}

/// Fits convergence rates to matched spacings and errors (finest last or
/// first, any order with strictly varying dx). A zero error makes the rate
/// undefined and is reported as NaN.
pub fn convergence_rates(dx: &[f64], err: &[f64]) -> ConvergenceReport {
    assert_eq!(dx.len(), err.len());
    assert!(dx.len() >= 2, "need at least two resolutions");
    let pairwise = dx
        .windows(2)
        .zip(err.windows(2))
        .map(|(d, e)| (e[0] / e[1]).ln() / (d[0] / d[1]).ln())
        .collect();
    // Least squares on (ln dx, ln err).
    let n = dx.len() as f64;
    let lx: Vec<f64> = dx.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    ConvergenceReport { pairwise, fitted: num / den }
}
