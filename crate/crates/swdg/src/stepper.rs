//! Second-order strong-stability-preserving Runge-Kutta time integration
//! (Heun's method) with per-stage limiting:
//!
//! ```text
//! U¹    = Uⁿ + Δt L(Uⁿ, tⁿ)            then limit U¹
//! Uⁿ⁺¹  = ½ Uⁿ + ½ (U¹ + Δt L(U¹, tⁿ+Δt))   then limit Uⁿ⁺¹
//! ```
//!
//! Wet/dry classification is refreshed before each stage so the
//! gravity-suppression flags track the stage state, and stage two evaluates
//! time-dependent boundary data at tⁿ + Δt.
//!
//! The Courant number of a candidate step is `Δt · max_c max_j (|u_j| +
//! sqrt(g h_j)) / ρ_c`, with ρ_c the cell's limiting radius from the mesh;
//! `adaptive_dt` inverts that relation for a target number.

use crate::error::SolverError;
use crate::flux::velocity;
use crate::limiter::{apply_limiter, LimiterConfig};
use crate::mesh::Mesh;
use crate::rhs::{compute_rhs, BcContext, DgForm};
use crate::state::{CellField, ScalarField};
use crate::wetdry::classify_cells;

/// Fixed step size or a Courant-number target for adaptive stepping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    FixedDt(f64),
    Courant(f64),
}

/// Everything a step needs besides the state itself.
#[derive(Clone, Copy, Debug)]
pub struct StepperConfig {
    pub form: DgForm,
    /// `None` disables limiting entirely (diagnostic runs on smooth data).
    pub limiter: Option<LimiterConfig>,
    pub g: f64,
    pub tol_wet: f64,
}

/// Aggregated limiter activity over the two stages of one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepStats {
    /// Cells with a depth-limiting factor below one, summed over stages.
    pub limited_cells: usize,
    pub positivity_adjusted: usize,
    pub momentum_mean_fallback: usize,
    pub momentum_zeroed: usize,
    /// Smallest nodal depth seen right after each stage update (post-limit
    /// when a limiter is configured); the positivity guarantee is exactly
    /// `min_stage_depth >= 0`, not just nonnegativity of the accepted state.
    pub min_stage_depth: f64,
}

impl Default for StepStats {
    fn default() -> Self {
        StepStats {
            limited_cells: 0,
            positivity_adjusted: 0,
            momentum_mean_fallback: 0,
            momentum_zeroed: 0,
            min_stage_depth: f64::INFINITY,
        }
    }
}

impl StepStats {
    fn absorb(&mut self, stats: &crate::limiter::LimiterStats) {
        self.limited_cells += stats.alpha.iter().filter(|&&a| a < 1.0).count();
        self.positivity_adjusted += stats.positivity_adjusted;
        self.momentum_mean_fallback += stats.momentum_mean_fallback;
        self.momentum_zeroed += stats.momentum_zeroed;
    }
}

/// Heun stepper with reusable scratch storage.
#[derive(Clone, Debug)]
pub struct HeunStepper {
    pub config: StepperConfig,
    rhs: CellField,
    stage: CellField,
}

impl HeunStepper {
    pub fn new(config: StepperConfig, num_cells: usize) -> Self {
        HeunStepper {
            config,
            rhs: CellField::zeros(num_cells),
            stage: CellField::zeros(num_cells),
        }
    }

    /// Advances `field` from `t` to `t + dt` in place.
    pub fn step(
        &mut self,
        field: &mut CellField,
        bathy: &ScalarField,
        mesh: &Mesh,
        dt: f64,
        t: f64,
        bc: &BcContext,
    ) -> Result<StepStats, SolverError> {
        let cfg = self.config;
        let n = mesh.num_cells();
        let mut stats = StepStats::default();

        // Stage 1: forward Euler predictor.
        let flags = classify_cells(field, bathy, cfg.tol_wet)?;
        compute_rhs(
            field, bathy, mesh, &flags, cfg.form, cfg.g, cfg.tol_wet, t, bc, &mut self.rhs,
        )?;
        self.stage.cells.resize(n, Default::default());
        for c in 0..n {
            let (u, r) = (&field.cells[c], &self.rhs.cells[c]);
            let s = &mut self.stage.cells[c];
            for j in 0..3 {
                s.h[j] = u.h[j] + dt * r.h[j];
                s.hu[j] = u.hu[j] + dt * r.hu[j];
                s.hv[j] = u.hv[j] + dt * r.hv[j];
            }
        }
        if let Some(lim) = cfg.limiter {
            stats.absorb(&apply_limiter(&mut self.stage, bathy, mesh, lim, cfg.tol_wet, t + dt)?);
        }
        stats.min_stage_depth = stats.min_stage_depth.min(self.stage.min_nodal_h());

        // Stage 2: trapezoidal corrector, boundary data at t + dt.
        let flags = classify_cells(&self.stage, bathy, cfg.tol_wet)?;
        compute_rhs(
            &self.stage, bathy, mesh, &flags, cfg.form, cfg.g, cfg.tol_wet, t + dt, bc,
            &mut self.rhs,
        )?;
        for c in 0..n {
            let (s, r) = (&self.stage.cells[c], &self.rhs.cells[c]);
            let u = &mut field.cells[c];
            for j in 0..3 {
                u.h[j] = 0.5 * u.h[j] + 0.5 * (s.h[j] + dt * r.h[j]);
                u.hu[j] = 0.5 * u.hu[j] + 0.5 * (s.hu[j] + dt * r.hu[j]);
                u.hv[j] = 0.5 * u.hv[j] + 0.5 * (s.hv[j] + dt * r.hv[j]);
            }
        }
        if let Some(lim) = cfg.limiter {
            stats.absorb(&apply_limiter(field, bathy, mesh, lim, cfg.tol_wet, t + dt)?);
        }
        stats.min_stage_depth = stats.min_stage_depth.min(field.min_nodal_h());
        Ok(stats)
    }
}

/// max over cells and nodes of (|u| + sqrt(g h)) / ρ_cell; zero for a field
/// at rest with no depth anywhere.
pub fn max_signal_over_radius(field: &CellField, mesh: &Mesh, g: f64, tol_wet: f64) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..mesh.num_cells() {
        let cell = &field.cells[c];
        let inv_r = 1.0 / mesh.cfl_radius(c);
        for j in 0..3 {
            let s = cell.node(j);
            let (vx, vy) = velocity(&s, tol_wet);
            let speed = vx.hypot(vy) + (g * s.h.max(0.0)).sqrt();
            worst = worst.max(speed * inv_r);
        }
    }
    worst
}

/// Courant number of stepping the given field by `dt`.
pub fn courant_number(field: &CellField, mesh: &Mesh, g: f64, tol_wet: f64, dt: f64) -> f64 {
    dt * max_signal_over_radius(field, mesh, g, tol_wet)
}

/// Largest step with Courant number `target`; infinite when no cell carries
/// any signal (completely dry or empty field).
pub fn adaptive_dt(field: &CellField, mesh: &Mesh, g: f64, tol_wet: f64, target: f64) -> f64 {
    let r = max_signal_over_radius(field, mesh, g, tol_wet);
    if r > 0.0 {
        target / r
    } else {
        f64::INFINITY
    }
}
