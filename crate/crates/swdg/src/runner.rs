//! Drives a configured run end to end: mesh construction, initial data,
//! the time loop, and every on-disk artifact (gauges, diagnostics,
//! snapshots, cross-sections, manifest).
//!
//! Runs are deterministic: identical config and mesh give byte-identical
//! output files on one platform. The manifest echoes the fully resolved
//! configuration and is itself a runnable config file; its comment lines
//! carry the completion status, including any solver abort diagnostic.

use crate::config::{fmt_f64, MeshSource, RunConfig};
use crate::diagnostics::{error_norms, total_energy, total_mass};
use crate::error::{ConfigError, MeshError, SolverError};
use crate::limiter::apply_limiter;
use crate::mesh::load_mesh;
use crate::output::{
    extract_cross_section, locate_point, sample_in_cell, write_section_csv,
    write_snapshot_csv, write_snapshot_vtk, DIAG_HEADER, GAUGE_HEADER,
};
use crate::rhs::BcContext;
use crate::scenario::{discretize, exact_field, Scenario};
use crate::state::CellField;
use crate::stepper::{adaptive_dt, courant_number, HeunStepper, StepControl, StepperConfig};
use crate::wetdry::classify_cells;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use thiserror::Error;

/// The adaptive step aborts after shrinking by this factor from its
/// starting value; shrinking that far means spurious velocities have
/// taken over and finishing the run would take practically forever.
const DT_FLOOR_FACTOR: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Summary facts about a finished run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub steps: u64,
    pub t_final: f64,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Largest per-step Courant number observed.
    pub max_courant: f64,
    /// Smallest nodal depth observed after any completed step.
    pub min_depth: f64,
}

/// What the error columns compare against.
enum Reference {
    None,
    /// Steady scenarios: the run should preserve its initial state.
    Initial(CellField),
    /// Closed-form scenarios: the time-dependent exact interpolant.
    Exact,
}

impl Reference {
    fn for_scenario(scenario: Scenario, initial: &CellField) -> Reference {
        match scenario {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => {
                Reference::Initial(initial.clone())
            }
            s if s.has_exact() => Reference::Exact,
            _ => Reference::None,
        }
    }
}

struct DiagWriter {
    out: BufWriter<File>,
}

impl DiagWriter {
    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        t: f64,
        mass: f64,
        energy: f64,
        courant: f64,
        dt: f64,
        min_h: f64,
        gravity_off: usize,
        mass_drift: f64,
        err: Option<(f64, f64, f64)>,
    ) -> std::io::Result<()> {
        let (e1, e2, e3) = match err {
            Some((a, b, c)) => (fmt_f64(a), fmt_f64(b), fmt_f64(c)),
            None => ("nan".into(), "nan".into(), "nan".into()),
        };
        writeln!(
            self.out,
            "{},{},{},{},{},{},{gravity_off},{},{e1},{e2},{e3}",
            fmt_f64(t),
            fmt_f64(mass),
            fmt_f64(energy),
            fmt_f64(courant),
            fmt_f64(dt),
            fmt_f64(min_h),
            fmt_f64(mass_drift),
        )
    }
}

/// Executes a run, writing artifacts into `config.output_dir`.
///
/// On a solver abort the manifest still lands on disk with the diagnostic
/// in its status comment, and the error is returned.
pub fn execute_run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let scenario = config.scenario;
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;

    let mesh = match &config.mesh {
        MeshSource::Levels(l) => scenario.build_mesh(*l)?,
        MeshSource::File(path) => load_mesh(path)?,
    };
    let (bathy, mut field) = discretize(scenario, &mesh);

    // Limit the initial data once so the run starts from an admissible
    // state (the projection of a wet/dry interface can dip negative).
    if let Some(limiter) = config.limiter {
        apply_limiter(&mut field, &bathy, &mesh, limiter, config.tol_wet, 0.0)?;
    }

    let inflow = scenario.inflow();
    let bc = BcContext { inflow: inflow.as_ref() };
    let mut stepper = HeunStepper::new(
        StepperConfig {
            form: config.form,
            limiter: config.limiter,
            g: config.g,
            tol_wet: config.tol_wet,
        },
        mesh.num_cells(),
    );

    // Gauge hosts are looked up once; the mesh never changes.
    let mut gauge_cells = Vec::with_capacity(config.gauges.len());
    for (i, p) in config.gauges.iter().enumerate() {
        let cell = locate_point(&mesh, *p).ok_or_else(|| {
            ConfigError::InvalidValue {
                key: "gauges".into(),
                message: format!("gauge {i} at ({}, {}) is outside the mesh", p.x, p.y),
            }
        })?;
        gauge_cells.push(cell);
    }
    let rest = scenario.rest_level();

    let mut gauges = BufWriter::new(File::create(dir.join("gauges.csv"))?);
    writeln!(gauges, "# rest_level = {}", fmt_f64(rest))?;
    writeln!(gauges, "{GAUGE_HEADER}")?;
    let mut diag = DiagWriter {
        out: BufWriter::new(File::create(dir.join("diagnostics.csv"))?),
    };
    writeln!(diag.out, "{DIAG_HEADER}")?;

    let reference = Reference::for_scenario(scenario, &field);
    let initial_mass = total_mass(&field, &mesh);
    let t_end = config.t_end;

    let write_gauge_rows =
        |gauges: &mut BufWriter<File>, field: &CellField, t: f64| -> std::io::Result<()> {
            for (i, (p, c)) in config.gauges.iter().zip(&gauge_cells).enumerate() {
                let s = sample_in_cell(field, &bathy, &mesh, *c, *p, config.tol_wet);
                writeln!(
                    gauges,
                    "{},{i},{},{},{},{},{},{}",
                    fmt_f64(t),
                    fmt_f64(p.x),
                    fmt_f64(p.y),
                    fmt_f64(s.b + s.h - rest),
                    fmt_f64(s.h),
                    fmt_f64(s.u),
                    fmt_f64(s.v),
                )?;
            }
            Ok(())
        };

    let diag_row = |diag: &mut DiagWriter,
                    field: &CellField,
                    t: f64,
                    dt: f64,
                    courant: f64|
     -> Result<(), RunError> {
        let mass = total_mass(field, &mesh);
        let energy = total_energy(field, &bathy, &mesh, config.g, config.tol_wet);
        let flags = classify_cells(field, &bathy, config.tol_wet)?;
        let err = match &reference {
            Reference::None => None,
            Reference::Initial(init) => {
                let n = error_norms(field, init, &mesh);
                Some((n.linf_h, n.l2_h, n.linf_m))
            }
            Reference::Exact => {
                let exact = exact_field(scenario, &mesh, t).expect("closed-form scenario");
                let n = error_norms(field, &exact, &mesh);
                Some((n.linf_h, n.l2_h, n.linf_m))
            }
        };
        diag.row(
            t,
            mass,
            energy,
            courant,
            dt,
            field.min_nodal_h(),
            flags.count_gravity_off(),
            (mass - initial_mass) / initial_mass,
            err,
        )?;
        Ok(())
    };

    let snapshot = |field: &CellField, label: &str, t: f64| -> Result<(), RunError> {
        if config.snapshot_format.csv() {
            let path = dir.join(format!("snapshot_{label}.csv"));
            let mut w = BufWriter::new(File::create(path)?);
            write_snapshot_csv(&mut w, field, &bathy, &mesh, t, config.tol_wet)?;
        }
        if config.snapshot_format.vtk() {
            let path = dir.join(format!("snapshot_{label}.vtk"));
            let mut w = BufWriter::new(File::create(path)?);
            write_snapshot_vtk(&mut w, field, &bathy, &mesh, t, config.tol_wet)?;
        }
        Ok(())
    };

    let first_dt = match config.step {
        StepControl::FixedDt(dt) => dt,
        StepControl::Courant(target) => {
            adaptive_dt(&field, &mesh, config.g, config.tol_wet, target).min(t_end)
        }
    };
    let dt_floor = DT_FLOOR_FACTOR * first_dt;

    write_gauge_rows(&mut gauges, &field, 0.0)?;
    diag_row(
        &mut diag,
        &field,
        0.0,
        first_dt,
        courant_number(&field, &mesh, config.g, config.tol_wet, first_dt),
    )?;
    if config.snapshot_interval.is_some() {
        snapshot(&field, "000000", 0.0)?;
    }

    let mut outcome = RunOutcome {
        steps: 0,
        t_final: 0.0,
        initial_mass,
        final_mass: initial_mass,
        max_courant: 0.0,
        min_depth: f64::INFINITY,
    };

    let mut t = 0.0;
    let mut aborted: Option<SolverError> = None;
    let time_eps = 1e-12 * t_end.max(1.0);
    while t_end - t > time_eps {
        let raw_dt = match config.step {
            StepControl::FixedDt(dt) => dt,
            StepControl::Courant(target) => {
                let dt = adaptive_dt(&field, &mesh, config.g, config.tol_wet, target);
                if dt < dt_floor {
                    aborted = Some(SolverError::TimeStepCollapse {
                        dt,
                        floor: dt_floor,
                        t,
                    });
                    break;
                }
                dt
            }
        };
        let dt = raw_dt.min(t_end - t);
        let courant = courant_number(&field, &mesh, config.g, config.tol_wet, dt);
        match stepper.step(&mut field, &bathy, &mesh, dt, t, &bc) {
            Ok(_stats) => {}
            Err(e) => {
                aborted = Some(e);
                break;
            }
        }
        outcome.steps += 1;
        // Exact stamps under a fixed step; accumulation otherwise.
        t = if raw_dt >= t_end - t {
            t_end
        } else {
            match config.step {
                StepControl::FixedDt(dt) => dt * outcome.steps as f64,
                StepControl::Courant(_) => t + dt,
            }
        };
        outcome.max_courant = outcome.max_courant.max(courant);
        outcome.min_depth = outcome.min_depth.min(field.min_nodal_h());

        write_gauge_rows(&mut gauges, &field, t)?;
        if outcome.steps % config.diag_interval == 0 || t_end - t <= time_eps {
            diag_row(&mut diag, &field, t, dt, courant)?;
        }
        if let Some(every) = config.snapshot_interval {
            if outcome.steps % every == 0 {
                snapshot(&field, &format!("{:06}", outcome.steps), t)?;
            }
        }
    }
    outcome.t_final = t;
    outcome.final_mass = total_mass(&field, &mesh);
    gauges.flush()?;
    diag.out.flush()?;

    if aborted.is_none() {
        snapshot(&field, "final", t)?;
        for (i, line) in config.sections.iter().enumerate() {
            let trace = extract_cross_section(
                &field,
                &bathy,
                &mesh,
                *line,
                config.section_samples,
                config.tol_wet,
            );
            if trace.is_empty() {
                eprintln!("warning: section {i} misses the mesh; empty trace");
            }
            let path = dir.join(format!("section_{i:02}.csv"));
            let mut w = BufWriter::new(File::create(path)?);
            write_section_csv(&mut w, *line, &trace)?;
        }
    }

    let status = match &aborted {
        None => format!(
            "completed: {} steps to t = {}",
            outcome.steps,
            fmt_f64(outcome.t_final)
        ),
        Some(e) => format!("aborted: {e}"),
    };
    write_manifest(&dir.join("manifest.txt"), config, &status)?;

    match aborted {
        None => Ok(outcome),
        Some(e) => Err(RunError::Solver(e)),
    }
}

fn write_manifest(path: &Path, config: &RunConfig, status: &str) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# run manifest; this file is itself a runnable config")?;
    writeln!(w, "# status = {status}")?;
    w.write_all(config.manifest().as_bytes())?;
    w.flush()
}
