//! Command-line driver: configured runs, mesh tooling, and exact-solution
//! dumps for offline comparison.

use clap::{Parser, Subcommand};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use swdg::config::parse_config_file;
use swdg::mesh::{
    build_uniform_mesh, load_mesh, save_mesh, BaseSplit, BoundarySpec, BoundaryTag, Mesh,
    Rect, SideSpec,
};
use swdg::output::write_snapshot_csv;
use swdg::runner::{execute_run, RunError};
use swdg::scenario::{exact_field, Scenario};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "swdg",
    version,
    about = "Runge-Kutta discontinuous Galerkin shallow water solver \
             with limiter-based wetting and drying"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured scenario and write its artifacts.
    Run {
        /// Path to a `key = value` config file.
        config: PathBuf,
        /// Override one config key (repeatable), e.g. --override limiter=edge.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Build or inspect mesh files.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Dump a closed-form solution on the scenario's default mesh as a
    /// snapshot CSV.
    Exact {
        /// A scenario with a closed-form solution (thacker_radial or
        /// thacker_planar).
        scenario: String,
        /// Evaluation time in seconds.
        #[arg(allow_hyphen_values = true)]
        t: f64,
        /// Output CSV path.
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Triangulate a rectangle uniformly and save the mesh.
    Build {
        /// Output mesh path.
        out: PathBuf,
        /// Base grid columns.
        #[arg(long)]
        nx: usize,
        /// Base grid rows.
        #[arg(long)]
        ny: usize,
        /// Rectangle as `x0,y0,x1,y1`.
        #[arg(long, default_value = "0,0,1,1", allow_hyphen_values = true)]
        domain: String,
        /// Squares into `two` or `four` triangles each.
        #[arg(long, default_value = "two")]
        split: String,
        /// Uniform refinement levels on top of the base grid.
        #[arg(long, default_value_t = 0)]
        levels: u32,
        /// Boundary conditions `left,right,bottom,top`, each one of
        /// wall|transparent|inflow|periodic.
        #[arg(long, default_value = "wall,wall,wall,wall")]
        bounds: String,
    },
    /// Validate a mesh file and print summary statistics.
    Check {
        path: PathBuf,
    },
}

fn main() -> ExitCode {
    // The solver is single-threaded; the count is accepted as a hint only.
    if let Ok(threads) = std::env::var("SWDG_THREADS") {
        if threads.parse::<usize>().map_or(true, |n| n == 0) {
            eprintln!("warning: ignoring SWDG_THREADS={threads} (not a positive integer)");
        }
    }
    match Cli::parse().command {
        Command::Run { config, overrides } => run(&config, &overrides),
        Command::Mesh { command } => match command {
            MeshCommand::Build { out, nx, ny, domain, split, levels, bounds } => {
                mesh_build(&out, nx, ny, &domain, &split, levels, &bounds)
            }
            MeshCommand::Check { path } => mesh_check(&path),
        },
        Command::Exact { scenario, t, out } => exact(&scenario, t, &out),
    }
}

fn run(config_path: &Path, overrides: &[String]) -> ExitCode {
    let config = match parse_config_file(config_path, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match execute_run(&config) {
        Ok(outcome) => {
            println!(
                "completed {} steps to t = {} (final mass {}, relative drift {:.3e})",
                outcome.steps,
                outcome.t_final,
                outcome.final_mass,
                (outcome.final_mass - outcome.initial_mass) / outcome.initial_mass
            );
            ExitCode::SUCCESS
        }
        Err(e @ (RunError::Config(_) | RunError::Mesh(_))) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunError::Solver(e)) => {
            eprintln!("solver abort: {e}");
            eprintln!("(diagnostic recorded in the run manifest)");
            ExitCode::from(EXIT_SOLVER)
        }
        Err(RunError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn parse_domain(s: &str) -> Result<Rect, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad --domain `{s}`: {e}"))?;
    if parts.len() != 4 {
        return Err(format!("bad --domain `{s}`: expected x0,y0,x1,y1"));
    }
    Ok(Rect::new(parts[0], parts[1], parts[2], parts[3]))
}

fn parse_bounds(s: &str) -> Result<BoundarySpec, String> {
    let side = |token: &str| match token.trim() {
        "wall" => Ok(SideSpec::Wall),
        "transparent" => Ok(SideSpec::Transparent),
        "inflow" => Ok(SideSpec::Inflow),
        "periodic" => Ok(SideSpec::Periodic),
        other => Err(format!("bad boundary `{other}`")),
    };
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("bad --bounds `{s}`: expected left,right,bottom,top"));
    }
    Ok(BoundarySpec {
        left: side(parts[0])?,
        right: side(parts[1])?,
        bottom: side(parts[2])?,
        top: side(parts[3])?,
    })
}

fn mesh_build(
    out: &Path,
    nx: usize,
    ny: usize,
    domain: &str,
    split: &str,
    levels: u32,
    bounds: &str,
) -> ExitCode {
    let config_err = |msg: String| {
        eprintln!("config error: {msg}");
        ExitCode::from(EXIT_CONFIG)
    };
    let domain = match parse_domain(domain) {
        Ok(d) => d,
        Err(e) => return config_err(e),
    };
    let split = match split {
        "two" => BaseSplit::TwoTriangle,
        "four" => BaseSplit::FourTriangle,
        other => return config_err(format!("bad --split `{other}`: expected two or four")),
    };
    let bounds = match parse_bounds(bounds) {
        Ok(b) => b,
        Err(e) => return config_err(e),
    };
    let mesh = match build_uniform_mesh(domain, nx, ny, split, levels, bounds) {
        Ok(m) => m,
        Err(e) => return config_err(e.to_string()),
    };
    if let Err(e) = save_mesh(&mesh, out) {
        eprintln!("i/o error: {e}");
        return ExitCode::FAILURE;
    }
    println!(
        "wrote {}: {} vertices, {} cells, {} edges",
        out.display(),
        mesh.num_vertices(),
        mesh.num_cells(),
        mesh.edges().len()
    );
    ExitCode::SUCCESS
}

fn mesh_check(path: &Path) -> ExitCode {
    let mesh = match load_mesh(path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("invalid mesh: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    print_mesh_stats(&mesh);
    println!("OK");
    ExitCode::SUCCESS
}

fn print_mesh_stats(mesh: &Mesh) {
    let mut tags = [0usize; 4];
    let mut interior = 0usize;
    for e in mesh.edges() {
        match e.boundary {
            None => interior += 1,
            Some(BoundaryTag::Wall) => tags[0] += 1,
            Some(BoundaryTag::Transparent) => tags[1] += 1,
            Some(BoundaryTag::Inflow) => tags[2] += 1,
            Some(BoundaryTag::Periodic(_)) => tags[3] += 1,
        }
    }
    let mut min_area = f64::INFINITY;
    let mut max_area = f64::NEG_INFINITY;
    let mut min_radius = f64::INFINITY;
    for c in 0..mesh.num_cells() {
        min_area = min_area.min(mesh.area(c));
        max_area = max_area.max(mesh.area(c));
        min_radius = min_radius.min(mesh.cfl_radius(c));
    }
    println!("vertices:        {}", mesh.num_vertices());
    println!("cells:           {}", mesh.num_cells());
    println!("edges:           {} ({interior} interior)", mesh.edges().len());
    println!(
        "boundary edges:  {} wall, {} transparent, {} inflow, {} periodic",
        tags[0], tags[1], tags[2], tags[3]
    );
    println!("total area:      {:.6e}", mesh.total_area());
    println!("cell area range: [{min_area:.6e}, {max_area:.6e}]");
    println!("min CFL radius:  {min_radius:.6e}");
}

fn exact(scenario: &str, t: f64, out: &Path) -> ExitCode {
    let Some(scenario) = Scenario::parse(scenario) else {
        eprintln!(
            "config error: unknown scenario `{scenario}`; expected one of {}",
            Scenario::ALL.map(|s| s.name()).join(", ")
        );
        return ExitCode::from(EXIT_CONFIG);
    };
    if !scenario.has_exact() {
        eprintln!(
            "config error: `{}` has no closed-form solution; \
             use thacker_radial or thacker_planar",
            scenario.name()
        );
        return ExitCode::from(EXIT_CONFIG);
    }
    if !t.is_finite() {
        eprintln!("config error: evaluation time must be finite, got {t}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let mesh = match scenario.build_mesh(0) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let field = exact_field(scenario, &mesh, t).expect("closed form checked above");
    let (bathy, _) = swdg::scenario::discretize(scenario, &mesh);
    let result = File::create(out).and_then(|f| {
        let mut w = BufWriter::new(f);
        write_snapshot_csv(&mut w, &field, &bathy, &mesh, t, scenario.default_tol_wet())
    });
    match result {
        Ok(()) => {
            println!("wrote {} ({} cells at t = {t})", out.display(), mesh.num_cells());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("i/o error: {e}");
            ExitCode::FAILURE
        }
    }
}
