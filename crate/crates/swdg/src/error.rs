//! Error types for mesh construction, configuration, and the solver loop.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("cell {cell} repeats vertex {vertex}")]
    RepeatedVertex { cell: usize, vertex: usize },
    #[error("cell {cell} references vertex {vertex} but the mesh has {num_vertices} vertices")]
    VertexOutOfRange { cell: usize, vertex: usize, num_vertices: usize },
    #[error("cell {cell} is degenerate (zero area)")]
    DegenerateCell { cell: usize },
    #[error("edge ({a}, {b}) is shared by more than two cells; mesh is non-conforming")]
    NonConforming { a: usize, b: usize },
    #[error("vertex {vertex} hangs on boundary edge ({a}, {b}); mesh is non-conforming")]
    HangingNode { vertex: usize, a: usize, b: usize },
    #[error("boundary line references edge ({a}, {b}) which is not a boundary edge of the mesh")]
    TagOnNonBoundaryEdge { a: usize, b: usize },
    #[error("unknown boundary tag `{tag}`")]
    UnknownTag { tag: String },
    #[error("periodic pair {pair} has no geometric match for edge ({a}, {b})")]
    PeriodicPairing { pair: u32, a: usize, b: usize },
    #[error("requested rectangle has non-positive extent")]
    DegenerateRectangle,
    #[error("mesh file, line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` is set more than once in the same file")]
    DuplicateKey(String),
    #[error("key `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("keys `dt` and `cfl` are mutually exclusive; set exactly one")]
    ConflictingStepControl,
    #[error("config file, line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(
        "negative cell mean depth {mean:.3e} in cell {cell} at t = {t:.6}; \
         the CFL restriction for positivity in the mean is violated"
    )]
    NegativeCellMean { cell: usize, mean: f64, t: f64 },
    #[error(
        "time step {dt:.3e} fell below the floor {floor:.3e} at t = {t:.6}; \
         spurious-velocity collapse"
    )]
    TimeStepCollapse { dt: f64, floor: f64, t: f64 },
    #[error("wet/dry tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("boundary edge {edge} is tagged inflow but no inflow condition was supplied")]
    MissingInflowSpec { edge: usize },
    #[error("field has {field_cells} cells but the mesh has {mesh_cells}")]
    DimensionMismatch { field_cells: usize, mesh_cells: usize },
}
