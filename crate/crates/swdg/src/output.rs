//! On-disk artifacts: field snapshots (CSV and legacy VTK), cross-section
//! traces, gauge sampling, and the diagnostics time series.
//!
//! Every float is serialized with 17 significant digits so all CSV files
//! parse back to bit-identical values. Nodal values are written per
//! (cell, node) pair: the discontinuous representation stores each vertex
//! once per incident cell, and the files preserve that.

use crate::config::fmt_f64;
use crate::geom::Point;
use crate::mesh::Mesh;
use crate::state::{CellField, ScalarField};
use crate::wetdry::nodal_velocity;
use std::io::{self, BufRead, Write};

pub const SNAPSHOT_HEADER: &str = "cell,node,x,y,b,h,hu,hv,u,v,wet";
pub const SECTION_HEADER: &str = "cell,x,y,b,h,hu,hv,u,v";
pub const GAUGE_HEADER: &str = "time,gauge,x,y,eta,h,u,v";
pub const DIAG_HEADER: &str = "time,mass,energy,max_courant,dt,min_nodal_h,\
                               gravity_off_cells,mass_drift,err_linf_h,err_l2_h,err_linf_m";

/// Writes one row per (cell, node) with positions, bathymetry, conserved
/// variables, cutoff velocities, and the wet flag.
pub fn write_snapshot_csv(
    w: &mut impl Write,
    field: &CellField,
    bathy: &ScalarField,
    mesh: &Mesh,
    t: f64,
    tol_wet: f64,
) -> io::Result<()> {
    writeln!(w, "# t = {}", fmt_f64(t))?;
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for c in 0..mesh.num_cells() {
        let pts = mesh.cell_points(c);
        let cell = &field.cells[c];
        for i in 0..3 {
            let h = cell.h[i];
            let u = nodal_velocity(h, cell.hu[i], tol_wet);
            let v = nodal_velocity(h, cell.hv[i], tol_wet);
            writeln!(
                w,
                "{c},{i},{},{},{},{},{},{},{},{},{}",
                fmt_f64(pts[i].x),
                fmt_f64(pts[i].y),
                fmt_f64(bathy.cells[c][i]),
                fmt_f64(h),
                fmt_f64(cell.hu[i]),
                fmt_f64(cell.hv[i]),
                fmt_f64(u),
                fmt_f64(v),
                u8::from(h >= tol_wet),
            )?;
        }
    }
    Ok(())
}

/// A snapshot read back from CSV.
#[derive(Clone, Debug)]
pub struct SnapshotData {
    pub t: f64,
    pub field: CellField,
    pub bathy: ScalarField,
}

fn bad_data(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

/// Reads a snapshot CSV produced by [`write_snapshot_csv`]; nodal values
/// are reconstructed exactly.
pub fn read_snapshot_csv(r: impl BufRead) -> io::Result<SnapshotData> {
    let mut t = None;
    let mut rows: Vec<(usize, usize, [f64; 4])> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line == SNAPSHOT_HEADER {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(value) = rest.trim().strip_prefix("t =") {
                t = Some(value.trim().parse::<f64>().map_err(|e| {
                    bad_data(format!("line {}: bad time stamp: {e}", idx + 1))
                })?);
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(bad_data(format!(
                "line {}: expected 11 columns, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| bad_data(format!("line {}: {e}", idx + 1)))
        };
        let cell: usize = fields[0]
            .parse()
            .map_err(|e| bad_data(format!("line {}: {e}", idx + 1)))?;
        let node: usize = fields[1]
            .parse()
            .map_err(|e| bad_data(format!("line {}: {e}", idx + 1)))?;
        if node > 2 {
            return Err(bad_data(format!("line {}: node index {node} > 2", idx + 1)));
        }
        rows.push((
            cell,
            node,
            [parse(fields[4])?, parse(fields[5])?, parse(fields[6])?, parse(fields[7])?],
        ));
    }
    let num_cells = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
    if rows.len() != 3 * num_cells {
        return Err(bad_data(format!(
            "expected {} rows for {num_cells} cells, got {}",
            3 * num_cells,
            rows.len()
        )));
    }
    let mut field = CellField::zeros(num_cells);
    let mut bathy = ScalarField::zeros(num_cells);
    for (cell, node, vals) in rows {
        bathy.cells[cell][node] = vals[0];
        field.cells[cell].h[node] = vals[1];
        field.cells[cell].hu[node] = vals[2];
        field.cells[cell].hv[node] = vals[3];
    }
    let t = t.ok_or_else(|| bad_data("missing `# t = ...` stamp".into()))?;
    Ok(SnapshotData { t, field, bathy })
}

/// Legacy-format VTK dump with per-cell duplicated points, so cell-wise
/// discontinuities survive in viewers.
pub fn write_snapshot_vtk(
    w: &mut impl Write,
    field: &CellField,
    bathy: &ScalarField,
    mesh: &Mesh,
    t: f64,
    tol_wet: f64,
) -> io::Result<()> {
    let n = mesh.num_cells();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "shallow water fields at t = {}", fmt_f64(t))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", 3 * n)?;
    for c in 0..n {
        for p in mesh.cell_points(c) {
            writeln!(w, "{} {} 0.0", fmt_f64(p.x), fmt_f64(p.y))?;
        }
    }
    writeln!(w, "CELLS {n} {}", 4 * n)?;
    for c in 0..n {
        writeln!(w, "3 {} {} {}", 3 * c, 3 * c + 1, 3 * c + 2)?;
    }
    writeln!(w, "CELL_TYPES {n}")?;
    for _ in 0..n {
        writeln!(w, "5")?;
    }
    writeln!(w, "POINT_DATA {}", 3 * n)?;
    let scalar = |w: &mut dyn Write, name: &str, get: &dyn Fn(usize, usize) -> f64| {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for c in 0..n {
            for i in 0..3 {
                writeln!(w, "{}", fmt_f64(get(c, i)))?;
            }
        }
        Ok::<(), io::Error>(())
    };
    scalar(w, "bathymetry", &|c, i| bathy.cells[c][i])?;
    scalar(w, "depth", &|c, i| field.cells[c].h[i])?;
    scalar(w, "surface", &|c, i| bathy.cells[c][i] + field.cells[c].h[i])?;
    writeln!(w, "SCALARS wet int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for c in 0..n {
        for i in 0..3 {
            writeln!(w, "{}", u8::from(field.cells[c].h[i] >= tol_wet))?;
        }
    }
    writeln!(w, "VECTORS momentum double")?;
    for c in 0..n {
        for i in 0..3 {
            writeln!(
                w,
                "{} {} 0.0",
                fmt_f64(field.cells[c].hu[i]),
                fmt_f64(field.cells[c].hv[i])
            )?;
        }
    }
    writeln!(w, "VECTORS velocity double")?;
    for c in 0..n {
        for i in 0..3 {
            let h = field.cells[c].h[i];
            writeln!(
                w,
                "{} {} 0.0",
                fmt_f64(nodal_velocity(h, field.cells[c].hu[i], tol_wet)),
                fmt_f64(nodal_velocity(h, field.cells[c].hv[i], tol_wet))
            )?;
        }
    }
    Ok(())
}

/// An axis-parallel section line through the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SectionLine {
    Horizontal { y: f64 },
    Vertical { x: f64 },
}

impl SectionLine {
    /// Coordinate along the line (the sort key of a trace).
    fn abscissa(&self, p: Point) -> f64 {
        match self {
            SectionLine::Horizontal { .. } => p.x,
            SectionLine::Vertical { .. } => p.y,
        }
    }

    fn point_at(&self, s: f64) -> Point {
        match self {
            SectionLine::Horizontal { y } => Point::new(s, *y),
            SectionLine::Vertical { x } => Point::new(*x, s),
        }
    }

    /// Signed offset of a point from the line.
    fn offset(&self, p: Point) -> f64 {
        match self {
            SectionLine::Horizontal { y } => p.y - y,
            SectionLine::Vertical { x } => p.x - x,
        }
    }
}

/// One interpolated record of a cross-section trace.
#[derive(Clone, Copy, Debug)]
pub struct SectionSample {
    pub cell: usize,
    pub pos: Point,
    pub b: f64,
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
    pub u: f64,
    pub v: f64,
}

/// Barycentric coordinates of `p` in cell `c` (signed; they sum to 1).
fn barycentric(mesh: &Mesh, c: usize, p: Point) -> [f64; 3] {
    let [a, b, q] = mesh.cell_points(c);
    let twice_area = (b - a).cross(q - a);
    [
        (b - p).cross(q - p) / twice_area,
        (q - p).cross(a - p) / twice_area,
        (a - p).cross(b - p) / twice_area,
    ]
}

/// Lowest-index cell containing `p` (boundaries inclusive, with a small
/// relative slack so points placed exactly on edges resolve stably).
pub fn locate_point(mesh: &Mesh, p: Point) -> Option<usize> {
    (0..mesh.num_cells()).find(|&c| {
        let lambda = barycentric(mesh, c, p);
        lambda.iter().all(|&l| l >= -1e-12)
    })
}

/// P1 interpolation of all fields at a point of a cell.
pub fn sample_in_cell(
    field: &CellField,
    bathy: &ScalarField,
    mesh: &Mesh,
    c: usize,
    p: Point,
    tol_wet: f64,
) -> SectionSample {
    let lambda = barycentric(mesh, c, p);
    let eval = |nodal: &[f64; 3]| {
        lambda[0] * nodal[0] + lambda[1] * nodal[1] + lambda[2] * nodal[2]
    };
    let h = eval(&field.cells[c].h);
    let hu = eval(&field.cells[c].hu);
    let hv = eval(&field.cells[c].hv);
    SectionSample {
        cell: c,
        pos: p,
        b: eval(&bathy.cells[c]),
        h,
        hu,
        hv,
        u: nodal_velocity(h, hu, tol_wet),
        v: nodal_velocity(h, hv, tol_wet),
    }
}

/// Traces an axis-parallel line through the mesh. Each intersected cell
/// contributes its entry point, any of the `samples` uniform abscissae
/// that fall strictly inside, and its exit point, so a shared edge shows
/// both one-sided values. Records are ordered by abscissa; an empty
/// result means the line misses the mesh.
pub fn extract_cross_section(
    field: &CellField,
    bathy: &ScalarField,
    mesh: &Mesh,
    line: SectionLine,
    samples: usize,
    tol_wet: f64,
) -> Vec<SectionSample> {
    // Per-cell abscissa ranges where the line crosses the triangle.
    let mut segments: Vec<(f64, f64, usize)> = Vec::new();
    for c in 0..mesh.num_cells() {
        let pts = mesh.cell_points(c);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..3 {
            let (a, b) = (pts[i], pts[(i + 1) % 3]);
            let (da, db) = (line.offset(a), line.offset(b));
            if da == 0.0 {
                lo = lo.min(line.abscissa(a));
                hi = hi.max(line.abscissa(a));
            }
            if (da < 0.0) != (db < 0.0) && da != 0.0 && db != 0.0 {
                let s = line.abscissa(a) + da / (da - db) * (line.abscissa(b) - line.abscissa(a));
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        if hi > lo {
            segments.push((lo, hi, c));
        }
    }
    if segments.is_empty() {
        log::warn!("cross-section line misses the mesh; empty trace");
        return Vec::new();
    }
    segments.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    let span_lo = segments.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let span_hi = segments.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let step = (span_hi - span_lo) / samples.max(1) as f64;

    let mut trace = Vec::new();
    for (lo, hi, c) in segments {
        let mut push = |s: f64| {
            trace.push(sample_in_cell(field, bathy, mesh, c, line.point_at(s), tol_wet));
        };
        push(lo);
        // Uniform global abscissae strictly inside this cell's range.
        let first = ((lo - span_lo) / step - 0.5).ceil().max(0.0) as usize;
        for k in first..samples {
            let s = span_lo + (k as f64 + 0.5) * step;
            if s <= lo {
                continue;
            }
            if s >= hi {
                break;
            }
            push(s);
        }
        push(hi);
    }
    trace
}

pub fn write_section_csv(
    w: &mut impl Write,
    line: SectionLine,
    trace: &[SectionSample],
) -> io::Result<()> {
    match line {
        SectionLine::Horizontal { y } => writeln!(w, "# line: y = {}", fmt_f64(y))?,
        SectionLine::Vertical { x } => writeln!(w, "# line: x = {}", fmt_f64(x))?,
    }
    writeln!(w, "{SECTION_HEADER}")?;
    for s in trace {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            s.cell,
            fmt_f64(s.pos.x),
            fmt_f64(s.pos.y),
            fmt_f64(s.b),
            fmt_f64(s.h),
            fmt_f64(s.hu),
            fmt_f64(s.hv),
            fmt_f64(s.u),
            fmt_f64(s.v),
        )?;
    }
    Ok(())
}
