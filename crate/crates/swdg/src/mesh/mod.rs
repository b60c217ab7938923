//! Conforming triangular meshes: construction, refinement, adjacency,
//! boundary tagging (including periodic pairing), and the per-cell radius
//! used for CFL control.
//!
//! Cells store vertex indices in counterclockwise order. Every interior edge
//! is shared by exactly two cells; the cell with the lower index is the
//! edge's "left" cell and the stored unit normal points out of it. Periodic
//! boundaries are realized as edge pairing: the paired cell acts as the edge
//! neighbor during assembly and in neighborhood queries.

mod format;

pub use format::{load_mesh, save_mesh};

use crate::error::MeshError;
use crate::geom::{dist_point_segment, Point};
use std::collections::HashMap;

/// Axis-aligned rectangle, used for built meshes and scenario domains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

/// Boundary condition tag attached to a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryTag {
    Wall,
    Transparent,
    Inflow,
    /// Edges sharing a pair id are matched geometrically (equal length,
    /// translated coordinates, opposite normals).
    Periodic(u32),
}

impl BoundaryTag {
    pub fn as_str(&self) -> String {
        match self {
            BoundaryTag::Wall => "wall".into(),
            BoundaryTag::Transparent => "transparent".into(),
            BoundaryTag::Inflow => "inflow".into(),
            BoundaryTag::Periodic(id) => format!("periodic:{id}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self, MeshError> {
        match s {
            "wall" => Ok(BoundaryTag::Wall),
            "transparent" => Ok(BoundaryTag::Transparent),
            "inflow" => Ok(BoundaryTag::Inflow),
            _ => {
                if let Some(id) = s.strip_prefix("periodic:") {
                    id.parse::<u32>()
                        .map(BoundaryTag::Periodic)
                        .map_err(|_| MeshError::UnknownTag { tag: s.into() })
                } else {
                    Err(MeshError::UnknownTag { tag: s.into() })
                }
            }
        }
    }
}

/// Link from a periodic boundary edge to its geometric partner.
#[derive(Clone, Copy, Debug)]
pub struct PeriodicLink {
    pub partner_edge: usize,
    pub partner_cell: usize,
    /// Local node indices in the partner cell matching this edge's (a, b)
    /// endpoints under the pairing translation.
    pub partner_nodes: [usize; 2],
    /// True on the lower-indexed edge of the pair; assembly visits each pair
    /// once through its primary edge.
    pub primary: bool,
}

#[derive(Clone, Debug)]
pub struct Edge {
    /// Endpoint vertices (a, b) in the traversal order of the left cell;
    /// edge quadrature and traces are parameterized from a to b.
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    /// Unit normal pointing out of the left cell.
    pub normal: Point,
    pub length: f64,
    pub boundary: Option<BoundaryTag>,
    /// Local indices of (a, b) within the left cell's vertex triple.
    pub left_nodes: [usize; 2],
    /// Local indices of (a, b) within the right cell; meaningful only for
    /// interior edges.
    pub right_nodes: [usize; 2],
    pub periodic: Option<PeriodicLink>,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }
}

/// Neighborhood flavor used by limiters: cells connected through a shared
/// edge, or through a shared vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeighborhoodVariant {
    Edge,
    Vertex,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    cell_edges: Vec<[usize; 3]>,
    cell_area: Vec<f64>,
    /// Gradients of the three nodal P1 basis functions, constant per cell.
    cell_grad: Vec<[Point; 3]>,
    cfl_radius: Vec<f64>,
    edge_neighbors: Vec<Vec<usize>>,
    vertex_neighbors: Vec<Vec<usize>>,
}

impl Mesh {
    /// Builds a mesh from raw connectivity, validating conformity.
    ///
    /// Cells may be given in either orientation; they are normalized to CCW.
    /// `boundary_tags` lists `(v_a, v_b, tag)` entries for boundary edges;
    /// untagged boundary edges default to `Wall`.
    pub fn new(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        boundary_tags: Vec<(usize, usize, BoundaryTag)>,
    ) -> Result<Self, MeshError> {
        assemble(vertices, cells, boundary_tags, true)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn cell_vertices(&self, c: usize) -> [usize; 3] {
        self.cells[c]
    }

    pub fn cell_points(&self, c: usize) -> [Point; 3] {
        let [a, b, d] = self.cells[c];
        [self.vertices[a], self.vertices[b], self.vertices[d]]
    }

    pub fn centroid(&self, c: usize) -> Point {
        let [p0, p1, p2] = self.cell_points(c);
        Point::new((p0.x + p1.x + p2.x) / 3.0, (p0.y + p1.y + p2.y) / 3.0)
    }

    pub fn area(&self, c: usize) -> f64 {
        self.cell_area[c]
    }

    /// Gradients of the nodal basis functions on cell `c` (constants).
    pub fn basis_gradients(&self, c: usize) -> &[Point; 3] {
        &self.cell_grad[c]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cell_edge_ids(&self, c: usize) -> [usize; 3] {
        self.cell_edges[c]
    }

    /// Per-cell radius for CFL control: the nodal value at a vertex is the
    /// radius of the largest circle centered there that stays inside the
    /// patch of triangles around the vertex; cells take the minimum over
    /// their vertices. Boundary vertices carry no patch value; a cell all of
    /// whose vertices lie on the boundary falls back to its own inradius.
    pub fn cfl_radius(&self, c: usize) -> f64 {
        self.cfl_radius[c]
    }

    /// Cells sharing an edge with `c` (periodic partners included), self
    /// excluded, ascending order.
    pub fn edge_neighbors(&self, c: usize) -> &[usize] {
        &self.edge_neighbors[c]
    }

    /// Cells sharing a vertex with `c` (periodic identification included),
    /// self excluded, ascending order.
    pub fn vertex_neighbors(&self, c: usize) -> &[usize] {
        &self.vertex_neighbors[c]
    }

    /// The cell itself plus its edge- or vertex-connected cells.
    pub fn neighborhood(&self, c: usize, variant: NeighborhoodVariant) -> Vec<usize> {
        let n = match variant {
            NeighborhoodVariant::Edge => &self.edge_neighbors[c],
            NeighborhoodVariant::Vertex => &self.vertex_neighbors[c],
        };
        let mut out = Vec::with_capacity(n.len() + 1);
        out.push(c);
        out.extend_from_slice(n);
        out
    }

    /// Barycentric coordinates of `p` with respect to cell `c`.
    pub fn barycentric(&self, c: usize, p: Point) -> [f64; 3] {
        let [p0, p1, p2] = self.cell_points(c);
        let denom = 2.0 * self.cell_area[c];
        let l0 = (p1 - p).cross(p2 - p) / denom;
        let l1 = (p2 - p).cross(p0 - p) / denom;
        let l2 = (p0 - p).cross(p1 - p) / denom;
        [l0, l1, l2]
    }

    /// Lowest-indexed cell containing `p` (edges inclusive within a small
    /// relative tolerance), or `None` when outside the mesh.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let tol = 1e-12;
        (0..self.num_cells()).find(|&c| {
            let l = self.barycentric(c, p);
            l.iter().all(|&x| x >= -tol)
        })
    }

    /// Uniform red refinement: every triangle is split into four congruent
    /// children through its edge midpoints. Boundary tags (and periodic pair
    /// ids) are inherited by the two child halves of each boundary edge.
    pub fn refine(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut edge_mid = vec![0usize; self.edges.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            let [a, b] = edge.vertices;
            edge_mid[e] = vertices.len();
            vertices.push(self.vertices[a].midpoint(self.vertices[b]));
        }

        let mut cells = Vec::with_capacity(4 * self.cells.len());
        for c in 0..self.num_cells() {
            let [v0, v1, v2] = self.cells[c];
            let [e01, e12, e20] = self.cell_edges[c];
            let (m01, m12, m20) = (edge_mid[e01], edge_mid[e12], edge_mid[e20]);
            cells.push([v0, m01, m20]);
            cells.push([v1, m12, m01]);
            cells.push([v2, m20, m12]);
            cells.push([m01, m12, m20]);
        }

        let mut boundary_tags = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if let Some(tag) = edge.boundary {
                let [a, b] = edge.vertices;
                let m = edge_mid[e];
                boundary_tags.push((a, m, tag));
                boundary_tags.push((m, b, tag));
            }
        }

        assemble(vertices, cells, boundary_tags, false)
            .expect("refinement of a valid mesh stays valid")
    }

    /// `refine` applied `levels` times.
    pub fn refine_levels(&self, levels: u32) -> Mesh {
        let mut m = self.clone();
        for _ in 0..levels {
            m = m.refine();
        }
        m
    }

    pub fn total_area(&self) -> f64 {
        self.cell_area.iter().sum()
    }

    pub fn bounding_box(&self) -> Rect {
        let mut r = Rect::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            r.x0 = r.x0.min(p.x);
            r.y0 = r.y0.min(p.y);
            r.x1 = r.x1.max(p.x);
            r.y1 = r.y1.max(p.y);
        }
        r
    }
}

/// How each base rectangle of a built mesh is split into triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseSplit {
    /// Diagonal split: 2 triangles per rectangle, legs along the axes.
    TwoTriangle,
    /// Both diagonals through an added center vertex: 4 triangles.
    FourTriangle,
}

/// Boundary condition requested for one side of a built rectangular mesh.
/// Periodic sides pair left with right (pair id 0) and bottom with top
/// (pair id 1); requesting periodic on only one side of a pair is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideSpec {
    Wall,
    Transparent,
    Inflow,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundarySpec {
    pub left: SideSpec,
    pub right: SideSpec,
    pub bottom: SideSpec,
    pub top: SideSpec,
}

impl BoundarySpec {
    pub const fn walls() -> Self {
        BoundarySpec {
            left: SideSpec::Wall,
            right: SideSpec::Wall,
            bottom: SideSpec::Wall,
            top: SideSpec::Wall,
        }
    }

    pub const fn periodic() -> Self {
        BoundarySpec {
            left: SideSpec::Periodic,
            right: SideSpec::Periodic,
            bottom: SideSpec::Periodic,
            top: SideSpec::Periodic,
        }
    }
}

/// Builds a uniform mesh over `domain` from an `nx` by `ny` pattern of base
/// rectangles, each split into triangles, then red-refined `levels` times.
/// The two-triangle split yields `2 * 4^levels` cells per base rectangle,
/// the four-triangle split `4 * 4^levels`.
pub fn build_uniform_mesh(
    domain: Rect,
    nx: usize,
    ny: usize,
    split: BaseSplit,
    levels: u32,
    bounds: BoundarySpec,
) -> Result<Mesh, MeshError> {
    if !(domain.width() > 0.0 && domain.height() > 0.0) || nx == 0 || ny == 0 {
        return Err(MeshError::DegenerateRectangle);
    }
    let periodic_x = bounds.left == SideSpec::Periodic || bounds.right == SideSpec::Periodic;
    if periodic_x && bounds.left != bounds.right {
        return Err(MeshError::PeriodicPairing { pair: 0, a: 0, b: 0 });
    }
    let periodic_y = bounds.bottom == SideSpec::Periodic || bounds.top == SideSpec::Periodic;
    if periodic_y && bounds.bottom != bounds.top {
        return Err(MeshError::PeriodicPairing { pair: 1, a: 0, b: 0 });
    }

    let dx = domain.width() / nx as f64;
    let dy = domain.height() / ny as f64;
    let vid = |i: usize, j: usize| j * (nx + 1) + i;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point::new(
                domain.x0 + i as f64 * dx,
                domain.y0 + j as f64 * dy,
            ));
        }
    }

    let mut cells = Vec::new();
    match split {
        BaseSplit::TwoTriangle => {
            for j in 0..ny {
                for i in 0..nx {
                    let (a, b, c, d) =
                        (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                    cells.push([a, b, c]);
                    cells.push([a, c, d]);
                }
            }
        }
        BaseSplit::FourTriangle => {
            for j in 0..ny {
                for i in 0..nx {
                    let center = Point::new(
                        domain.x0 + (i as f64 + 0.5) * dx,
                        domain.y0 + (j as f64 + 0.5) * dy,
                    );
                    let m = vertices.len();
                    vertices.push(center);
                    let (a, b, c, d) =
                        (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                    cells.push([a, b, m]);
                    cells.push([b, c, m]);
                    cells.push([c, d, m]);
                    cells.push([d, a, m]);
                }
            }
        }
    }

    let side_tag = |s: SideSpec, pair: u32| match s {
        SideSpec::Wall => BoundaryTag::Wall,
        SideSpec::Transparent => BoundaryTag::Transparent,
        SideSpec::Inflow => BoundaryTag::Inflow,
        SideSpec::Periodic => BoundaryTag::Periodic(pair),
    };
    let mut boundary_tags = Vec::new();
    for j in 0..ny {
        boundary_tags.push((vid(0, j), vid(0, j + 1), side_tag(bounds.left, 0)));
        boundary_tags.push((vid(nx, j), vid(nx, j + 1), side_tag(bounds.right, 0)));
    }
    for i in 0..nx {
        boundary_tags.push((vid(i, 0), vid(i + 1, 0), side_tag(bounds.bottom, 1)));
        boundary_tags.push((vid(i, ny), vid(i + 1, ny), side_tag(bounds.top, 1)));
    }

    let base = assemble(vertices, cells, boundary_tags, false)?;
    Ok(base.refine_levels(levels))
}

fn assemble(
    vertices: Vec<Point>,
    mut cells: Vec<[usize; 3]>,
    boundary_tags: Vec<(usize, usize, BoundaryTag)>,
    check_hanging_nodes: bool,
) -> Result<Mesh, MeshError> {
    let nv = vertices.len();

    // Validate indices and orientation; normalize to CCW.
    let mut cell_area = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter_mut().enumerate() {
        for &v in cell.iter() {
            if v >= nv {
                return Err(MeshError::VertexOutOfRange { cell: c, vertex: v, num_vertices: nv });
            }
        }
        if cell[0] == cell[1] || cell[1] == cell[2] || cell[0] == cell[2] {
            return Err(MeshError::RepeatedVertex { cell: c, vertex: cell[0] });
        }
        let [p0, p1, p2] = [vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]];
        let twice_area = (p1 - p0).cross(p2 - p0);
        if twice_area == 0.0 {
            return Err(MeshError::DegenerateCell { cell: c });
        }
        if twice_area < 0.0 {
            cell.swap(1, 2);
        }
        cell_area.push(0.5 * twice_area.abs());
    }

    // Collect edges; first incidence fixes the edge index.
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    struct ProtoEdge {
        verts: [usize; 2], // as traversed by the first incident cell
        cells: Vec<(usize, usize)>, // (cell, local edge slot)
    }
    let mut proto: Vec<ProtoEdge> = Vec::new();
    let mut cell_edges = vec![[usize::MAX; 3]; cells.len()];
    for (c, cell) in cells.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (cell[k], cell[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            match edge_index.get(&key) {
                Some(&e) => {
                    if proto[e].cells.len() == 2 {
                        return Err(MeshError::NonConforming { a: key.0, b: key.1 });
                    }
                    proto[e].cells.push((c, k));
                    cell_edges[c][k] = e;
                }
                None => {
                    let e = proto.len();
                    edge_index.insert(key, e);
                    proto.push(ProtoEdge { verts: [a, b], cells: vec![(c, k)] });
                    cell_edges[c][k] = e;
                }
            }
        }
    }

    // Apply boundary tags.
    let mut tag_map: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
    for (a, b, tag) in boundary_tags {
        tag_map.insert((a.min(b), a.max(b)), tag);
    }

    let local_of = |cell: &[usize; 3], v: usize| -> usize {
        cell.iter().position(|&x| x == v).expect("edge endpoint is a cell vertex")
    };

    let mut edges = Vec::with_capacity(proto.len());
    for p in &proto {
        let key = (p.verts[0].min(p.verts[1]), p.verts[0].max(p.verts[1]));
        let (left, right) = match p.cells.as_slice() {
            [(c, _)] => (*c, None),
            [(c1, _), (c2, _)] => (*c1.min(c2), Some(*c1.max(c2))),
            _ => unreachable!(),
        };
        // Orient (a, b) along the left cell's CCW traversal.
        let lc = &cells[left];
        let k = (0..3)
            .find(|&k| {
                let (x, y) = (lc[k], lc[(k + 1) % 3]);
                (x.min(y), x.max(y)) == key
            })
            .expect("left cell contains the edge");
        let (a, b) = (lc[k], lc[(k + 1) % 3]);
        let (pa, pb) = (vertices[a], vertices[b]);
        let t = pb - pa;
        let length = t.norm();
        let normal = t.perp_cw() / length;
        let boundary = match right {
            None => Some(*tag_map.get(&key).unwrap_or(&BoundaryTag::Wall)),
            Some(_) => {
                if tag_map.contains_key(&key) {
                    return Err(MeshError::TagOnNonBoundaryEdge { a: key.0, b: key.1 });
                }
                None
            }
        };
        let left_nodes = [local_of(lc, a), local_of(lc, b)];
        let right_nodes = match right {
            Some(r) => [local_of(&cells[r], a), local_of(&cells[r], b)],
            None => [0, 0],
        };
        edges.push(Edge {
            vertices: [a, b],
            left,
            right,
            normal,
            length,
            boundary,
            left_nodes,
            right_nodes,
            periodic: None,
        });
    }

    if check_hanging_nodes {
        detect_hanging_nodes(&vertices, &edges)?;
    }

    pair_periodic_edges(&vertices, &cells, &mut edges)?;

    let cell_grad = basis_gradient_table(&vertices, &cells, &cell_area);
    let (edge_neighbors, vertex_neighbors) =
        adjacency_tables(nv, &cells, &edges);
    let cfl_radius = cfl_radius_table(&vertices, &cells, &edges, &cell_area);

    Ok(Mesh {
        vertices,
        cells,
        edges,
        cell_edges,
        cell_area,
        cell_grad,
        cfl_radius,
        edge_neighbors,
        vertex_neighbors,
    })
}

/// Rejects vertices lying strictly inside a boundary edge: such a vertex is
/// a hanging node left behind by a non-conforming split.
fn detect_hanging_nodes(vertices: &[Point], edges: &[Edge]) -> Result<(), MeshError> {
    let boundary: Vec<&Edge> = edges.iter().filter(|e| !e.is_interior()).collect();
    if boundary.is_empty() {
        return Ok(());
    }
    // Uniform hash grid over vertices keeps the scan near-linear.
    let cell_size = boundary.iter().map(|e| e.length).fold(0.0f64, f64::max);
    let key = |p: Point| ((p.x / cell_size).floor() as i64, (p.y / cell_size).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (v, &p) in vertices.iter().enumerate() {
        grid.entry(key(p)).or_default().push(v);
    }
    for e in boundary {
        let [a, b] = e.vertices;
        let (pa, pb) = (vertices[a], vertices[b]);
        let tol = 1e-9 * e.length;
        let (kx0, ky0) = key(Point::new(pa.x.min(pb.x) - tol, pa.y.min(pb.y) - tol));
        let (kx1, ky1) = key(Point::new(pa.x.max(pb.x) + tol, pa.y.max(pb.y) + tol));
        for kx in kx0..=kx1 {
            for ky in ky0..=ky1 {
                let Some(bucket) = grid.get(&(kx, ky)) else { continue };
                for &v in bucket {
                    if v == a || v == b {
                        continue;
                    }
                    let p = vertices[v];
                    if dist_point_segment(p, pa, pb) < tol
                        && p.dist(pa) > tol
                        && p.dist(pb) > tol
                    {
                        return Err(MeshError::HangingNode { vertex: v, a, b });
                    }
                }
            }
        }
    }
    Ok(())
}

fn pair_periodic_edges(
    vertices: &[Point],
    cells: &[[usize; 3]],
    edges: &mut [Edge],
) -> Result<(), MeshError> {
    let mut groups: HashMap<u32, Vec<usize>> = HashMap::new();
    for (e, edge) in edges.iter().enumerate() {
        if let Some(BoundaryTag::Periodic(id)) = edge.boundary {
            groups.entry(id).or_default().push(e);
        }
    }
    let scale = {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (hi - lo).norm().max(f64::MIN_POSITIVE)
    };
    let tol = 1e-9 * scale;

    for (id, group) in groups {
        let mut partner = vec![None; group.len()];
        // The pairing translation (period vector) of the group, fixed by the
        // first match up to sign; later pairs must reuse it.
        let mut period: Option<Point> = None;
        for (i, &ei) in group.iter().enumerate() {
            if partner[i].is_some() {
                continue;
            }
            let (ai, bi) = (edges[ei].vertices[0], edges[ei].vertices[1]);
            let (pai, pbi) = (vertices[ai], vertices[bi]);
            let mid_i = pai.midpoint(pbi);
            // Among geometric candidates, the true partner sits at the
            // minimal translation distance: collinear boundary edges of
            // equal length also pass the endpoint test but at larger |t|.
            let mut found: Option<(usize, bool, Point)> = None;
            for (j, &ej) in group.iter().enumerate() {
                if j == i || partner[j].is_some() {
                    continue;
                }
                if (edges[ej].length - edges[ei].length).abs() > tol {
                    continue;
                }
                if edges[ei].normal.dot(edges[ej].normal) > -1.0 + 1e-9 {
                    continue;
                }
                let (aj, bj) = (edges[ej].vertices[0], edges[ej].vertices[1]);
                let (paj, pbj) = (vertices[aj], vertices[bj]);
                let t = paj.midpoint(pbj) - mid_i;
                // The partner lies across the domain, against this edge's
                // outward normal.
                if t.dot(edges[ei].normal) >= 0.0 {
                    continue;
                }
                if let Some(p) = period {
                    if (t - p).norm() > tol && (t + p).norm() > tol {
                        continue;
                    }
                }
                // Translate and match endpoints; order may be reversed.
                let fwd = (pai + t).dist(paj) <= tol && (pbi + t).dist(pbj) <= tol;
                let rev = (pai + t).dist(pbj) <= tol && (pbi + t).dist(paj) <= tol;
                if fwd || rev {
                    let better = match &found {
                        Some((_, _, tb)) => t.norm() < tb.norm(),
                        None => true,
                    };
                    if better {
                        found = Some((j, fwd, t));
                    }
                }
            }
            let Some((j, fwd, t)) = found else {
                return Err(MeshError::PeriodicPairing { pair: id, a: ai, b: bi });
            };
            if period.is_none() {
                period = Some(t);
            }
            partner[i] = Some((j, fwd));
            partner[j] = Some((i, fwd));
        }
        for (i, &ei) in group.iter().enumerate() {
            let (j, fwd) = partner[i].expect("all group edges paired");
            let ej = group[j];
            let pc = edges[ej].left;
            let pcell = &cells[pc];
            let [aj, bj] = edges[ej].vertices;
            let local = |v: usize| pcell.iter().position(|&x| x == v).unwrap();
            let partner_nodes = if fwd {
                [local(aj), local(bj)]
            } else {
                [local(bj), local(aj)]
            };
            edges[ei].periodic = Some(PeriodicLink {
                partner_edge: ej,
                partner_cell: pc,
                partner_nodes,
                primary: ei < ej,
            });
        }
    }
    Ok(())
}

fn basis_gradient_table(
    vertices: &[Point],
    cells: &[[usize; 3]],
    area: &[f64],
) -> Vec<[Point; 3]> {
    cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let p = [vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]];
            let denom = 2.0 * area[c];
            let grad = |j: usize, k: usize| {
                Point::new((p[j].y - p[k].y) / denom, (p[k].x - p[j].x) / denom)
            };
            [grad(1, 2), grad(2, 0), grad(0, 1)]
        })
        .collect()
}

fn adjacency_tables(
    num_vertices: usize,
    cells: &[[usize; 3]],
    edges: &[Edge],
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut edge_neighbors: Vec<Vec<usize>> = vec![Vec::with_capacity(3); cells.len()];
    for edge in edges {
        if let Some(r) = edge.right {
            edge_neighbors[edge.left].push(r);
            edge_neighbors[r].push(edge.left);
        } else if let Some(link) = edge.periodic {
            edge_neighbors[edge.left].push(link.partner_cell);
        }
    }
    for n in &mut edge_neighbors {
        n.sort_unstable();
        n.dedup();
    }

    // Vertices identified across periodic pairs share a representative.
    let mut repr: Vec<usize> = (0..num_vertices).collect();
    fn find(repr: &mut Vec<usize>, v: usize) -> usize {
        if repr[v] != v {
            let root = find(repr, repr[v]);
            repr[v] = root;
            root
        } else {
            v
        }
    }
    for edge in edges {
        if let Some(link) = edge.periodic {
            let partner = &edges[link.partner_edge];
            let [a, b] = edge.vertices;
            let cell = &cells[link.partner_cell];
            let (pa, pb) = (cell[link.partner_nodes[0]], cell[link.partner_nodes[1]]);
            let _ = partner;
            for (x, y) in [(a, pa), (b, pb)] {
                let (rx, ry) = (find(&mut repr, x), find(&mut repr, y));
                if rx != ry {
                    repr[rx.max(ry)] = rx.min(ry);
                }
            }
        }
    }

    let mut class_cells: HashMap<usize, Vec<usize>> = HashMap::new();
    for (c, cell) in cells.iter().enumerate() {
        for &v in cell {
            class_cells.entry(find(&mut repr, v)).or_default().push(c);
        }
    }
    let vertex_neighbors = cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let mut n: Vec<usize> = cell
                .iter()
                .flat_map(|&v| class_cells[&find(&mut repr, v)].iter().copied())
                .filter(|&x| x != c)
                .collect();
            n.sort_unstable();
            n.dedup();
            n
        })
        .collect();

    (edge_neighbors, vertex_neighbors)
}

fn cfl_radius_table(
    vertices: &[Point],
    cells: &[[usize; 3]],
    edges: &[Edge],
    area: &[f64],
) -> Vec<f64> {
    let mut on_boundary = vec![false; vertices.len()];
    for edge in edges {
        if !edge.is_interior() {
            on_boundary[edge.vertices[0]] = true;
            on_boundary[edge.vertices[1]] = true;
        }
    }
    let mut vertex_cells: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (c, cell) in cells.iter().enumerate() {
        for &v in cell {
            vertex_cells[v].push(c);
        }
    }
    // Largest circle centered at an interior vertex inside its triangle fan:
    // the fan boundary consists of the opposite edges of the incident cells.
    let mut rho = vec![f64::INFINITY; vertices.len()];
    for v in 0..vertices.len() {
        if on_boundary[v] {
            continue;
        }
        let p = vertices[v];
        for &c in &vertex_cells[v] {
            let cell = cells[c];
            let others: Vec<usize> = cell.iter().copied().filter(|&x| x != v).collect();
            let d = dist_point_segment(p, vertices[others[0]], vertices[others[1]]);
            rho[v] = rho[v].min(d);
        }
    }
    cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let patch = cell
                .iter()
                .filter(|&&v| !on_boundary[v])
                .map(|&v| rho[v])
                .fold(f64::INFINITY, f64::min);
            if patch.is_finite() {
                patch
            } else {
                // All vertices on the boundary: fall back to the inradius.
                let [p0, p1, p2] = [vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]];
                let s = 0.5 * (p0.dist(p1) + p1.dist(p2) + p2.dist(p0));
                area[c] / s
            }
        })
        .collect()
}
