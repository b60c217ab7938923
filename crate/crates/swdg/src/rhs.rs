//! Assembly of the semi-discrete right-hand side dU/dt for the P1 RKDG
//! scheme, in the weak or the strong DG formulation.
//!
//! Weak form, per cell and test function φ:
//!
//! ```text
//! M dU/dt = ∫ F(U) · ∇φ dx - ∮ F*(U⁻, U⁺) · n φ dσ + ∫ S φ dx
//! ```
//!
//! Strong form (integrating by parts once more):
//!
//! ```text
//! M dU/dt = -∫ (∇·F) φ dx - ∮ (F* - F(U⁻)) · n φ dσ + ∫ S φ dx
//! ```
//!
//! with S = (0, -g h ∂x b, -g h ∂y b). The in-cell divergence uses the
//! identity ∇·((g/2) h² I) = g h ∇h, valid because h is polynomial inside a
//! cell, and the chain rule on the advective part m ⊗ m / h.
//!
//! Gravity-suppressed cells (see `wetdry`) are updated as if g were zero:
//! the pressure and source volume terms are dropped, and the cell's copy of
//! every edge flux is rebuilt without the pressure columns (keeping the
//! shared wave speed, so the mass row both sides exchange stays bitwise
//! identical and conservation is exact). Without the edge part a neighbor's
//! hydrostatic load would keep pumping momentum into a thin film that has
//! no pressure gradient of its own left to answer with, and the film would
//! accelerate without bound instead of sitting still on the slope.
//!
//! Edge quadrature evaluates both traces from the two nodal values of the
//! shared edge endpoints on each side. Continuous data therefore produces
//! bitwise-identical traces from both cells, and the single Rusanov flux
//! evaluated per edge is scattered with opposite signs, so the mass
//! exchange between two cells cancels exactly, not just to round-off.

use crate::boundary::{ghost_state, Inflow};
use crate::error::SolverError;
use crate::flux::{normal_flux, rusanov, velocity};
use crate::geom::Point;
use crate::mesh::{BoundaryTag, Mesh};
use crate::quadrature::{volume_basis, volume_value, EDGE_POINTS, EDGE_WEIGHT, VOLUME_WEIGHT};
use crate::state::{CellField, ScalarField, State};
use crate::wetdry::WetDryFlags;

/// Which DG formulation assembles the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgForm {
    Weak,
    Strong,
}

/// Boundary-condition context for one assembly pass.
#[derive(Clone, Copy, Debug, Default)]
pub struct BcContext<'a> {
    pub inflow: Option<&'a Inflow>,
}

/// Interpolates the two-endpoint trace at edge parameter ξ.
#[inline]
fn edge_trace(cell: &crate::state::CellNodal, nodes: [usize; 2], xi: f64) -> State {
    let a = cell.node(nodes[0]);
    let b = cell.node(nodes[1]);
    State::new(
        a.h + xi * (b.h - a.h),
        a.hu + xi * (b.hu - a.hu),
        a.hv + xi * (b.hv - a.hv),
    )
}

/// Nodal momentum with the velocity convention already applied: the raw
/// value where the node is wet, zero where its depth falls below the
/// threshold. This is the field the strong-form mass row transports.
#[inline]
fn suppressed_momentum(cell: &crate::state::CellNodal, tol: f64) -> ([f64; 3], [f64; 3]) {
    let mut mx = [0.0; 3];
    let mut my = [0.0; 3];
    for j in 0..3 {
        if cell.h[j] >= tol {
            mx[j] = cell.hu[j];
            my[j] = cell.hv[j];
        }
    }
    (mx, my)
}

/// Normal component of the suppressed momentum trace at edge parameter ξ,
/// interpolated from the same nodal values as `suppressed_momentum` so the
/// consistency term cancels the volume divergence exactly.
#[inline]
fn suppressed_normal_momentum(
    cell: &crate::state::CellNodal,
    nodes: [usize; 2],
    xi: f64,
    n: Point,
    tol: f64,
) -> f64 {
    let pick = |j: usize| -> (f64, f64) {
        if cell.h[j] >= tol {
            (cell.hu[j], cell.hv[j])
        } else {
            (0.0, 0.0)
        }
    };
    let a = pick(nodes[0]);
    let b = pick(nodes[1]);
    let mx = a.0 + xi * (b.0 - a.0);
    let my = a.1 + xi * (b.1 - a.1);
    mx * n.x + my * n.y
}

/// Assembles dU/dt into `out` (overwritten). `t` is the stage time used for
/// time-dependent boundary data.
#[allow(clippy::too_many_arguments)]
pub fn compute_rhs(
    field: &CellField,
    bathy: &ScalarField,
    mesh: &Mesh,
    flags: &WetDryFlags,
    form: DgForm,
    g: f64,
    tol_wet: f64,
    t: f64,
    bc: &BcContext,
    out: &mut CellField,
) -> Result<(), SolverError> {
    let n = mesh.num_cells();
    if field.num_cells() != n || bathy.num_cells() != n {
        return Err(SolverError::DimensionMismatch {
            field_cells: field.num_cells(),
            mesh_cells: n,
        });
    }
    if flags.class.len() != n {
        return Err(SolverError::DimensionMismatch { field_cells: flags.class.len(), mesh_cells: n });
    }
    if out.num_cells() != n {
        out.cells.resize(n, Default::default());
    }
    for cell in &mut out.cells {
        *cell = Default::default();
    }

    // Volume terms.
    for c in 0..n {
        let cell = &field.cells[c];
        let b = &bathy.cells[c];
        let grad = mesh.basis_gradients(c);
        let area = mesh.area(c);
        let w = area * VOLUME_WEIGHT;
        let gravity = !flags.gravity_off(c);
        let r = &mut out.cells[c];

        match form {
            DgForm::Weak => {
                for q in 0..3 {
                    let u = State::new(
                        volume_value(&cell.h, q),
                        volume_value(&cell.hu, q),
                        volume_value(&cell.hv, q),
                    );
                    let (vx, vy) = velocity(&u, tol_wet);
                    // Advective columns; pressure added only under gravity.
                    let mut fx = State::new(u.h * vx, u.hu * vx, u.hv * vx);
                    let mut fy = State::new(u.h * vy, u.hu * vy, u.hv * vy);
                    if gravity {
                        let p = 0.5 * g * u.h * u.h;
                        fx.hu += p;
                        fy.hv += p;
                    }
                    for j in 0..3 {
                        let gj = grad[j];
                        r.h[j] += w * (fx.h * gj.x + fy.h * gj.y);
                        r.hu[j] += w * (fx.hu * gj.x + fy.hu * gj.y);
                        r.hv[j] += w * (fx.hv * gj.x + fy.hv * gj.y);
                    }
                }
            }
            DgForm::Strong => {
                // Gradients of the linear nodal fields are cell constants.
                let gh = nodal_gradient(&cell.h, grad);
                let gmx = nodal_gradient(&cell.hu, grad);
                let gmy = nodal_gradient(&cell.hv, grad);
                // The mass row transports the suppressed momentum h·ṽ, the
                // same field the consistency flux traces, so the two terms
                // telescope by the divergence theorem and momentum stranded
                // at sub-threshold nodes cannot masquerade as mass flow.
                let (msx, msy) = suppressed_momentum(cell, tol_wet);
                let gsx = nodal_gradient(&msx, grad);
                let gsy = nodal_gradient(&msy, grad);
                let div_mass = gsx.x + gsy.y;
                for q in 0..3 {
                    let hq = volume_value(&cell.h, q);
                    let u = State::new(hq, volume_value(&cell.hu, q), volume_value(&cell.hv, q));
                    let (vx, vy) = velocity(&u, tol_wet);
                    // Chain rule on m ⊗ m / h; every term carries a
                    // velocity factor, so dry points contribute nothing.
                    let mut div_x = 2.0 * vx * gmx.x - vx * vx * gh.x
                        + vy * gmx.y + vx * gmy.y - vx * vy * gh.y;
                    let mut div_y = vx * gmy.x + vy * gmx.x - vx * vy * gh.x
                        + 2.0 * vy * gmy.y - vy * vy * gh.y;
                    if gravity {
                        div_x += g * hq * gh.x;
                        div_y += g * hq * gh.y;
                    }
                    for j in 0..3 {
                        let phi = volume_basis(j, q);
                        r.h[j] -= w * phi * div_mass;
                        r.hu[j] -= w * phi * div_x;
                        r.hv[j] -= w * phi * div_y;
                    }
                }
            }
        }

        if gravity {
            let gb = nodal_gradient(b, grad);
            for q in 0..3 {
                let hq = volume_value(&cell.h, q);
                for j in 0..3 {
                    let phi = volume_basis(j, q);
                    r.hu[j] -= w * phi * g * hq * gb.x;
                    r.hv[j] -= w * phi * g * hq * gb.y;
                }
            }
        }
    }

    // Edge terms. Each geometric interface is visited exactly once; the
    // accumulated endpoint contributions are scattered to both sides.
    for (e, edge) in mesh.edges().iter().enumerate() {
        let (right_cell, right_nodes) = match (edge.right, edge.periodic) {
            (Some(rc), _) => (Some(rc), edge.right_nodes),
            (None, Some(link)) => {
                if !link.primary {
                    continue;
                }
                (Some(link.partner_cell), link.partner_nodes)
            }
            (None, None) => (None, [0, 0]),
        };
        let left = &field.cells[edge.left];
        let n_out = edge.normal;
        let w = EDGE_WEIGHT * edge.length;

        // Traces and the shared numeric flux at both quadrature points.
        let mut minus = [State::ZERO; 2];
        let mut plus = [State::ZERO; 2];
        let mut star = [State::ZERO; 2];
        let mut lam = [0.0f64; 2];
        for (k, &xi) in EDGE_POINTS.iter().enumerate() {
            minus[k] = edge_trace(left, edge.left_nodes, xi);
            plus[k] = match right_cell {
                Some(rc) => edge_trace(&field.cells[rc], right_nodes, xi),
                None => {
                    let tag = edge.boundary.expect("non-interior edge carries a tag");
                    if tag == BoundaryTag::Inflow && bc.inflow.is_none() {
                        return Err(SolverError::MissingInflowSpec { edge: e });
                    }
                    ghost_state(tag, &minus[k], n_out, t, bc.inflow, g)
                }
            };
            (star[k], lam[k]) = rusanov(&minus[k], &plus[k], n_out, g, tol_wet);
        }
        let goff_left = flags.gravity_off(edge.left);
        let goff_right = right_cell.map_or(false, |rc| flags.gravity_off(rc));

        // A gravity-suppressed cell must not feel any hydrostatic load, its
        // own or the neighbor's: its copy of the numeric flux is rebuilt
        // without the pressure columns but with the shared wave speed, so
        // the mass row (which carries no pressure) stays bitwise identical
        // on both sides and conservation is untouched. Only the momentum
        // exchange across such an interface becomes one-sided, the
        // difference being the reaction of the bottom that holds the thin
        // film in place.
        let mut star_off = star;
        if goff_left || goff_right {
            for k in 0..2 {
                let fm = normal_flux(&minus[k], n_out, 0.0, tol_wet);
                let fp = normal_flux(&plus[k], n_out, 0.0, tol_wet);
                star_off[k] = (fm + fp) * 0.5 - (plus[k] - minus[k]) * (0.5 * lam[k]);
            }
        }

        // Endpoint accumulators: φ_a = 1 - ξ, φ_b = ξ on the edge.
        let accumulate = |f: &[State; 2]| {
            (
                (f[0] * (1.0 - EDGE_POINTS[0]) + f[1] * (1.0 - EDGE_POINTS[1])) * w,
                (f[0] * EDGE_POINTS[0] + f[1] * EDGE_POINTS[1]) * w,
            )
        };
        let (sa, sb) = accumulate(&star);
        let (oa, ob) = accumulate(&star_off);

        match form {
            DgForm::Weak => {
                let (da, db) = if goff_left { (oa, ob) } else { (sa, sb) };
                sub_node(&mut out.cells[edge.left], edge.left_nodes[0], da);
                sub_node(&mut out.cells[edge.left], edge.left_nodes[1], db);

                if let Some(rc) = right_cell {
                    let (da, db) = if goff_right { (oa, ob) } else { (sa, sb) };
                    add_node(&mut out.cells[rc], right_nodes[0], da);
                    add_node(&mut out.cells[rc], right_nodes[1], db);
                }
            }
            DgForm::Strong => {
                let g_left = if goff_left { 0.0 } else { g };
                let fm = [
                    consistency_flux(&minus[0], n_out, g_left, tol_wet),
                    consistency_flux(&minus[1], n_out, g_left, tol_wet),
                ];
                let (ca, cb) = accumulate(&fm);
                let (da, db) = if goff_left { (oa, ob) } else { (sa, sb) };
                sub_node(&mut out.cells[edge.left], edge.left_nodes[0], da - ca);
                sub_node(&mut out.cells[edge.left], edge.left_nodes[1], db - cb);

                if let Some(rc) = right_cell {
                    let g_right = if goff_right { 0.0 } else { g };
                    let fp = [
                        consistency_flux(&plus[0], n_out, g_right, tol_wet),
                        consistency_flux(&plus[1], n_out, g_right, tol_wet),
                    ];
                    let (ca, cb) = accumulate(&fp);
                    let (da, db) = if goff_right { (oa, ob) } else { (sa, sb) };
                    add_node(&mut out.cells[rc], right_nodes[0], da - ca);
                    add_node(&mut out.cells[rc], right_nodes[1], db - cb);
                }
            }
        }
    }

    // Invert the local P1 mass matrix: with M = (A/12) [[2,1,1],[1,2,1],
    // [1,1,2]], the inverse action is (3/A) (3 r_j - r_k - r_l).
    for c in 0..n {
        let inv = 3.0 / mesh.area(c);
        let r = &mut out.cells[c];
        r.h = mass_inverse(r.h, inv);
        r.hu = mass_inverse(r.hu, inv);
        r.hv = mass_inverse(r.hv, inv);
    }
    Ok(())
}

#[inline]
fn mass_inverse(r: [f64; 3], inv: f64) -> [f64; 3] {
    [
        inv * (3.0 * r[0] - r[1] - r[2]),
        inv * (3.0 * r[1] - r[2] - r[0]),
        inv * (3.0 * r[2] - r[0] - r[1]),
    ]
}

#[inline]
fn nodal_gradient(v: &[f64; 3], grad: &[Point; 3]) -> Point {
    Point::new(
        v[0] * grad[0].x + v[1] * grad[1].x + v[2] * grad[2].x,
        v[0] * grad[0].y + v[1] * grad[1].y + v[2] * grad[2].y,
    )
}

/// One-sided flux for the strong-form consistency term. The momentum rows
/// follow the dry-state flux convention; the mass row uses the raw trace
/// momentum so that, summed over the cell boundary, it cancels the volume
/// term's exact divergence ∇·m by the divergence theorem. Sampling the
/// velocity convention instead would leave an O(TOL_wet) mass defect on
/// every partially dry cell and visibly break global conservation.
#[inline]
fn consistency_flux(trace: &State, n: Point, g: f64, tol_wet: f64) -> State {
    let f = normal_flux(trace, n, g, tol_wet);
    State::new(trace.hu * n.x + trace.hv * n.y, f.hu, f.hv)
}

#[inline]
fn sub_node(cell: &mut crate::state::CellNodal, j: usize, s: State) {
    cell.h[j] -= s.h;
    cell.hu[j] -= s.hu;
    cell.hv[j] -= s.hv;
}

#[inline]
fn add_node(cell: &mut crate::state::CellNodal, j: usize, s: State) {
    cell.h[j] += s.h;
    cell.hu[j] += s.hu;
    cell.hv[j] += s.hv;
}
