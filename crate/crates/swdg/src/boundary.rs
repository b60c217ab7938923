//! Ghost states for the non-periodic boundary conditions.
//!
//! Walls reflect the normal momentum component, transparent boundaries copy
//! the interior trace, and inflow boundaries prescribe a depth time series
//! together with the velocity of a right-going simple wave,
//! |u| = 2 (sqrt(g h) - sqrt(g h0)), directed into the domain. Periodic
//! edges never reach this module; the mesh pairs them geometrically.

use crate::geom::Point;
use crate::mesh::BoundaryTag;
use crate::state::State;

/// Prescribed depth signal at an inflow boundary.
#[derive(Clone, Debug)]
pub enum InflowSignal {
    Constant {
        h: f64,
    },
    /// Solitary-wave pulse h(t) = d + a / cosh²(k (t - t0)).
    SolitaryPulse {
        d: f64,
        a: f64,
        k: f64,
        t0: f64,
    },
    /// Piecewise-linear table, clamped at both ends. Times strictly
    /// increasing.
    Table {
        times: Vec<f64>,
        depths: Vec<f64>,
    },
}

#[derive(Clone, Debug)]
pub struct Inflow {
    /// Rest depth h0 the simple-wave velocity is measured against.
    pub rest_depth: f64,
    pub signal: InflowSignal,
}

impl Inflow {
    pub fn depth(&self, t: f64) -> f64 {
        match &self.signal {
            InflowSignal::Constant { h } => *h,
            InflowSignal::SolitaryPulse { d, a, k, t0 } => {
                let c = (k * (t - t0)).cosh();
                d + a / (c * c)
            }
            InflowSignal::Table { times, depths } => {
                if times.is_empty() {
                    return self.rest_depth;
                }
                match times.partition_point(|&x| x <= t) {
                    0 => depths[0],
                    i if i == times.len() => depths[times.len() - 1],
                    i => {
                        let (t0, t1) = (times[i - 1], times[i]);
                        let w = (t - t0) / (t1 - t0);
                        depths[i - 1] * (1.0 - w) + depths[i] * w
                    }
                }
            }
        }
    }
}

/// Exterior trace for a boundary edge with outward unit normal `n`.
///
/// Inflow edges need an `Inflow`; the caller guarantees one is present
/// (checked once per run, not per quadrature point).
pub fn ghost_state(
    tag: BoundaryTag,
    interior: &State,
    n: Point,
    t: f64,
    inflow: Option<&Inflow>,
    g: f64,
) -> State {
    match tag {
        BoundaryTag::Wall => {
            let mn = interior.hu * n.x + interior.hv * n.y;
            State::new(
                interior.h,
                interior.hu - 2.0 * mn * n.x,
                interior.hv - 2.0 * mn * n.y,
            )
        }
        BoundaryTag::Transparent => *interior,
        BoundaryTag::Inflow => {
            let spec = inflow.expect("inflow edges are validated before assembly");
            let h = spec.depth(t);
            let speed = 2.0 * ((g * h).sqrt() - (g * spec.rest_depth).sqrt());
            // Into the domain: along -n.
            State::new(h, -h * speed * n.x, -h * speed * n.y)
        }
        BoundaryTag::Periodic(_) => {
            unreachable!("periodic edges are resolved by mesh pairing")
        }
    }
}
