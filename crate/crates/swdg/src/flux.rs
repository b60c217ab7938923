//! Shallow water flux functions: the physical flux tensor and the Rusanov
//! (local Lax-Friedrichs) numeric flux.
//!
//! With U = (h, hu, hv) the flux tensor is
//!
//! ```text
//! F(U) = [ hu                hv              ]
//!        [ hu·u + (g/2)h²    hu·v            ]
//!        [ hv·u              hv·v + (g/2)h²  ]
//! ```
//!
//! Velocities follow the dry-state convention: u = hu/h when h is at least
//! the wet tolerance, zero otherwise, and the flux rows are built from
//! those velocities (mass row h·u, advective momentum rows m·u). The whole
//! advective part therefore vanishes on dry states while the hydrostatic
//! pressure part remains; in particular no mass is exchanged through an
//! effectively dry interface, which is what keeps cell means nonnegative
//! under the usual Courant restriction.

use crate::geom::Point;
use crate::state::State;

/// Columns of the flux tensor: `fx` is the flux in the x direction,
/// `fy` in the y direction, each ordered (mass, x-momentum, y-momentum).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxTensor {
    pub fx: State,
    pub fy: State,
}

/// Velocity with the dry-state convention.
#[inline]
pub fn velocity(u: &State, tol_wet: f64) -> (f64, f64) {
    if u.h >= tol_wet {
        (u.hu / u.h, u.hv / u.h)
    } else {
        (0.0, 0.0)
    }
}

/// Physical flux tensor F(U).
#[inline]
pub fn physical_flux(u: &State, g: f64, tol_wet: f64) -> FluxTensor {
    let (vx, vy) = velocity(u, tol_wet);
    let p = 0.5 * g * u.h * u.h;
    FluxTensor {
        fx: State::new(u.h * vx, u.hu * vx + p, u.hv * vx),
        fy: State::new(u.h * vy, u.hu * vy, u.hv * vy + p),
    }
}

/// F(U) · n for a unit normal n.
#[inline]
pub fn normal_flux(u: &State, n: Point, g: f64, tol_wet: f64) -> State {
    let f = physical_flux(u, g, tol_wet);
    f.fx * n.x + f.fy * n.y
}

/// Wave speed estimate |u · n| + sqrt(g h) with the dry-state convention.
#[inline]
pub fn wave_speed_normal(u: &State, n: Point, g: f64, tol_wet: f64) -> f64 {
    let (vx, vy) = velocity(u, tol_wet);
    (vx * n.x + vy * n.y).abs() + (g * u.h.max(0.0)).sqrt()
}

/// Rusanov numeric flux through a unit normal, per unit edge length:
/// F*·n = ½(F(U⁻) + F(U⁺))·n − (λ/2)(U⁺ − U⁻),
/// λ = max of |u·n| + sqrt(g h) over both sides.
/// Returns the flux and λ (the stepper's Courant estimate reuses it).
#[inline]
pub fn rusanov(minus: &State, plus: &State, n: Point, g: f64, tol_wet: f64) -> (State, f64) {
    let lambda = wave_speed_normal(minus, n, g, tol_wet)
        .max(wave_speed_normal(plus, n, g, tol_wet));
    let fm = normal_flux(minus, n, g, tol_wet);
    let fp = normal_flux(plus, n, g, tol_wet);
    let flux = (fm + fp) * 0.5 - (*plus - *minus) * (0.5 * lambda);
    (flux, lambda)
}
