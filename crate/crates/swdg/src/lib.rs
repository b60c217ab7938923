//! A second-order Runge-Kutta discontinuous Galerkin (RKDG) solver for the
//! two-dimensional shallow water equations on triangular meshes, with a
//! limiter-based treatment of wetting and drying.

pub mod boundary;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod flux;
pub mod geom;
pub mod limiter;
pub mod mesh;
pub mod output;
pub mod quadrature;
pub mod rhs;
pub mod runner;
pub mod scenario;
pub mod state;
pub mod stepper;
pub mod wetdry;

/// Standard gravity in m/s².
pub const GRAVITY: f64 = 9.80616;
