//! Quadrature rules for P1 triangular elements.
//!
//! Volume integrals use the three edge-midpoint rule with equal weights
//! A/3, exact for polynomials up to degree 2. That covers every volume term
//! of the scheme: products of a P1 flux component with a constant basis
//! gradient are at most quadratic.
//!
//! Edge integrals use the two-point Gauss-Legendre rule on the unit
//! interval, exact up to degree 3, which is enough for the product of two
//! linear traces against a linear basis restriction.

/// Barycentric coordinates of the three edge midpoints. Point `k` is the
/// midpoint of the edge connecting local vertices `k` and `(k + 1) % 3`.
pub const VOLUME_POINTS: [[f64; 3]; 3] = [
    [0.5, 0.5, 0.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
];

/// Volume weights as fractions of the cell area.
pub const VOLUME_WEIGHT: f64 = 1.0 / 3.0;

/// Gauss-Legendre abscissae on [0, 1].
pub const EDGE_POINTS: [f64; 2] = [
    0.5 - 0.5 / 1.732_050_807_568_877_2, // 1/2 - 1/(2 sqrt 3)
    0.5 + 0.5 / 1.732_050_807_568_877_2,
];

/// Edge weights as fractions of the edge length.
pub const EDGE_WEIGHT: f64 = 0.5;

/// Interpolates nodal values to volume quadrature point `q`: the midpoint
/// of local edge `q`, i.e. the average of its endpoint values.
#[inline]
pub fn volume_value(nodal: &[f64; 3], q: usize) -> f64 {
    0.5 * (nodal[q] + nodal[(q + 1) % 3])
}

/// Value of local basis function `j` at volume quadrature point `q`.
#[inline]
pub fn volume_basis(j: usize, q: usize) -> f64 {
    VOLUME_POINTS[q][j]
}
