//! Benchmark scenario definitions: domains, bathymetries, initial data,
//! boundary setups, reference solutions where closed forms exist, and the
//! per-scenario numerical defaults (mesh, step size, wet tolerance).
//!
//! All scenarios share g = 9.80616 and build their discrete initial state
//! by interpolating the analytic fields at mesh vertices.

use crate::boundary::{Inflow, InflowSignal};
use crate::error::MeshError;
use crate::geom::Point;
use crate::mesh::{build_uniform_mesh, BaseSplit, BoundarySpec, Mesh, Rect, SideSpec};
use crate::state::{CellField, ScalarField, State};
use crate::GRAVITY;

/// Incident-wave variant for the conical island runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IslandCase {
    A,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Still lake over a partially emerged parabolic mountain, periodic box.
    LakeAtRest1,
    /// Still lake over four-step terraced bathymetry, periodic box.
    LakeAtRest2,
    /// N-wave runup on a plane beach sloping into deep water.
    SlopingBeach,
    /// Radially symmetric oscillation in a paraboloid basin (closed form).
    ThackerRadial,
    /// Rotating planar surface in a paraboloid basin (closed form).
    ThackerPlanar,
    /// Solitary wave around a conical island, driven by an inflow boundary.
    ConicalIsland(IslandCase),
}

/// Mesh recipe: the base grid plus uniform refinement depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
    pub split: BaseSplit,
    pub levels: u32,
}

// Thacker radial basin parameters.
const RAD_H0: f64 = 1.0;
const RAD_R0: f64 = 2000.0;
const RAD_A: f64 = 2500.0;

// Conical island geometry and incident-wave rest depth.
const ISLAND_CENTER: Point = Point { x: 12.96, y: 13.8 };
const ISLAND_H0: f64 = 0.32;

// Plane-beach N-wave shape parameters (dimensionless).
const BEACH_A1: f64 = 0.006;
const BEACH_A2: f64 = 0.018;
const BEACH_K1: f64 = 0.4444;
const BEACH_K2: f64 = 4.0;
const BEACH_X1: f64 = 4.1209;
const BEACH_X2: f64 = 1.6384;
const BEACH_L: f64 = 5000.0;
const BEACH_SLOPE: f64 = 0.1;
const BEACH_REST: f64 = 5000.0;

/// Interior shape factor of the radial basin oscillation.
pub fn radial_amplitude() -> f64 {
    let a4 = RAD_A.powi(4);
    let r4 = RAD_R0.powi(4);
    (a4 - r4) / (a4 + r4)
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::LakeAtRest1,
        Scenario::LakeAtRest2,
        Scenario::SlopingBeach,
        Scenario::ThackerRadial,
        Scenario::ThackerPlanar,
        Scenario::ConicalIsland(IslandCase::A),
        Scenario::ConicalIsland(IslandCase::C),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::LakeAtRest1 => "lake_at_rest_1",
            Scenario::LakeAtRest2 => "lake_at_rest_2",
            Scenario::SlopingBeach => "sloping_beach",
            Scenario::ThackerRadial => "thacker_radial",
            Scenario::ThackerPlanar => "thacker_planar",
            Scenario::ConicalIsland(IslandCase::A) => "conical_island_a",
            Scenario::ConicalIsland(IslandCase::C) => "conical_island_c",
        }
    }

    pub fn parse(name: &str) -> Option<Scenario> {
        Scenario::ALL.iter().copied().find(|s| s.name() == name)
    }

    pub fn domain(&self) -> Rect {
        match self {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => Rect::new(0.0, 0.0, 1.0, 1.0),
            Scenario::SlopingBeach => Rect::new(-400.0, 0.0, 50_000.0, 400.0),
            Scenario::ThackerRadial => Rect::new(-4000.0, -4000.0, 4000.0, 4000.0),
            Scenario::ThackerPlanar => Rect::new(-2.0, -2.0, 2.0, 2.0),
            Scenario::ConicalIsland(_) => Rect::new(0.0, 0.0, 25.92, 27.60),
        }
    }

    pub fn bathymetry(&self, p: Point) -> f64 {
        match self {
            Scenario::LakeAtRest1 => {
                let dx = p.x - 0.5;
                let dy = p.y - 0.5;
                (0.25 - 5.0 * (dx * dx + dy * dy)).max(0.0)
            }
            Scenario::LakeAtRest2 => {
                let d1 = p.dist(Point::new(0.35, 0.65));
                let d2 = p.dist(Point::new(0.55, 0.45));
                let in3 = (p.x - 0.47).abs() < 0.25 && (p.y - 0.55).abs() < 0.25;
                let d4 = p.dist(Point::new(0.5, 0.5));
                if d1 < 0.1 {
                    0.15
                } else if d2 < 0.1 {
                    0.05
                } else if in3 {
                    0.07
                } else if d4 < 0.45 {
                    0.03
                } else {
                    0.0
                }
            }
            Scenario::SlopingBeach => BEACH_REST - BEACH_SLOPE * p.x,
            Scenario::ThackerRadial => {
                let r2 = p.x * p.x + p.y * p.y;
                RAD_H0 * r2 / (RAD_A * RAD_A)
            }
            Scenario::ThackerPlanar => 0.1 * (p.x * p.x + p.y * p.y),
            Scenario::ConicalIsland(_) => {
                let r = p.dist(ISLAND_CENTER);
                if r <= 1.1 {
                    0.625
                } else if r <= 3.6 {
                    (3.6 - r) / 4.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Initial conserved state at a point (velocities already folded in).
    pub fn initial(&self, p: Point) -> State {
        match self {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => {
                State::new((0.1 - self.bathymetry(p)).max(0.0), 0.0, 0.0)
            }
            Scenario::SlopingBeach => {
                let eta = beach_displacement(p.x);
                State::new((BEACH_SLOPE * p.x + eta).max(0.0), 0.0, 0.0)
            }
            Scenario::ThackerRadial | Scenario::ThackerPlanar => {
                self.exact(p, 0.0).expect("closed-form scenario")
            }
            Scenario::ConicalIsland(_) => {
                State::new((ISLAND_H0 - self.bathymetry(p)).max(0.0), 0.0, 0.0)
            }
        }
    }

    /// Closed-form solution where one exists (the two basin flows).
    pub fn exact(&self, p: Point, t: f64) -> Option<State> {
        match self {
            Scenario::ThackerRadial => {
                let amp = radial_amplitude();
                let omega = self.angular_frequency().unwrap();
                let d = 1.0 - amp * (omega * t).cos();
                let r2 = p.x * p.x + p.y * p.y;
                let one_m_a2 = 1.0 - amp * amp;
                let h = RAD_H0
                    * (one_m_a2.sqrt() / d - r2 * one_m_a2 / (RAD_A * RAD_A * d * d));
                if h > 0.0 {
                    let vel = omega * amp * (omega * t).sin() / (2.0 * d);
                    Some(State::new(h, h * vel * p.x, h * vel * p.y))
                } else {
                    Some(State::ZERO)
                }
            }
            Scenario::ThackerPlanar => {
                let omega = self.angular_frequency().unwrap();
                let (s, c) = (omega * t).sin_cos();
                let h = 0.1 * (p.x * c + p.y * s + 0.75) - self.bathymetry(p);
                if h > 0.0 {
                    let (u, v) = (-0.5 * omega * s, 0.5 * omega * c);
                    Some(State::new(h, h * u, h * v))
                } else {
                    Some(State::ZERO)
                }
            }
            _ => None,
        }
    }

    pub fn has_exact(&self) -> bool {
        matches!(self, Scenario::ThackerRadial | Scenario::ThackerPlanar)
    }

    pub fn angular_frequency(&self) -> Option<f64> {
        match self {
            Scenario::ThackerRadial => Some((8.0 * GRAVITY * RAD_H0).sqrt() / RAD_A),
            Scenario::ThackerPlanar => Some((0.2 * GRAVITY).sqrt()),
            _ => None,
        }
    }

    /// Oscillation period of the closed-form basin flows.
    pub fn period(&self) -> Option<f64> {
        self.angular_frequency().map(|w| 2.0 * std::f64::consts::PI / w)
    }

    pub fn boundary(&self) -> BoundarySpec {
        match self {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => BoundarySpec::periodic(),
            Scenario::SlopingBeach => BoundarySpec {
                left: SideSpec::Wall,
                right: SideSpec::Transparent,
                bottom: SideSpec::Periodic,
                top: SideSpec::Periodic,
            },
            Scenario::ThackerRadial | Scenario::ThackerPlanar => BoundarySpec::walls(),
            Scenario::ConicalIsland(_) => BoundarySpec {
                left: SideSpec::Inflow,
                right: SideSpec::Transparent,
                bottom: SideSpec::Wall,
                top: SideSpec::Wall,
            },
        }
    }

    /// Inflow forcing, for scenarios driven through a boundary.
    pub fn inflow(&self) -> Option<Inflow> {
        match self {
            Scenario::ConicalIsland(case) => {
                let (a, t_shift, x0) = match case {
                    IslandCase::A => (0.014, 8.85, 5.76),
                    IslandCase::C => (0.057, 7.77, 7.56),
                };
                let k = (3.0 * a / (4.0 * ISLAND_H0.powi(3))).sqrt();
                let c = (GRAVITY * ISLAND_H0).sqrt() * (1.0 + a / (2.0 * ISLAND_H0));
                // h(t) = h0 + a sech²(K(cT - ct - x0)) peaks at t = T - x0/c
                // with temporal steepness Kc.
                Some(Inflow {
                    rest_depth: ISLAND_H0,
                    signal: InflowSignal::SolitaryPulse {
                        d: ISLAND_H0,
                        a,
                        k: k * c,
                        t0: t_shift - x0 / c,
                    },
                })
            }
            _ => None,
        }
    }

    /// Undisturbed free-surface level, used to report gauge elevations.
    pub fn rest_level(&self) -> f64 {
        match self {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => 0.1,
            Scenario::SlopingBeach => BEACH_REST,
            Scenario::ThackerRadial => RAD_H0,
            Scenario::ThackerPlanar => 0.075,
            Scenario::ConicalIsland(_) => ISLAND_H0,
        }
    }

    pub fn default_mesh_spec(&self) -> MeshSpec {
        match self {
            // Right triangles with legs 1/(16·√2) ≈ 0.044.
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => {
                MeshSpec { nx: 16, ny: 16, split: BaseSplit::FourTriangle, levels: 0 }
            }
            // 400 m base squares refined thrice: 50 m legs.
            Scenario::SlopingBeach => {
                MeshSpec { nx: 126, ny: 1, split: BaseSplit::TwoTriangle, levels: 3 }
            }
            // 125 m squares, legs 125/√2 ≈ 88.4.
            Scenario::ThackerRadial => {
                MeshSpec { nx: 64, ny: 64, split: BaseSplit::FourTriangle, levels: 0 }
            }
            // 8192 cells, legs 0.0625.
            Scenario::ThackerPlanar => {
                MeshSpec { nx: 32, ny: 32, split: BaseSplit::TwoTriangle, levels: 1 }
            }
            // Desk-scale island grid, squares of roughly 0.41 m.
            Scenario::ConicalIsland(_) => {
                MeshSpec { nx: 16, ny: 17, split: BaseSplit::TwoTriangle, levels: 2 }
            }
        }
    }

    /// Builds the scenario mesh; `extra_levels` refines beyond the default.
    pub fn build_mesh(&self, extra_levels: u32) -> Result<Mesh, MeshError> {
        let spec = self.default_mesh_spec();
        build_uniform_mesh(
            self.domain(),
            spec.nx,
            spec.ny,
            spec.split,
            spec.levels + extra_levels,
            self.boundary(),
        )
    }

    pub fn default_dt(&self) -> f64 {
        match self {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => 0.002,
            Scenario::SlopingBeach => 0.04,
            Scenario::ThackerRadial => self.period().unwrap() / 700.0,
            Scenario::ThackerPlanar => self.period().unwrap() / 1000.0,
            Scenario::ConicalIsland(_) => 0.0025,
        }
    }

    pub fn default_tol_wet(&self) -> f64 {
        match self {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => 1e-6,
            Scenario::SlopingBeach => 1e-2,
            Scenario::ThackerRadial => 1e-2,
            Scenario::ThackerPlanar => 1e-3,
            Scenario::ConicalIsland(_) => 1e-3,
        }
    }

    pub fn default_t_end(&self) -> f64 {
        match self {
            Scenario::LakeAtRest1 | Scenario::LakeAtRest2 => 40.0,
            Scenario::SlopingBeach => 220.0,
            Scenario::ThackerRadial | Scenario::ThackerPlanar => {
                2.0 * self.period().unwrap()
            }
            Scenario::ConicalIsland(_) => 20.0,
        }
    }
}

/// Free-surface displacement of the beach N-wave about the rest level, in
/// physical coordinates. The shape decays in both directions; its extrema
/// are +3.0 m and roughly -8.8 m.
fn beach_displacement(x: f64) -> f64 {
    let xp = x / BEACH_L;
    let eta = BEACH_A1 * (-BEACH_K1 * (xp - BEACH_X1) * (xp - BEACH_X1)).exp()
        - BEACH_A2 * (-BEACH_K2 * (xp - BEACH_X2) * (xp - BEACH_X2)).exp();
    BEACH_SLOPE * BEACH_L * eta
}

/// Vertex-interpolates bathymetry and initial state onto a mesh.
pub fn discretize(scenario: Scenario, mesh: &Mesh) -> (ScalarField, CellField) {
    let n = mesh.num_cells();
    let mut bathy = ScalarField::zeros(n);
    let mut field = CellField::zeros(n);
    for c in 0..n {
        let pts = mesh.cell_points(c);
        for i in 0..3 {
            bathy.cells[c][i] = scenario.bathymetry(pts[i]);
            field.cells[c].set_node(i, scenario.initial(pts[i]));
        }
    }
    (bathy, field)
}

/// Vertex-interpolant of the closed-form solution at time `t`.
pub fn exact_field(scenario: Scenario, mesh: &Mesh, t: f64) -> Option<CellField> {
    if !scenario.has_exact() {
        return None;
    }
    let n = mesh.num_cells();
    let mut field = CellField::zeros(n);
    for c in 0..n {
        let pts = mesh.cell_points(c);
        for i in 0..3 {
            field.cells[c].set_node(i, scenario.exact(pts[i], t).unwrap());
        }
    }
    Some(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::parse(s.name()), Some(s));
        }
        assert_eq!(Scenario::parse("unknown"), None);
    }

    #[test]
    fn parabolic_mountain_values() {
        let s = Scenario::LakeAtRest1;
        assert_eq!(s.bathymetry(Point::new(0.5, 0.5)), 0.25);
        assert_relative_eq!(s.bathymetry(Point::new(0.5, 0.7)), 0.05, epsilon = 1e-15);
        // Summit pokes out of the 0.1 m lake.
        assert_eq!(s.initial(Point::new(0.5, 0.5)).h, 0.0);
        assert_relative_eq!(s.initial(Point::new(0.5, 0.7)).h, 0.05, epsilon = 1e-15);
        assert_eq!(s.initial(Point::new(0.1, 0.1)).h, 0.1);
    }

    #[test]
    fn terraced_bathymetry_regions() {
        let s = Scenario::LakeAtRest2;
        assert_eq!(s.bathymetry(Point::new(0.35, 0.65)), 0.15);
        assert_eq!(s.bathymetry(Point::new(0.55, 0.45)), 0.05);
        // Inside the rectangle but outside both disks.
        assert_eq!(s.bathymetry(Point::new(0.47, 0.35)), 0.07);
        // Inside the big disk only.
        assert_eq!(s.bathymetry(Point::new(0.75, 0.75)), 0.03);
        assert_eq!(s.bathymetry(Point::new(0.02, 0.02)), 0.0);
        // The disk steps take precedence over the rectangle.
        assert_eq!(s.bathymetry(Point::new(0.4, 0.6)), 0.15);
    }

    #[test]
    fn radial_basin_constants() {
        // Shape factor (a⁴−r₀⁴)/(a⁴+r₀⁴) reduces to the rational 369/881.
        assert_relative_eq!(radial_amplitude(), 369.0 / 881.0, epsilon = 1e-16);
        let s = Scenario::ThackerRadial;
        assert_relative_eq!(s.period().unwrap(), 1773.4763281780881, max_relative = 1e-14);
        assert_relative_eq!(s.default_dt(), 2.533537611682983, max_relative = 1e-14);
        // Center depth √((1+A)/(1−A)) = 25/16 exactly at t = 0.
        let h0 = s.exact(Point::new(0.0, 0.0), 0.0).unwrap().h;
        assert_relative_eq!(h0, 1.5625, epsilon = 1e-15);
        // Shoreline at r = r₀ initially.
        assert!(s.exact(Point::new(1999.0, 0.0), 0.0).unwrap().h > 0.0);
        assert_eq!(s.exact(Point::new(2001.0, 0.0), 0.0).unwrap().h, 0.0);
    }

    #[test]
    fn radial_solution_is_periodic_and_radial() {
        let s = Scenario::ThackerRadial;
        let p = Scenario::ThackerRadial.period().unwrap();
        for &t in &[0.0, 371.2, 0.4 * p] {
            for &pt in &[Point::new(500.0, -300.0), Point::new(-1500.0, 800.0)] {
                let a = s.exact(pt, t).unwrap();
                let b = s.exact(pt, t + p).unwrap();
                assert_relative_eq!(a.h, b.h, epsilon = 1e-12);
                assert_relative_eq!(a.hu, b.hu, epsilon = 1e-12);
                assert_relative_eq!(a.hv, b.hv, epsilon = 1e-12);
                // Velocity is parallel to the position vector.
                let cross = a.hu * pt.y - a.hv * pt.x;
                assert!(cross.abs() <= 1e-12 * (a.hu.abs() + a.hv.abs()).max(1e-30));
            }
        }
    }

    #[test]
    fn planar_basin_constants() {
        let s = Scenario::ThackerPlanar;
        assert_relative_eq!(
            s.angular_frequency().unwrap(),
            1.4004399308788649,
            max_relative = 1e-15
        );
        assert_relative_eq!(s.period().unwrap(), 4.486579658748012, max_relative = 1e-14);
        assert_relative_eq!(s.exact(Point::new(0.0, 0.0), 0.0).unwrap().h, 0.075, epsilon = 1e-16);
        // Wet velocity magnitude is ω/2 at every time.
        let st = s.exact(Point::new(0.3, -0.2), 1.234).unwrap();
        assert!(st.h > 0.0);
        let speed = (st.hu * st.hu + st.hv * st.hv).sqrt() / st.h;
        assert_relative_eq!(speed, 0.7002199654394324, max_relative = 1e-13);
    }

    #[test]
    fn planar_solution_period_and_positivity() {
        let s = Scenario::ThackerPlanar;
        let p = s.period().unwrap();
        let mut wet = 0;
        for i in 0..20 {
            for j in 0..20 {
                let pt = Point::new(-2.0 + 0.21 * i as f64, -2.0 + 0.21 * j as f64);
                let a = s.exact(pt, 0.7).unwrap();
                let b = s.exact(pt, 0.7 + p).unwrap();
                assert!(a.h >= 0.0);
                if a.h > 0.0 {
                    wet += 1;
                }
                assert_relative_eq!(a.h, b.h, epsilon = 1e-12);
                assert_relative_eq!(a.hu, b.hu, epsilon = 1e-12);
            }
        }
        assert!(wet > 30, "expected a substantial wet region, got {wet} samples");
    }

    #[test]
    fn island_geometry_and_wave() {
        let s = Scenario::ConicalIsland(IslandCase::A);
        assert_eq!(s.bathymetry(ISLAND_CENTER), 0.625);
        assert_relative_eq!(
            s.bathymetry(Point::new(12.96 + 2.0, 13.8)),
            0.4,
            epsilon = 1e-15
        );
        assert_eq!(s.bathymetry(Point::new(1.0, 1.0)), 0.0);
        // Island peak is dry, surroundings flooded to 0.32.
        assert_eq!(s.initial(ISLAND_CENTER).h, 0.0);
        assert_relative_eq!(s.initial(Point::new(1.0, 1.0)).h, 0.32, epsilon = 1e-16);

        let inflow = s.inflow().unwrap();
        // Steepness and celerity of the incident solitary wave.
        match inflow.signal {
            InflowSignal::SolitaryPulse { d, a, k, t0 } => {
                assert_eq!(d, 0.32);
                assert_eq!(a, 0.014);
                assert_relative_eq!(k, 1.0246886672673814, max_relative = 1e-14);
                assert_relative_eq!(t0, 5.667999581679949, max_relative = 1e-12);
            }
            _ => panic!("expected a solitary pulse"),
        }
        // Peak depth h₀ + a at the pulse center, rest depth far away.
        assert_relative_eq!(inflow.depth(5.667999581679949), 0.334, max_relative = 1e-12);
        assert_relative_eq!(inflow.depth(-30.0), 0.32, max_relative = 1e-9);

        let c = Scenario::ConicalIsland(IslandCase::C).inflow().unwrap();
        match c.signal {
            InflowSignal::SolitaryPulse { a, k, .. } => {
                assert_eq!(a, 0.057);
                assert_relative_eq!(k, 2.2035371299797095, max_relative = 1e-14);
            }
            _ => panic!("expected a solitary pulse"),
        }
    }

    #[test]
    fn beach_profile_extremes_and_oracle() {
        let s = Scenario::SlopingBeach;
        // Scan the displacement for its extremes.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..50_000 {
            let x = i as f64;
            let d = beach_displacement(x);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        assert!((2.9..=3.0).contains(&hi), "crest {hi}");
        assert!((-9.0..=-8.5).contains(&lo), "trough {lo}");
        // Frozen sample of the initial depth offshore.
        assert_relative_eq!(
            s.initial(Point::new(20_000.0, 100.0)).h,
            2002.9805760216252,
            max_relative = 1e-14
        );
        // Land above the shoreline starts dry.
        assert_eq!(s.initial(Point::new(-400.0, 50.0)).h, 0.0);
        assert_eq!(s.initial(Point::new(-100.0, 50.0)).h, 0.0);
    }

    #[test]
    fn default_meshes_have_documented_resolutions() {
        let planar = Scenario::ThackerPlanar.build_mesh(0).unwrap();
        assert_eq!(planar.num_cells(), 8192);
        let radial = Scenario::ThackerRadial.build_mesh(0).unwrap();
        assert_eq!(radial.num_cells(), 16384);
        // Radial legs are 125/√2.
        let l = radial.edge(0).length;
        let target = 125.0 / 2.0f64.sqrt();
        let edges = radial.edges();
        assert!(
            edges.iter().any(|e| (e.length - target).abs() < 1e-9),
            "expected a leg of {target}, first edge has {l}"
        );
        let lake = Scenario::LakeAtRest1.build_mesh(0).unwrap();
        assert_eq!(lake.num_cells(), 1024);
        let island = Scenario::ConicalIsland(IslandCase::A).build_mesh(0).unwrap();
        assert_eq!(island.num_cells(), 2 * 64 * 68);
    }

    #[test]
    fn discretized_initial_states_are_admissible() {
        for s in Scenario::ALL {
            // Keep the big meshes out of this smoke loop.
            let mesh = match s {
                Scenario::SlopingBeach => s.build_mesh(0).unwrap(),
                _ => {
                    let spec = s.default_mesh_spec();
                    build_uniform_mesh(
                        s.domain(),
                        spec.nx.min(16),
                        spec.ny.min(17),
                        spec.split,
                        0,
                        s.boundary(),
                    )
                    .unwrap()
                }
            };
            let (bathy, field) = discretize(s, &mesh);
            assert!(field.min_nodal_h() >= 0.0, "{}: negative initial depth", s.name());
            // The basin flows start moving; everything else starts still.
            let starts_still = !s.has_exact();
            for c in 0..mesh.num_cells() {
                for i in 0..3 {
                    assert!(bathy.cells[c][i] >= 0.0);
                    let moving = field.cells[c].hu[i] != 0.0 || field.cells[c].hv[i] != 0.0;
                    if starts_still || field.cells[c].h[i] == 0.0 {
                        assert!(!moving, "{}: unexpected initial momentum", s.name());
                    }
                }
            }
        }
    }

    #[test]
    fn exact_field_matches_pointwise_evaluation() {
        let s = Scenario::ThackerPlanar;
        let mesh = build_uniform_mesh(
            s.domain(),
            8,
            8,
            BaseSplit::TwoTriangle,
            0,
            s.boundary(),
        )
        .unwrap();
        let t = 1.7;
        let f = exact_field(s, &mesh, t).unwrap();
        for c in [0, 17, 101] {
            let pts = mesh.cell_points(c);
            for i in 0..3 {
                let want = s.exact(pts[i], t).unwrap();
                assert_eq!(f.cells[c].node(i), want);
            }
        }
        assert!(exact_field(Scenario::LakeAtRest1, &mesh, 0.0).is_none());
    }
}
