//! Randomized invariants: statements that must hold for *every* admissible
//! input, checked on generated meshes, fields, and states rather than
//! hand-picked fixtures.

use proptest::prelude::*;

use swdg::config::{fmt_f64, parse_config};
use swdg::diagnostics::{convergence_rates, total_mass};
use swdg::flux::{normal_flux, rusanov};
use swdg::geom::Point;
use swdg::limiter::{apply_limiter, positive_depth, LimiterConfig, MomentumLimiting};
use swdg::mesh::{build_uniform_mesh, BaseSplit, BoundarySpec, Mesh, NeighborhoodVariant, Rect};
use swdg::output::{extract_cross_section, SectionLine};
use swdg::rhs::{compute_rhs, BcContext, DgForm};
use swdg::scenario::{discretize, Scenario};
use swdg::state::{CellField, ScalarField, State};
use swdg::stepper::{adaptive_dt, HeunStepper, StepperConfig};
use swdg::wetdry::classify_cells;
use swdg::GRAVITY;

/// Small deterministic generator so fields of mesh-dependent size can be
/// filled from a single proptest-drawn seed.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> f64 {
        // xorshift64*; top 53 bits to a float in [0, 1).
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        (x.wrapping_mul(0x2545_f491_4f6c_dd1d) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

fn split(four: bool) -> BaseSplit {
    if four {
        BaseSplit::FourTriangle
    } else {
        BaseSplit::TwoTriangle
    }
}

/// A mixed wet/dry state over random terrain: surface eta with random
/// bumps, depth clipped at the terrain, mild flow in the wet part.
fn random_pond(mesh: &Mesh, seed: u64, eta: f64) -> (ScalarField, CellField) {
    let n = mesh.num_cells();
    let mut rng = Rng(seed | 1);
    let mut bathy = ScalarField::zeros(n);
    let mut field = CellField::zeros(n);
    // Per-vertex terrain so nodal bathymetry stays continuous across cells.
    let mut terrain = vec![0.0; mesh.num_vertices()];
    for t in terrain.iter_mut() {
        *t = rng.range(0.0, 1.0);
    }
    for c in 0..n {
        let verts = mesh.cell_vertices(c);
        for i in 0..3 {
            let b = terrain[verts[i]];
            let h = (eta - b).max(0.0);
            bathy.cells[c][i] = b;
            field.cells[c].h[i] = h;
            if h > 0.0 {
                field.cells[c].hu[i] = h * rng.range(-0.2, 0.2);
                field.cells[c].hv[i] = h * rng.range(-0.2, 0.2);
            }
        }
    }
    (bathy, field)
}

fn assemble(field: &CellField, bathy: &ScalarField, mesh: &Mesh, form: DgForm) -> CellField {
    let flags = classify_cells(field, bathy, 1e-6).unwrap();
    let mut out = CellField::zeros(mesh.num_cells());
    compute_rhs(
        field,
        bathy,
        mesh,
        &flags,
        form,
        GRAVITY,
        1e-6,
        0.0,
        &BcContext::default(),
        &mut out,
    )
    .unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// One limited Heun step on a closed domain moves water around but
    /// never creates or destroys it, whatever the terrain or flow.
    #[test]
    fn heun_step_conserves_mass_on_closed_domains(
        nx in 2usize..4,
        ny in 2usize..4,
        four in any::<bool>(),
        periodic in any::<bool>(),
        strong in any::<bool>(),
        seed in any::<u64>(),
        eta in 0.35f64..0.75,
    ) {
        let spec = if periodic { BoundarySpec::periodic() } else { BoundarySpec::walls() };
        let mesh = build_uniform_mesh(
            Rect::new(0.0, 0.0, 1.0, 1.0), nx, ny, split(four), 1, spec,
        ).unwrap();
        let (bathy, mut field) = random_pond(&mesh, seed, eta);
        let form = if strong { DgForm::Strong } else { DgForm::Weak };
        let config = StepperConfig {
            form,
            limiter: Some(LimiterConfig::default()),
            g: GRAVITY,
            tol_wet: 1e-6,
        };
        let mut stepper = HeunStepper::new(config, mesh.num_cells());
        let m0 = total_mass(&field, &mesh);
        let mut t = 0.0;
        for _ in 0..3 {
            let dt = adaptive_dt(&field, &mesh, GRAVITY, 1e-6, 0.2);
            let stats = stepper
                .step(&mut field, &bathy, &mesh, dt, t, &BcContext::default())
                .unwrap();
            prop_assert!(stats.min_stage_depth >= 0.0);
            t += dt;
        }
        let drift = (total_mass(&field, &mesh) - m0).abs() / m0;
        prop_assert!(drift <= 1e-13, "relative mass drift {drift:.3e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// With cell-constant depth and globally linear momentum every volume
    /// integrand is a polynomial the quadrature integrates exactly, so
    /// integration by parts holds discretely and the two forms coincide.
    #[test]
    fn strong_and_weak_forms_agree_when_quadrature_is_exact(
        h_base in 1.0f64..3.0,
        ax in -0.5f64..0.5,
        ay in -0.5f64..0.5,
        a0 in -0.5f64..0.5,
        bx in -0.5f64..0.5,
        by in -0.5f64..0.5,
        b0 in -0.5f64..0.5,
    ) {
        let mesh = build_uniform_mesh(
            Rect::new(0.0, 0.0, 1.0, 1.0), 2, 2,
            BaseSplit::TwoTriangle, 1, BoundarySpec::periodic(),
        ).unwrap();
        let n = mesh.num_cells();
        let bathy = ScalarField::zeros(n);
        let mut field = CellField::zeros(n);
        for c in 0..n {
            let pts = mesh.cell_points(c);
            for i in 0..3 {
                field.cells[c].h[i] = h_base + 0.25 * ((7 * c % 5) as f64);
                field.cells[c].hu[i] = ax * pts[i].x + ay * pts[i].y + a0;
                field.cells[c].hv[i] = bx * pts[i].x + by * pts[i].y + b0;
            }
        }
        let weak = assemble(&field, &bathy, &mesh, DgForm::Weak);
        let strong = assemble(&field, &bathy, &mesh, DgForm::Strong);
        let scale = 10.0 * (1.0 + h_base);
        for c in 0..n {
            for i in 0..3 {
                let (w, s) = (&weak.cells[c], &strong.cells[c]);
                prop_assert!((w.h[i] - s.h[i]).abs() <= 1e-11 * scale);
                prop_assert!((w.hu[i] - s.hu[i]).abs() <= 1e-11 * scale);
                prop_assert!((w.hv[i] - s.hv[i]).abs() <= 1e-11 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The limiter never produces a negative nodal depth and never changes
    /// any cell's water volume, for any admissible input.
    #[test]
    fn limiter_keeps_depth_means_and_positivity(
        seed in any::<u64>(),
        eta in 0.3f64..0.8,
        vertex in any::<bool>(),
        velocity in any::<bool>(),
    ) {
        let mesh = build_uniform_mesh(
            Rect::new(0.0, 0.0, 1.0, 1.0), 3, 3,
            BaseSplit::FourTriangle, 0, BoundarySpec::walls(),
        ).unwrap();
        let (bathy, mut field) = random_pond(&mesh, seed, eta);
        // Steepen the surface so the limiter actually engages, keeping
        // nodal depths admissible.
        let mut rng = Rng(seed ^ 0x9e37_79b9);
        for c in 0..mesh.num_cells() {
            for i in 0..3 {
                field.cells[c].h[i] *= rng.range(0.2, 1.8);
            }
        }
        let before = field.clone();
        let config = LimiterConfig {
            variant: if vertex { NeighborhoodVariant::Vertex } else { NeighborhoodVariant::Edge },
            momentum: if velocity { MomentumLimiting::VelocityBased } else { MomentumLimiting::Direct },
        };
        apply_limiter(&mut field, &bathy, &mesh, config, 1e-6, 0.0).unwrap();
        prop_assert!(field.min_nodal_h() >= 0.0);
        for c in 0..mesh.num_cells() {
            let m0 = before.cells[c].mean().h;
            let m1 = field.cells[c].mean().h;
            prop_assert!(
                (m1 - m0).abs() <= 1e-14 * (1.0 + m0.abs()),
                "cell {c}: mean depth moved {m0:.17} -> {m1:.17}"
            );
        }
    }

    /// Redistribution to nonnegative nodes keeps the cell volume and is the
    /// identity on already admissible triples.
    #[test]
    fn positive_depth_redistribution_is_volume_neutral(
        a in -1.0f64..2.0,
        b in -1.0f64..2.0,
        c in -1.0f64..2.0,
    ) {
        let sum = a + b + c;
        prop_assume!(sum > 1e-12);
        let out = positive_depth([a, b, c]).unwrap();
        prop_assert!(out.iter().all(|&v| v >= 0.0));
        let out_sum: f64 = out.iter().sum();
        prop_assert!((out_sum - sum).abs() <= 1e-14 * sum.abs().max(1.0));
        if a >= 0.0 && b >= 0.0 && c >= 0.0 {
            prop_assert_eq!(out, [a, b, c]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Discretized resting lakes are fixed points of the limiter: depths
    /// move by at most round-off noise and momenta stay exactly zero.
    #[test]
    fn resting_lakes_are_limiter_fixed_points(
        lake2 in any::<bool>(),
        vertex in any::<bool>(),
        velocity in any::<bool>(),
        tol_exp in -8i32..-3,
    ) {
        let scenario = if lake2 { Scenario::LakeAtRest2 } else { Scenario::LakeAtRest1 };
        let mesh = scenario.build_mesh(0).unwrap();
        let (bathy, mut field) = discretize(scenario, &mesh);
        let before = field.clone();
        let config = LimiterConfig {
            variant: if vertex { NeighborhoodVariant::Vertex } else { NeighborhoodVariant::Edge },
            momentum: if velocity { MomentumLimiting::VelocityBased } else { MomentumLimiting::Direct },
        };
        apply_limiter(&mut field, &bathy, &mesh, config, 10f64.powi(tol_exp), 0.0).unwrap();
        for c in 0..mesh.num_cells() {
            for i in 0..3 {
                let dh = (field.cells[c].h[i] - before.cells[c].h[i]).abs();
                prop_assert!(dh <= 1e-13, "cell {c} node {i}: depth moved by {dh:.3e}");
                prop_assert_eq!(field.cells[c].hu[i], 0.0);
                prop_assert_eq!(field.cells[c].hv[i], 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Uniform meshes tile the requested rectangle exactly, edges are
    /// consistent with their endpoints, and the connectivity is a closed
    /// triangulated disk (Euler characteristic 1).
    #[test]
    fn uniform_meshes_satisfy_geometric_invariants(
        nx in 1usize..5,
        ny in 1usize..5,
        four in any::<bool>(),
        levels in 0u32..3,
        w in 0.5f64..20.0,
        h in 0.5f64..20.0,
    ) {
        let rect = Rect::new(-1.0, 2.0, -1.0 + w, 2.0 + h);
        let mesh = build_uniform_mesh(rect, nx, ny, split(four), levels, BoundarySpec::walls())
            .unwrap();
        let total: f64 = (0..mesh.num_cells()).map(|c| mesh.area(c)).sum();
        prop_assert!((total - w * h).abs() <= 1e-12 * w * h);
        prop_assert!((mesh.total_area() - total).abs() <= 1e-12 * total);

        let mut boundary_edges = 0usize;
        for e in 0..mesh.num_edges() {
            let edge = mesh.edge(e);
            let a = mesh.vertex(edge.vertices[0]);
            let b = mesh.vertex(edge.vertices[1]);
            let chord = Point { x: b.x - a.x, y: b.y - a.y };
            let len = chord.x.hypot(chord.y);
            prop_assert!((edge.length - len).abs() <= 1e-12 * len);
            let n = edge.normal;
            prop_assert!((n.x.hypot(n.y) - 1.0).abs() <= 1e-12);
            prop_assert!((n.x * chord.x + n.y * chord.y).abs() <= 1e-12 * len);
            match edge.right {
                Some(right) => {
                    // The normal leaves the left cell: the right centroid
                    // sits strictly on its positive side.
                    let pl = mesh.cell_points(edge.left);
                    let pr = mesh.cell_points(right);
                    let cl = Point {
                        x: (pl[0].x + pl[1].x + pl[2].x) / 3.0,
                        y: (pl[0].y + pl[1].y + pl[2].y) / 3.0,
                    };
                    let cr = Point {
                        x: (pr[0].x + pr[1].x + pr[2].x) / 3.0,
                        y: (pr[0].y + pr[1].y + pr[2].y) / 3.0,
                    };
                    prop_assert!(n.x * (cr.x - cl.x) + n.y * (cr.y - cl.y) > 0.0);
                }
                None => boundary_edges += 1,
            }
        }
        let euler = mesh.num_vertices() as i64 - mesh.num_edges() as i64
            + mesh.num_cells() as i64;
        prop_assert_eq!(euler, 1);
        prop_assert!(boundary_edges >= 4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The numerical flux reduces to the physical one on matched traces and
    /// is antisymmetric under swapping sides with the normal reversed, so
    /// every interior edge contributes zero net mass and momentum.
    #[test]
    fn rusanov_is_consistent_and_conservative(
        hl in 0.0f64..3.0,
        hr in 0.0f64..3.0,
        ul in -2.0f64..2.0,
        vl in -2.0f64..2.0,
        ur in -2.0f64..2.0,
        vr in -2.0f64..2.0,
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let tol = 1e-6;
        let left = State { h: hl, hu: hl * ul, hv: hl * vl };
        let right = State { h: hr, hu: hr * ur, hv: hr * vr };
        let n = Point { x: angle.cos(), y: angle.sin() };
        let minus_n = Point { x: -n.x, y: -n.y };

        let (same, _) = rusanov(&left, &left, n, GRAVITY, tol);
        let exact = normal_flux(&left, n, GRAVITY, tol);
        prop_assert_eq!(same.h, exact.h);
        prop_assert_eq!(same.hu, exact.hu);
        prop_assert_eq!(same.hv, exact.hv);

        let (fwd, s1) = rusanov(&left, &right, n, GRAVITY, tol);
        let (bwd, s2) = rusanov(&right, &left, minus_n, GRAVITY, tol);
        prop_assert_eq!(s1, s2);
        prop_assert_eq!(fwd.h, -bwd.h);
        prop_assert_eq!(fwd.hu, -bwd.hu);
        prop_assert_eq!(fwd.hv, -bwd.hv);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Sampling a globally linear depth along any axis-aligned line
    /// reproduces it exactly: piecewise linear interpolation has no error
    /// on linear data, including at the duplicated cell-interface samples.
    #[test]
    fn cross_sections_reproduce_linear_depth(
        alpha in 1.0f64..3.0,
        beta in -0.5f64..0.5,
        gamma in -0.5f64..0.5,
        frac in 0.05f64..0.95,
        horizontal in any::<bool>(),
        samples in 2usize..40,
    ) {
        let mesh = build_uniform_mesh(
            Rect::new(0.0, 0.0, 1.0, 1.0), 3, 3,
            BaseSplit::FourTriangle, 0, BoundarySpec::walls(),
        ).unwrap();
        let n = mesh.num_cells();
        let bathy = ScalarField::zeros(n);
        let mut field = CellField::zeros(n);
        for c in 0..n {
            let pts = mesh.cell_points(c);
            for i in 0..3 {
                field.cells[c].h[i] = alpha + beta * pts[i].x + gamma * pts[i].y;
            }
        }
        let line = if horizontal {
            SectionLine::Horizontal { y: frac }
        } else {
            SectionLine::Vertical { x: frac }
        };
        let rows = extract_cross_section(&field, &bathy, &mesh, line, samples, 1e-6);
        prop_assert!(!rows.is_empty());
        for row in &rows {
            let expect = alpha + beta * row.pos.x + gamma * row.pos.y;
            prop_assert!((row.h - expect).abs() <= 1e-12,
                "at ({}, {}): {} vs {}", row.pos.x, row.pos.y, row.h, expect);
        }
    }

    /// Observed convergence rates depend only on ratios, so rescaling all
    /// spacings or all errors by constants leaves them unchanged, and an
    /// exact power law is recovered exactly.
    #[test]
    fn convergence_rates_are_scale_invariant(
        p in 0.5f64..3.0,
        c in 0.1f64..10.0,
        dx_scale in 0.1f64..10.0,
        err_scale in 0.1f64..10.0,
    ) {
        let dx = [0.1f64, 0.05, 0.025];
        let err: Vec<f64> = dx.iter().map(|&d| c * d.powf(p)).collect();
        let base = convergence_rates(&dx, &err);
        for r in &base.pairwise {
            prop_assert!((r - p).abs() <= 1e-10);
        }
        prop_assert!((base.fitted - p).abs() <= 1e-10);

        let dx2: Vec<f64> = dx.iter().map(|&d| dx_scale * d).collect();
        let err2: Vec<f64> = err.iter().map(|&e| err_scale * e).collect();
        let scaled = convergence_rates(&dx2, &err2);
        for (a, b) in base.pairwise.iter().zip(&scaled.pairwise) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        prop_assert!((base.fitted - scaled.fitted).abs() <= 1e-10);
    }

    /// Any representable positive step size or tolerance survives the
    /// manifest round trip bit for bit.
    #[test]
    fn manifest_preserves_floats_bit_for_bit(
        dt_bits in 1.0f64..1.0e3,
        dt_exp in -9i32..0,
        tol_exp in -12i32..-2,
        gx in 0.05f64..0.95,
        gy in 0.05f64..0.95,
    ) {
        let dt = dt_bits * 10f64.powi(dt_exp);
        let tol = 1.2345678901234567 * 10f64.powi(tol_exp);
        let text = format!(
            "scenario = lake_at_rest_1\ndt = {}\ntol_wet = {}\ngauges = {},{}\n",
            fmt_f64(dt), fmt_f64(tol), fmt_f64(gx), fmt_f64(gy),
        );
        let config = parse_config(&text, &[]).unwrap();
        match config.step {
            swdg::stepper::StepControl::FixedDt(v) => prop_assert_eq!(v.to_bits(), dt.to_bits()),
            _ => prop_assert!(false, "expected a fixed step"),
        }
        prop_assert_eq!(config.tol_wet.to_bits(), tol.to_bits());
        prop_assert_eq!(config.gauges[0].x.to_bits(), gx.to_bits());
        let reparsed = parse_config(&config.manifest(), &[]).unwrap();
        prop_assert_eq!(&reparsed, &config);
    }
}
