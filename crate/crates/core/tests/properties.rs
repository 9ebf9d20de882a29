mod common;

use common::*;
use phifem::analysis::{error_l2h1, error_linfl2, level_integrals, ConvergenceReport, NormAccumulator};
use phifem::assembly::{assemble_lhs, assemble_parts, RhsBuilder};
use phifem::cases::{circle_case, ExactSolution};
use phifem::discretization::{QuadratureOptions, Shapes};
use phifem::elements::{build_dofmap, make_basis};
use phifem::levelset::{classify, interpolate_levelset, LevelSetFunction};
use phifem::pipeline::{run_exact, run_self_convergence};
use phifem::solver::{solve_heat, HeatProblem, SolverOptions, TimeGrid, Trajectory};
use phifem::sparse::{BandLu, CsrMatrix};
use phifem::{build_background_mesh, BoxDomain, DiscreteField, Discretization, Point, RunSettings};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::Arc;

fn circle_disc(n: usize, k: usize, l: usize) -> Discretization<f64> {
    let case = circle_case::<f64>();
    let mesh = build_background_mesh(&case.domain, n).unwrap();
    Discretization::new(mesh, &case.levelset, k, l).unwrap()
}

fn unit_box(dim: usize) -> BoxDomain<f64> {
    BoxDomain::centered(dim, 1.0).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn same_matrix(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> bool {
    a.row_ptr() == b.row_ptr()
        && a.col_idx() == b.col_idx()
        && a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Random polynomial of total degree `deg` in `dim` variables.
fn random_poly(rng: &mut StdRng, dim: usize, deg: usize) -> impl Fn(&Point<f64>) -> f64 + Send + Sync + Clone {
    let mut terms = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            let cmax = if dim == 3 { deg - a - b } else { 0 };
            for c in 0..=cmax {
                terms.push(([a as i32, b as i32, c as i32], rng.gen_range(-1.0..1.0)));
            }
        }
    }
    move |x: &Point<f64>| {
        terms
            .iter()
            .map(|(e, c)| c * x[0].powi(e[0]) * x[1].powi(e[1]) * x[2].powi(e[2]))
            .sum()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mesh_volumes_normals_and_size(dim in 2usize..=3, n in 1usize..6, lo in -2.0f64..0.0, len in 0.5f64..3.0) {
        let lower = vec![lo; dim];
        let upper: Vec<f64> = (0..dim).map(|i| lo + len * (1.0 + 0.3 * i as f64)).collect();
        let domain = BoxDomain::new(&lower, &upper).unwrap();
        let mesh = build_background_mesh(&domain, n).unwrap();
        let vol: f64 = (0..mesh.num_cells()).map(|c| mesh.cell_geometry(c).volume).sum();
        prop_assert!((vol - domain.volume()).abs() <= 1e-12 * domain.volume());

        let hmax = (0..mesh.num_cells()).map(|c| mesh.cell_geometry(c).diameter).fold(0.0, f64::max);
        prop_assert_eq!(mesh.h(), hmax);

        for f in 0..mesh.num_facets() {
            let fc = mesh.facet_cells(f);
            if let Some(s) = fc.second {
                let a = mesh.outward_normal(fc.first, f);
                let b = mesh.outward_normal(s, f);
                for i in 0..3 {
                    prop_assert!((a[i] + b[i]).abs() < 1e-14);
                }
            }
        }

        let again = build_background_mesh(&domain, n).unwrap();
        prop_assert_eq!(mesh.vertices(), again.vertices());
        for c in 0..mesh.num_cells() {
            prop_assert_eq!(mesh.cell(c), again.cell(c));
        }
    }

    #[test]
    fn levelset_interpolation_reproduces_polynomials(dim in 2usize..=3, deg in 1usize..=3, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_poly(&mut rng, dim, deg);
        let q = p.clone();
        let phi = LevelSetFunction::new("poly", move |x: &Point<f64>| q(x));
        let mesh = build_background_mesh(&unit_box(dim), 3).unwrap();
        let ls = interpolate_levelset(&phi, &mesh, deg).unwrap();
        for _ in 0..20 {
            let c = rng.gen_range(0..mesh.num_cells());
            let xi = interior_point(&mut rng, dim, 0.0);
            let x = mesh.cell_geometry(c).to_physical(&xi, dim);
            let exact = p(&x);
            prop_assert!((ls.eval_in_cell(c, &xi) - exact).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn classification_is_a_partition(cx in -0.3f64..0.3, cy in -0.3f64..0.3, r in 0.3f64..0.9, l in 1usize..=3) {
        let phi = LevelSetFunction::new("disc", move |x: &Point<f64>| (x[0] - cx).powi(2) + (x[1] - cy).powi(2) - r * r);
        let mesh = build_background_mesh(&BoxDomain::centered(2, 1.5).unwrap(), 10).unwrap();
        let ls = interpolate_levelset(&phi, &mesh, l).unwrap();
        let cls = classify(&ls, &mesh).unwrap();
        let flipped = classify(&ls.negated(), &mesh).unwrap();
        for c in 0..mesh.num_cells() {
            let s = ls.classification_samples(c);
            let neg = s.iter().any(|&v| v < 0.0);
            let nonneg = s.iter().any(|&v| v >= 0.0);
            prop_assert_eq!(cls.is_active(c), neg);
            prop_assert_eq!(cls.is_cut(c), neg && nonneg);
            // the two active sets cover the mesh and overlap on cells with both signs
            let pos = s.iter().any(|&v| v > 0.0);
            prop_assert!(cls.is_active(c) || flipped.is_active(c));
            prop_assert_eq!(cls.is_active(c) && flipped.is_active(c), neg && pos);
        }
        for &f in cls.ghost_facets() {
            let fc = mesh.facet_cells(f);
            prop_assert!(cls.is_cut(fc.first) || fc.second.is_some_and(|s| cls.is_cut(s)));
        }
    }

    #[test]
    fn lagrange_partition_of_unity_and_interpolation(dim in 2usize..=3, k in 1usize..=4, seed in any::<u64>()) {
        let basis = make_basis::<f64>(dim, k).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let xi = interior_point(&mut rng, dim, 0.0);
        let e = basis.evaluate(&xi);
        prop_assert!((e.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for a in 0..dim {
            prop_assert!(e.grads.iter().map(|g| g[a]).sum::<f64>().abs() < 1e-10);
        }
        for (i, node) in basis.nodes().iter().enumerate() {
            for (j, v) in basis.values(node).iter().enumerate() {
                let kron = if i == j { 1.0 } else { 0.0 };
                prop_assert!((v - kron).abs() < 1e-12);
            }
        }

        let mesh = build_background_mesh(&unit_box(dim), 2).unwrap();
        let cells: Vec<usize> = (0..mesh.num_cells()).collect();
        let dofmap = build_dofmap(&mesh, &cells, &basis);
        let p = random_poly(&mut rng, dim, k);
        let coeffs = dofmap.interpolate(&p);
        for _ in 0..10 {
            let c = rng.gen_range(0..mesh.num_cells());
            let xi = interior_point(&mut rng, dim, 0.0);
            let x = mesh.cell_geometry(c).to_physical(&xi, dim);
            let v: f64 = dofmap.cell_dofs(c).iter().zip(basis.values(&xi)).map(|(&i, b)| coeffs[i] * b).sum();
            prop_assert!((v - p(&x)).abs() <= 1e-12 * p(&x).abs().max(1.0));
        }
    }

    #[test]
    fn product_rule_matches_finite_differences(n in 4usize..12, k in 1usize..=2, l in 1usize..=3, seed in any::<u64>()) {
        prop_assume!(l >= k);
        let disc = circle_disc(n, k, l);
        let cells: Vec<usize> = disc.classification().cut_cells().iter().copied().take(4).collect();
        prop_assert!(product_rule_mismatch(&disc, &cells, 3, seed) < 1e-6);
    }

    #[test]
    fn quadratic_laplacian_on_random_triangle(x1 in 0.5f64..2.0, y2 in 0.5f64..2.0, shear in -1.0f64..1.0, seed in any::<u64>()) {
        // nodal P2 interpolant of x^2 on an affine cell has Laplacian exactly 2
        let domain = BoxDomain::new(&[0.0, 0.0], &[x1, y2]).unwrap();
        let mesh = build_background_mesh(&domain, 1).unwrap();
        let phi = LevelSetFunction::new("minus one", |_: &Point<f64>| -1.0);
        let ls = interpolate_levelset(&phi, &mesh, 1).unwrap();
        let disc = Discretization::with_levelset(mesh, ls, 2, QuadratureOptions::default()).unwrap();
        let coeffs = disc.interpolate(|x| (x[0] + shear * x[1]).powi(2)).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let mut sh = Shapes::default();
        for &c in disc.active_cells() {
            disc.eval_at_reference(c, &interior_point(&mut rng, 2, 0.0), &mut sh);
            let lap: f64 = disc.dofmap().cell_dofs(c).iter().zip(&sh.laps).map(|(&i, l)| coeffs[i] * l).sum();
            prop_assert!((lap - 2.0 * (1.0 + shear * shear)).abs() < 1e-10);
        }
    }

    #[test]
    fn coercive_part_is_positive(n in 4usize..16, k in 1usize..=2, seed in any::<u64>()) {
        let disc = circle_disc(n, k, k + 1);
        prop_assert!(coercivity_witness(&disc, 1.0, 50, seed) > 0.0);
    }

    #[test]
    fn rhs_is_linear(n in 4usize..12, alpha in -3.0f64..3.0, beta in -3.0f64..3.0, seed in any::<u64>()) {
        let disc = circle_disc(n, 1, 2);
        let rhs = RhsBuilder::new(&disc, 1.0, 0.1).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let u1: Vec<f64> = (0..disc.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u2: Vec<f64> = (0..disc.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f1 = |x: &Point<f64>, t: f64| (x[0] * t).sin() + 1.0;
        let f2 = |x: &Point<f64>, _: f64| x[1] * x[1];
        let combo_u: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| alpha * a + beta * b).collect();
        let combo_f = |x: &Point<f64>, t: f64| alpha * f1(x, t) + beta * f2(x, t);
        let b1 = rhs.build(DiscreteField::PhiTimes(&u1), &f1, 0.3).unwrap();
        let b2 = rhs.build(DiscreteField::PhiTimes(&u2), &f2, 0.3).unwrap();
        let b = rhs.build(DiscreteField::PhiTimes(&combo_u), &combo_f, 0.3).unwrap();
        let expect: Vec<f64> = b1.iter().zip(&b2).map(|(x, y)| alpha * x + beta * y).collect();
        prop_assert!(max_gap(&b, &expect) <= 1e-12 * max_abs(&expect).max(1.0));
    }
}

#[test]
fn quadrature_is_exact_on_monomials() {
    for dim in 1..=3 {
        for e in 0..=12 {
            let gap = if dim == 1 {
                let rule = phifem::elements::make_quadrature::<f64>(1, e).unwrap();
                let approx: f64 = rule.points.iter().zip(&rule.weights).map(|(x, w)| w * x[0].powi(e as i32)).sum();
                (approx - 1.0 / (e as f64 + 1.0)).abs() * (e as f64 + 1.0)
            } else {
                quadrature_mismatch(dim, e)
            };
            assert!(gap < 1e-12, "dim {dim} exactness {e}: {gap:e}");
        }
    }
}

#[test]
fn patch_test_reduces_to_standard_fem() {
    for (dim, n) in [(2, 3), (3, 2)] {
        for k in 1..=2 {
            let mesh = build_background_mesh(&unit_box(dim), n).unwrap();
            let disc = constant_minus_one(mesh, k);
            assert!(disc.classification().cut_cells().is_empty());
            let parts = assemble_parts(&disc, 1.0).unwrap();
            let (m, kk) = standard_fem_matrices(&disc);
            assert!(relative_gap(&parts.mass, &m) < 1e-12, "mass dim {dim} k {k}");
            assert!(relative_gap(&parts.stiffness, &kk) < 1e-12, "stiffness dim {dim} k {k}");
            let dt = 0.25;
            let combined: Vec<Vec<f64>> = m
                .iter()
                .zip(&kk)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x / dt + y).collect())
                .collect();
            let a = CsrMatrix::linear_combination(&[(1.0 / dt, &parts.mass), (1.0, &parts.stiffness)]).unwrap();
            assert!(relative_gap(&a, &combined) < 1e-12);
            for extra in [&parts.ghost, &parts.lsq_laplacian, &parts.lsq_mass] {
                assert_eq!(extra.frobenius_norm(), 0.0);
            }
        }
    }
}

#[test]
fn stabilization_scales_linearly_with_sigma() {
    let disc = circle_disc(12, 2, 3);
    let one = assemble_parts(&disc, 1.0).unwrap();
    let s = 7.5;
    let many = assemble_parts(&disc, s).unwrap();
    for (a, b) in [
        (&one.ghost, &many.ghost),
        (&one.lsq_laplacian, &many.lsq_laplacian),
        (&one.lsq_mass, &many.lsq_mass),
    ] {
        let scaled: Vec<f64> = a.values().iter().map(|v| s * v).collect();
        assert!(max_gap(&scaled, b.values()) <= 1e-13 * max_abs(b.values()));
    }
    assert!(same_matrix(&one.mass, &many.mass));
    assert!(same_matrix(&one.stiffness, &many.stiffness));
    assert!(same_matrix(&one.boundary, &many.boundary));
}

#[test]
fn system_matrix_symmetry_and_determinism() {
    for (n, k) in [(10, 1), (10, 2)] {
        let disc = circle_disc(n, k, k + 1);
        let a = assemble_lhs(&disc, 1.0, 0.05).unwrap();
        let b = assemble_lhs(&disc, 1.0, 0.05).unwrap();
        assert!(same_matrix(&a.matrix, &b.matrix));
        let parts = assemble_parts(&disc, 1.0).unwrap();
        for m in [&parts.mass, &parts.stiffness, &parts.ghost, &parts.lsq_laplacian] {
            let t = m.transpose();
            assert!(max_gap(m.values(), t.values()) <= 1e-14 * max_abs(m.values()));
        }
    }
}

#[test]
fn rhs_of_previous_level_matches_mass_terms() {
    // with f = 0 the right-hand side is (M + L_m) w / dt
    let disc = circle_disc(10, 2, 3);
    let dt = 0.05;
    let rhs = RhsBuilder::new(&disc, 1.0, dt).unwrap();
    let parts = assemble_parts(&disc, 1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let w: Vec<f64> = (0..disc.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = rhs.build(DiscreteField::PhiTimes(&w), &|_: &Point<f64>, _| 0.0, 0.0).unwrap();
    let m = CsrMatrix::linear_combination(&[(1.0 / dt, &parts.mass), (1.0 / dt, &parts.lsq_mass)]).unwrap();
    let expect = m.mul_vec(&w);
    assert!(max_gap(&b, &expect) <= 1e-12 * max_abs(&expect));

    // a source separable in time scales the vector exactly
    let f = |x: &Point<f64>, t: f64| t.sin() * (1.0 + x[0] * x[1]);
    let zero = vec![0.0; disc.n_dofs()];
    let b1 = rhs.build(DiscreteField::PhiTimes(&zero), &f, 0.4).unwrap();
    let b2 = rhs.build(DiscreteField::PhiTimes(&zero), &f, 1.1).unwrap();
    let r = 1.1f64.sin() / 0.4f64.sin();
    let scaled: Vec<f64> = b1.iter().map(|v| r * v).collect();
    assert!(max_gap(&b2, &scaled) <= 1e-12 * max_abs(&b2));
}

fn circle_problem_solve(
    disc: &Discretization<f64>,
    steps: usize,
    scale: f64,
    final_time: f64,
) -> Trajectory<f64> {
    let case = circle_case::<f64>();
    let src = case.source.clone();
    let source = move |x: &Point<f64>, t: f64| scale * src(x, t);
    let initial = |x: &Point<f64>| scale * (case.initial)(x);
    solve_heat(
        &HeatProblem {
            disc,
            sigma: 1.0,
            grid: TimeGrid::new(final_time, steps).unwrap(),
            source: &source,
            initial: &initial,
        },
        &SolverOptions::default(),
    )
    .unwrap()
}

#[test]
fn zero_data_gives_zero_trajectory() {
    for k in 1..=2 {
        let disc = circle_disc(12, k, k + 1);
        let traj = circle_problem_solve(&disc, 6, 0.0, 1.0);
        assert!(traj.initial.iter().all(|&v| v == 0.0));
        assert!(traj.steps.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(traj.diagnostics.max_residual, 0.0);
    }
}

#[test]
fn trajectory_is_linear_in_the_data() {
    let disc = circle_disc(12, 1, 2);
    let base = circle_problem_solve(&disc, 8, 1.0, 1.0);
    let alpha = -2.75;
    let scaled = circle_problem_solve(&disc, 8, alpha, 1.0);
    for (a, b) in base.steps.iter().zip(&scaled.steps) {
        let expect: Vec<f64> = a.iter().map(|v| alpha * v).collect();
        assert!(max_gap(b, &expect) <= 1e-11 * max_abs(&expect));
    }
    assert!(base.diagnostics.max_residual <= 1e-10);
}

#[test]
fn halving_the_time_step_is_first_order() {
    let disc = circle_disc(16, 1, 2);
    let finals: Vec<Vec<f64>> = [4, 8, 16, 32]
        .iter()
        .map(|&n| circle_problem_solve(&disc, n, 1.0, 1.0).steps.pop().unwrap())
        .collect();
    let diffs: Vec<f64> = finals
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .collect();
    for r in diffs.windows(2).map(|d| d[0] / d[1]) {
        assert!((1.6..=2.4).contains(&r), "ratio {r} from {diffs:?}");
    }
}

#[test]
fn time_loop_reaches_the_discrete_steady_state() {
    // for a time-independent source the limit solves (K + B + G + L_s) w = b_f
    let disc = circle_disc(10, 1, 2);
    let f = |x: &Point<f64>, _: f64| 1.0 + x[0];
    let parts = assemble_parts(&disc, 1.0).unwrap();
    let zero = vec![0.0; disc.n_dofs()];
    let bf = RhsBuilder::new(&disc, 1.0, 1.0)
        .unwrap()
        .build(DiscreteField::PhiTimes(&zero), &f, 0.0)
        .unwrap();
    let coercive = parts.coercive_part().unwrap();
    let (steady, _) = BandLu::factor(&coercive).unwrap().solve_refined(&coercive, &bf, 1e-14, 5);

    let traj = solve_heat(
        &HeatProblem {
            disc: &disc,
            sigma: 1.0,
            grid: TimeGrid::new(20.0, 100).unwrap(),
            source: &f,
            initial: &|_: &Point<f64>| 0.0,
        },
        &SolverOptions::default(),
    )
    .unwrap();
    let last = traj.steps.last().unwrap();
    assert!(max_gap(last, &steady) <= 1e-9 * max_abs(&steady));
    // successive increments contract geometrically
    let inc: Vec<f64> = traj
        .steps
        .windows(2)
        .map(|w| max_gap(&w[0], &w[1]))
        .collect();
    let ratios: Vec<f64> = inc[5..30].windows(2).map(|w| w[1] / w[0]).collect();
    assert!(ratios.iter().all(|&r| r < 1.0));
    let spread = ratios.iter().fold(0.0f64, |m, r| m.max((r - ratios[0]).abs()));
    assert!(spread < 1e-3, "{ratios:?}");
}

#[test]
fn error_norms_are_scale_invariant() {
    let disc = circle_disc(12, 1, 2);
    let dt = 1.0 / 8.0;
    let traj = circle_problem_solve(&disc, 8, 1.0, 1.0);
    let case = circle_case::<f64>();
    let exact = case.exact.clone().unwrap();
    let alpha = 37.0;
    let scaled_traj = Trajectory {
        initial: traj.initial.iter().map(|v| alpha * v).collect(),
        steps: traj.steps.iter().map(|s| s.iter().map(|v| alpha * v).collect()).collect(),
        diagnostics: traj.diagnostics.clone(),
    };
    let (v, g) = (exact.value.clone(), exact.gradient.clone());
    let scaled_exact = ExactSolution {
        value: Arc::new(move |x: &Point<f64>, t| alpha * v(x, t)),
        gradient: Arc::new(move |x: &Point<f64>, t| {
            let d = g(x, t);
            [alpha * d[0], alpha * d[1], alpha * d[2]]
        }),
    };
    let a = error_l2h1(&disc, &traj, &exact, dt).unwrap();
    let b = error_l2h1(&disc, &scaled_traj, &scaled_exact, dt).unwrap();
    assert!((a - b).abs() <= 1e-13 * a);
    let a = error_linfl2(&disc, &traj, &exact, dt).unwrap();
    let b = error_linfl2(&disc, &scaled_traj, &scaled_exact, dt).unwrap();
    assert!((a - b).abs() <= 1e-13 * a);

    // the sup over levels bounds the last level; prefix errors never decrease
    let mut acc = NormAccumulator::default();
    let (mut sum_err, mut sum_ref, mut max_ref, mut prev) = (0.0, 0.0, 0.0f64, 0.0);
    let mut last = Default::default();
    for n in 0..traj.len() {
        last = level_integrals(&disc, traj.field(n), &exact, dt * n as f64);
        acc.push(dt, last);
        sum_err += dt * last.err_h1;
        sum_ref += dt * last.ref_h1;
        max_ref = max_ref.max(last.ref_l2);
        if sum_ref > 0.0 {
            let abs = acc.l2h1().unwrap() * sum_ref.sqrt();
            assert!((abs * abs - sum_err).abs() <= 1e-12 * sum_err);
            assert!(abs >= prev);
            prev = abs;
        }
    }
    let sup_abs = acc.linfl2().unwrap() * max_ref.sqrt();
    assert!(sup_abs >= last.err_l2.sqrt() * (1.0 - 1e-14));
}

#[test]
fn reference_integrals_are_converged() {
    let case = circle_case::<f64>();
    let exact = case.exact.clone().unwrap();
    for (k, l, n) in [(1, 2, 32), (1, 2, 64), (2, 3, 32), (2, 3, 64)] {
        let mesh = build_background_mesh(&case.domain, n).unwrap();
        let ls = interpolate_levelset(&case.levelset, &mesh, l).unwrap();
        let base = Discretization::with_levelset(mesh.clone(), ls.clone(), k, QuadratureOptions::default()).unwrap();
        let finer = Discretization::with_levelset(
            mesh,
            ls,
            k,
            QuadratureOptions {
                cell_exactness: Some(2 * (k + l) + 1),
                facet_exactness: None,
            },
        )
        .unwrap();
        let zero = vec![0.0; base.n_dofs()];
        for t in [0.25, 0.5, 1.0] {
            let a = level_integrals(&base, DiscreteField::PhiTimes(&zero), &exact, t).ref_h1;
            let b = level_integrals(&finer, DiscreteField::PhiTimes(&zero), &exact, t).ref_h1;
            assert!((a - b).abs() < 1e-8 * a, "k {k} n {n} t {t}");
        }
    }
}

#[test]
fn self_convergence_agrees_with_exact_errors() {
    let case = circle_case::<f64>();
    let mut s = RunSettings::<f64>::new(vec![8, 16, 32, 64]);
    s.reference_n = Some(256);
    let exact: Vec<_> = s.ladder.iter().map(|&n| run_exact(&case, &s, n, false).unwrap().record).collect();
    let mut no_exact = case.clone();
    no_exact.exact = None;
    let selfc: Vec<_> = run_self_convergence(&no_exact, &s).unwrap().into_iter().map(|p| p.record).collect();
    let oe = ConvergenceReport::new(exact).unwrap().orders;
    let os = ConvergenceReport::new(selfc).unwrap().orders;
    let (a, b) = (oe.l2h1.unwrap(), os.l2h1.unwrap());
    assert!((a - b).abs() < 0.2, "exact {a} self {b}");
}

#[test]
fn single_precision_tracks_double() {
    let lo = run_exact(&circle_case::<f32>(), &phifem::RunSettings32::new(vec![16]), 16, false).unwrap();
    let hi = run_exact(&circle_case::<f64>(), &phifem::RunSettings64::new(vec![16]), 16, false).unwrap();
    assert_eq!(lo.record.n_dofs, hi.record.n_dofs);
    assert!((lo.record.err_l2h1 - hi.record.err_l2h1).abs() < 1e-4 * hi.record.err_l2h1);
    assert!((lo.record.err_linfl2 - hi.record.err_linfl2).abs() < 1e-3 * hi.record.err_linfl2);
    assert!(lo.max_residual <= f64::from(<f32 as phifem::Real>::residual_tolerance()));
}
