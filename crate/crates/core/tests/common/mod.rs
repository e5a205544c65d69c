#![allow(dead_code)]

use perturb_core::linalg::{Mat2, SymMat2};
use perturb_core::system::{CoupledSystem2D, PerturbationSpec, Rhs2D};
use rand::Rng;

/// Speed bounded away from zero so no edge is characteristic.
fn speed<R: Rng>(rng: &mut R) -> f64 {
    let s: f64 = rng.random_range(0.2..2.0);
    if rng.random_bool(0.5) {
        s
    } else {
        -s
    }
}

/// `A_i = T diag(λ_i) T^T` for a random rotation `T`, random constant `f`.
pub fn random_commuting_system<R: Rng>(rng: &mut R) -> CoupledSystem2D {
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (s, c) = phi.sin_cos();
    let t = Mat2([[s, c], [-c, s]]);
    let build = |l: [f64; 2]| SymMat2::from_mat2(&t.mul(&Mat2::diag(l)).mul(&t.transpose()));
    let l1 = [speed(rng), speed(rng)];
    let l2 = [speed(rng), speed(rng)];
    CoupledSystem2D {
        perturbation: PerturbationSpec::OneParam {
            eps: 10f64.powf(rng.random_range(-3.0..-1.0)),
        },
        a1: build(l1),
        a2: build(l2),
        rho: rng.random_range(0.0..1.0),
        rhs: Rhs2D::Constant {
            value: [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
        },
    }
}

use perturb_core::analysis::{classify_boundary, ldl, split_pm};
use perturb_core::linalg::Vec2;
use proptest::prelude::*;

pub fn sym_entry() -> impl Strategy<Value = f64> {
    -10.0f64..10.0
}

pub fn sym_matrix() -> impl Strategy<Value = SymMat2> {
    (sym_entry(), sym_entry(), sym_entry()).prop_map(|(a, b, c)| SymMat2::new(a, b, c))
}

pub fn velocity() -> impl Strategy<Value = Vec2> {
    (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| [a, b])
}

/// `B+ + B- = B`, `B+ >= 0`, `B- <= 0`, and `B+ B- = 0`.
pub fn check_pm_split(b: &SymMat2) -> Result<(), TestCaseError> {
    let Ok(s) = split_pm(b) else {
        // characteristic matrices are rejected, not split
        prop_assert!(b.det().abs() <= 1e-10 * b.norm().powi(2).max(1e-300));
        return Ok(());
    };
    let tol = 1e-12 * b.norm().max(1.0);
    prop_assert!(s.b_plus.add(&s.b_minus).sub(b).norm() <= tol);
    prop_assert!(s.b_plus.eigen().values.iter().all(|&l| l >= -tol));
    prop_assert!(s.b_minus.eigen().values.iter().all(|&l| l <= tol));
    prop_assert!(s.b_plus.to_mat2().mul(&s.b_minus.to_mat2()).max_abs() <= tol * b.norm().max(1.0));
    Ok(())
}

/// `d1 = c11`, `d1 d2 = det C`, `L D L^T = C`.
pub fn check_ldl_minors(c: &SymMat2) -> Result<(), TestCaseError> {
    prop_assume!(c.a11.abs() > 1e-3);
    let f = ldl(c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let scale = c.norm().max(1.0);
    prop_assert_eq!(f.d1, c.a11);
    prop_assert!((f.d1 * f.d2 - c.det()).abs() <= 1e-12 * scale * scale / c.a11.abs().min(1.0));
    prop_assert!(f.reconstruct().sub(c).norm() <= 1e-12 * scale / c.a11.abs().min(1.0));
    Ok(())
}

pub fn check_classification_scaling(v1: Vec2, v2: Vec2, s: f64) -> Result<(), TestCaseError> {
    let a = classify_boundary(v1, v2);
    let b = classify_boundary([v1[0] * s, v1[1] * s], [v2[0] * s, v2[1] * s]);
    prop_assert_eq!(a, b);
    Ok(())
}

/// Scaling `f` by `s` scales every solver's output by `s` to rounding.
pub fn check_solver_linearity(s: f64, seed: u64) -> Result<(), TestCaseError> {
    use perturb_core::analysis::{joint_diagonalize, layer_catalog_1d, layer_catalog_2d};
    use perturb_core::mesh::{shishkin_mesh, shishkin_mesh_2d};
    use perturb_core::reduce::{reduced_1d, reduced_2d};
    use perturb_core::solve1d::{solve_fd_1d, Scheme};
    use perturb_core::solve2d::{solve_fd_2d, solve_transformed_2d};
    use perturb_core::system::{CoupledSystem1D, Rhs1D};
    use rand::SeedableRng;

    let fail = |e: perturb_core::Error| TestCaseError::fail(e.to_string());
    let scaled_close = |a: &[Vec2], b: &[Vec2]| {
        let scale = a.iter().fold(1.0f64, |m, u| m.max(u[0].abs()).max(u[1].abs())) * s.abs().max(1.0);
        a.iter()
            .zip(b)
            .all(|(u, v)| (s * u[0] - v[0]).abs() <= 1e-12 * scale && (s * u[1] - v[1]).abs() <= 1e-12 * scale)
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let sys2 = random_commuting_system(&mut rng);
    let sys2s = sys2.with_rhs(sys2.rhs.scaled(s));
    let mesh2 = shishkin_mesh_2d(16, &layer_catalog_2d(&sys2).map_err(fail)?, 2.0).map_err(fail)?;
    for scheme in [Scheme::Central, Scheme::Upwind] {
        let a = solve_fd_2d(&sys2, &mesh2, scheme).map_err(fail)?;
        let b = solve_fd_2d(&sys2s, &mesh2, scheme).map_err(fail)?;
        prop_assert!(scaled_close(&a.values, &b.values), "solve_fd_2d {:?}", scheme);
    }
    let d = joint_diagonalize(&sys2.a1, &sys2.a2).map_err(fail)?;
    let a = solve_transformed_2d(&sys2, &d, &mesh2, Scheme::Central).map_err(fail)?;
    let b = solve_transformed_2d(&sys2s, &d, &mesh2, Scheme::Central).map_err(fail)?;
    prop_assert!(scaled_close(&a.values, &b.values), "solve_transformed_2d");
    let (ra, rb) = (reduced_2d(&sys2).map_err(fail)?, reduced_2d(&sys2s).map_err(fail)?);
    let pts: Vec<(f64, f64)> = (0..5).flat_map(|i| (0..5).map(move |j| (i as f64 / 4.0, j as f64 / 4.0))).collect();
    let ua: Vec<Vec2> = pts.iter().map(|p| ra.eval(p.0, p.1)).collect();
    let ub: Vec<Vec2> = pts.iter().map(|p| rb.eval(p.0, p.1)).collect();
    prop_assert!(scaled_close(&ua, &ub), "reduced_2d");

    let sys1 = CoupledSystem1D {
        perturbation: sys2.perturbation,
        convection: sys2.a1,
        reaction: SymMat2::diag(sys2.rho, sys2.rho),
        rhs: Rhs1D::Polynomial {
            coeffs: vec![[rng.random_range(-2.0..2.0), 1.0], [0.5, rng.random_range(-2.0..2.0)]],
        },
    };
    let sys1s = sys1.with_rhs(sys1.rhs.scaled(s));
    let mesh1 = shishkin_mesh(64, &layer_catalog_1d(&sys1).map_err(fail)?, 2.0).map_err(fail)?;
    for scheme in [Scheme::Central, Scheme::Upwind] {
        let a = solve_fd_1d(&sys1, &mesh1, scheme).map_err(fail)?;
        let b = solve_fd_1d(&sys1s, &mesh1, scheme).map_err(fail)?;
        prop_assert!(scaled_close(&a.values, &b.values), "solve_fd_1d {:?}", scheme);
    }
    let (ra, rb) = (reduced_1d(&sys1).map_err(fail)?, reduced_1d(&sys1s).map_err(fail)?);
    let ua: Vec<Vec2> = mesh1.nodes.iter().map(|&x| ra.eval(x)).collect();
    let ub: Vec<Vec2> = mesh1.nodes.iter().map(|&x| rb.eval(x)).collect();
    prop_assert!(scaled_close(&ua, &ub), "reduced_1d");
    Ok(())
}
