mod common;

use perturb_core::analysis::{joint_diagonalize, shared_ldl};
use perturb_core::linalg::{Mat2, SymMat2};
use perturb_core::mesh::Mesh1D;
use perturb_core::harness::l2_norm_1d;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pm_split_reconstructs_with_signed_parts(b in common::sym_matrix()) {
        common::check_pm_split(&b)?;
    }

    #[test]
    fn ldl_pivots_are_leading_minor_ratios(c in common::sym_matrix()) {
        common::check_ldl_minors(&c)?;
    }

    #[test]
    fn classification_ignores_positive_scaling(
        v1 in common::velocity(),
        v2 in common::velocity(),
        s in 1e-6f64..1e6,
    ) {
        common::check_classification_scaling(v1, v2, s)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solvers_are_linear_in_the_load(s in -5.0f64..5.0, seed in 0u64..1000) {
        common::check_solver_linearity(s, seed)?;
    }

    #[test]
    fn joint_diagonalization_reconstructs(
        phi in 0.0f64..std::f64::consts::TAU,
        l in proptest::array::uniform4(-3.0f64..3.0),
    ) {
        let (s, c) = phi.sin_cos();
        let t = Mat2([[s, c], [-c, s]]);
        let build = |d: [f64; 2]| SymMat2::from_mat2(&t.mul(&Mat2::diag(d)).mul(&t.transpose()));
        let (a1, a2) = (build([l[0], l[1]]), build([l[2], l[3]]));
        let d = joint_diagonalize(&a1, &a2).unwrap();
        prop_assert!(d.reconstruct(d.lambda1).sub(&a1).norm() <= 1e-12 * a1.norm().max(1.0));
        prop_assert!(d.reconstruct(d.lambda2).sub(&a2).norm() <= 1e-12 * a2.norm().max(1.0));
        prop_assert!((d.t.det() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn shared_factor_reconstructs_both_matrices(
        l in -3.0f64..3.0,
        d in proptest::array::uniform4(-3.0f64..3.0),
    ) {
        prop_assume!(d[0].abs() > 1e-2 || d[2].abs() > 1e-2);
        let lower = Mat2([[1.0, 0.0], [l, 1.0]]);
        let build = |p: [f64; 2]| SymMat2::from_mat2(&lower.mul(&Mat2::diag(p)).mul(&lower.transpose()));
        let (a1, a2) = (build([d[0], d[1]]), build([d[2], d[3]]));
        let f = shared_ldl(&a1, &a2).unwrap();
        prop_assert!((f.l - l).abs() <= 1e-10 * (1.0 + l.abs()));
        let back = |p: [f64; 2]| lower.mul(&Mat2::diag(p)).mul(&lower.transpose());
        let scale = a1.norm().max(a2.norm()).max(1.0);
        prop_assert!(back(f.d_a1).sub(&a1.to_mat2()).max_abs() <= 1e-9 * scale);
        prop_assert!(back(f.d_a2).sub(&a2.to_mat2()).max_abs() <= 1e-9 * scale);
    }

    #[test]
    fn constant_has_exact_l2_norm_on_uniform_meshes(n in 2usize..200, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let mesh = Mesh1D::uniform(n).unwrap();
        let v = vec![[a, b]; n + 1];
        let got = l2_norm_1d(&mesh, &v);
        prop_assert!((got - a.hypot(b)).abs() <= 1e-14 * a.hypot(b).max(1.0));
    }
}
