//! Reduced (ε = 0) problems.
//!
//! 1D: `C u0' + R u0 = f` with one boundary functional per transformed
//! component on its inflow endpoint. 2D: decoupled transport equations
//! `λ^k . ∇v_k + ρ v_k = f~_k`, integrated along characteristics from the
//! inflow boundary.

use crate::analysis::{
    classify_boundary, classify_endpoints, diagonalize, joint_diagonalize, ldl,
    reduced_bcs_one_param, reduced_bcs_two_param, shared_ldl, JointDiagonalization, ReducedBc,
    SharedLdl,
};
use crate::error::{Error, Result};
use crate::linalg::quad::CompositeRule;
use crate::linalg::small::{add, dot, scale};
use crate::linalg::{Mat2, SymMat2, Vec2};
use crate::system::{BoundaryPart, CoupledSystem1D, CoupledSystem2D, Rhs1D, Rhs2D};
use crate::validate::is_characteristic;
use std::fmt::Write as _;

const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Particular {
    /// Ascending polynomial coefficients.
    Polynomial(Vec<Vec2>),
    /// `∫_0^x exp(M (x - s)) C^{-1} f(s) ds` by composite Gauss-Legendre.
    Quadrature { panels: usize },
}

/// `u0(x) = exp(M x) c + w0(x)` with `M = -C^{-1} R`.
#[derive(Debug, Clone)]
pub struct ReducedSolution1D {
    c_inv: Mat2,
    reaction: SymMat2,
    rhs: Rhs1D,
    m: Mat2,
    particular: Particular,
    rule: CompositeRule,
    pub coefficients: Vec2,
    pub bcs: ReducedBc,
}

impl ReducedSolution1D {
    /// Particular solution `w0` with `w0(0) = 0` (polynomial case: the
    /// polynomial itself).
    pub fn particular(&self, x: f64) -> Vec2 {
        match &self.particular {
            Particular::Polynomial(a) => a
                .iter()
                .rev()
                .fold([0.0, 0.0], |acc, c| [acc[0] * x + c[0], acc[1] * x + c[1]]),
            Particular::Quadrature { panels } => {
                if x == 0.0 {
                    return [0.0, 0.0];
                }
                let mut total = [0.0, 0.0];
                let h = x / *panels as f64;
                for p in 0..*panels {
                    let a = p as f64 * h;
                    let part = self.rule.integrate2(a, a + h, |s| {
                        self.m
                            .exp_scaled(x - s)
                            .mul_vec(self.c_inv.mul_vec(self.rhs.eval(s)))
                    });
                    total = add(total, part);
                }
                total
            }
        }
    }

    /// Fundamental matrix `exp(M x)`; its columns span the homogeneous solutions.
    pub fn homogeneous_basis(&self, x: f64) -> Mat2 {
        self.m.exp_scaled(x)
    }

    pub fn eval(&self, x: f64) -> Vec2 {
        add(
            self.homogeneous_basis(x).mul_vec(self.coefficients),
            self.particular(x),
        )
    }

    /// `u0' = C^{-1} (f - R u0)`.
    pub fn derivative(&self, x: f64) -> Vec2 {
        let u = self.eval(x);
        let r = self.reaction.mul_vec(u);
        let f = self.rhs.eval(x);
        self.c_inv.mul_vec([f[0] - r[0], f[1] - r[1]])
    }

    /// Largest `|C u0' + R u0 - f|` over `samples` equispaced points, with
    /// `u0'` from a fourth-order difference independent of [`Self::derivative`].
    pub fn pde_residual(&self, convection: &SymMat2, samples: usize) -> f64 {
        let h = 1e-3;
        (0..samples)
            .map(|i| {
                let x = 0.05 + 0.9 * i as f64 / (samples - 1).max(1) as f64;
                let (u2p, up) = (self.eval(x + 2.0 * h), self.eval(x + h));
                let (um, u2m) = (self.eval(x - h), self.eval(x - 2.0 * h));
                let d = |c: usize| (8.0 * (up[c] - um[c]) - (u2p[c] - u2m[c])) / (12.0 * h);
                let du = [d(0), d(1)];
                let lhs = add(convection.mul_vec(du), self.reaction.mul_vec(self.eval(x)));
                let f = self.rhs.eval(x);
                (lhs[0] - f[0]).abs().max((lhs[1] - f[1]).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Largest boundary functional value.
    pub fn bc_residual(&self) -> f64 {
        self.bcs.max_residual(|p| match p {
            BoundaryPart::Endpoint(e) => self.eval(e.x()),
            BoundaryPart::Edge(_) => [f64::NAN, f64::NAN],
        })
    }

    pub fn to_csv(&self, xs: &[f64]) -> String {
        let mut s = String::from("x,u01,u02\n");
        for &x in xs {
            let u = self.eval(x);
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", x, u[0], u[1]);
        }
        s
    }
}

fn polynomial_particular(c: &SymMat2, r: &SymMat2, c_inv: &Mat2, f: &[Vec2]) -> Option<Vec<Vec2>> {
    if r.is_zero() {
        let mut a = vec![[0.0, 0.0]; f.len() + 1];
        for (k, fk) in f.iter().enumerate() {
            a[k + 1] = scale(c_inv.mul_vec(*fk), 1.0 / (k + 1) as f64);
        }
        return Some(a);
    }
    let rn = r.norm();
    if r.det().abs() <= SINGULAR_TOL * rn * rn {
        return None;
    }
    let rm = r.to_mat2();
    let mut a = vec![[0.0, 0.0]; f.len()];
    for k in (0..f.len()).rev() {
        let next = if k + 1 < f.len() {
            scale(c.mul_vec(a[k + 1]), (k + 1) as f64)
        } else {
            [0.0, 0.0]
        };
        a[k] = rm.solve([f[k][0] - next[0], f[k][1] - next[1]])?;
    }
    // a weak reaction makes the polynomial large and the fit cancel
    // against exp(M x); quadrature of the variation-of-constants
    // integral stays well scaled
    let size = |v: &[Vec2]| v.iter().map(|c| c[0].abs().max(c[1].abs())).fold(0.0, f64::max);
    if size(&a) > 100.0 * c_inv.max_abs() * size(f).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(a)
}

/// Solve the reduced 1D problem for the given boundary functionals.
pub fn solve_reduced_1d(sys: &CoupledSystem1D, bcs: &ReducedBc) -> Result<ReducedSolution1D> {
    let c = sys.convection;
    if is_characteristic(&c) {
        return Err(Error::SingularConvection(c.det()));
    }
    let c_inv = c.to_mat2().inverse().ok_or(Error::SingularConvection(c.det()))?;
    let m = c_inv.mul(&sys.reaction.to_mat2()).scaled(-1.0);
    let particular = match polynomial_particular(&c, &sys.reaction, &c_inv, &sys.rhs.coefficients()) {
        Some(a) => Particular::Polynomial(a),
        None => Particular::Quadrature {
            panels: 8 + (8.0 * m.norm()).ceil() as usize,
        },
    };
    let mut sol = ReducedSolution1D {
        c_inv,
        reaction: sys.reaction,
        rhs: sys.rhs.clone(),
        m,
        particular,
        rule: CompositeRule::new(12, 1),
        coefficients: [0.0, 0.0],
        bcs: bcs.clone(),
    };
    if bcs.entries.len() != 2 {
        return Err(Error::IncompatibleBcs(format!(
            "need 2 boundary functionals, got {}",
            bcs.entries.len()
        )));
    }
    let mut rows = [[0.0; 2]; 2];
    let mut rhs = [0.0; 2];
    for (i, e) in bcs.entries.iter().enumerate() {
        let x = match e.location {
            BoundaryPart::Endpoint(p) => p.x(),
            BoundaryPart::Edge(edge) => {
                return Err(Error::IncompatibleBcs(format!("edge {edge} in a 1D problem")))
            }
        };
        let phi = sol.homogeneous_basis(x);
        rows[i] = phi.transpose().mul_vec(e.functional);
        rhs[i] = -dot(e.functional, sol.particular(x));
    }
    let a = Mat2(rows);
    let an = a.norm();
    if an == 0.0 || a.det().abs() <= SINGULAR_TOL * an * an {
        return Err(Error::IncompatibleBcs(format!(
            "boundary system {:?} is singular",
            a.0
        )));
    }
    sol.coefficients = a.solve(rhs).ok_or_else(|| Error::IncompatibleBcs("singular".into()))?;
    Ok(sol)
}

/// Reduced boundary functionals of a 1D system: eigenvector rows for one
/// small parameter, `L^T` rows for two.
pub fn reduced_bcs_1d(sys: &CoupledSystem1D) -> Result<ReducedBc> {
    if sys.perturbation.is_two_param() {
        let f = ldl(&sys.convection)?;
        reduced_bcs_two_param(f.l, &classify_endpoints(f.pivots()))
    } else {
        let d = diagonalize(&sys.convection);
        reduced_bcs_one_param(&d, &classify_endpoints(d.lambda1))
    }
}

/// Analysis plus reduced solve.
pub fn reduced_1d(sys: &CoupledSystem1D) -> Result<ReducedSolution1D> {
    solve_reduced_1d(sys, &reduced_bcs_1d(sys)?)
}

/// `u0 = back . v`, where `v_k` solves `λ^k . ∇v_k + ρ v_k = (forward . f)_k`
/// with `v_k = 0` on its inflow edges.
#[derive(Debug, Clone)]
pub struct ReducedSolution2D {
    pub velocities: [Vec2; 2],
    pub back: Mat2,
    pub forward: Mat2,
    pub rho: f64,
    rhs: Rhs2D,
    rule: CompositeRule,
}

/// Time to reach the boundary going backwards along `velocity` from `x`.
pub fn exit_time(x: Vec2, velocity: Vec2) -> f64 {
    (0..2)
        .map(|i| {
            let l = velocity[i];
            if l > 0.0 {
                x[i] / l
            } else if l < 0.0 {
                (x[i] - 1.0) / l
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min)
}

impl ReducedSolution2D {
    pub fn transformed_rhs(&self, x1: f64, x2: f64) -> Vec2 {
        self.forward.mul_vec(self.rhs.eval(x1, x2))
    }

    pub fn eval_transformed(&self, x1: f64, x2: f64) -> Vec2 {
        let mut v = [0.0; 2];
        for (k, vk) in v.iter_mut().enumerate() {
            let lam = self.velocities[k];
            let t = exit_time([x1, x2], lam);
            *vk = if let Some(f) = self.rhs.as_constant() {
                let fk = self.forward.mul_vec(f)[k];
                if self.rho == 0.0 {
                    fk * t
                } else {
                    fk * (-(-self.rho * t).exp_m1()) / self.rho
                }
            } else {
                self.rule
                    .integrate2(0.0, t, |tau| {
                        let g = self.transformed_rhs(x1 - tau * lam[0], x2 - tau * lam[1]);
                        [(-self.rho * tau).exp() * g[k], 0.0]
                    })[0]
            };
        }
        v
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Vec2 {
        self.back.mul_vec(self.eval_transformed(x1, x2))
    }

    /// Largest `|λ^k . ∇v_k + ρ v_k - f~_k|` on an interior sample grid,
    /// derivatives by centered differences along `λ^k`.
    pub fn transport_residual(&self, samples: usize) -> f64 {
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            for j in 0..samples {
                let x1 = 0.1 + 0.8 * i as f64 / (samples - 1).max(1) as f64;
                let x2 = 0.1 + 0.8 * j as f64 / (samples - 1).max(1) as f64;
                let f = self.transformed_rhs(x1, x2);
                let v = self.eval_transformed(x1, x2);
                for k in 0..2 {
                    let lam = self.velocities[k];
                    let n = lam[0].hypot(lam[1]);
                    let s = h / n;
                    let vp = self.eval_transformed(x1 + s * lam[0], x2 + s * lam[1])[k];
                    let vm = self.eval_transformed(x1 - s * lam[0], x2 - s * lam[1])[k];
                    let r = (vp - vm) / (2.0 * s) + self.rho * v[k] - f[k];
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// Sampled CSV on a tensor grid, `x1` fastest.
    pub fn to_csv(&self, x1s: &[f64], x2s: &[f64]) -> String {
        let mut s = String::from("x1,x2,u01,u02\n");
        for &x2 in x2s {
            for &x1 in x1s {
                let u = self.eval(x1, x2);
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", x1, x2, u[0], u[1]);
            }
        }
        s
    }
}

fn characteristic_check(v: [Vec2; 2]) -> Result<()> {
    let cls = classify_boundary(v[0], v[1]);
    // a tangential component has no well-posed inflow data
    reduced_bcs_two_param(0.0, &cls).map(|_| ())
}

/// One small parameter: `v = T^T u` decouples the reduced problem.
pub fn solve_reduced_2d(
    sys: &CoupledSystem2D,
    diag: &JointDiagonalization,
) -> Result<ReducedSolution2D> {
    let velocities = [diag.velocity(0), diag.velocity(1)];
    characteristic_check(velocities)?;
    Ok(ReducedSolution2D {
        velocities,
        back: diag.t,
        forward: diag.t.transpose(),
        rho: sys.rho,
        rhs: sys.rhs.clone(),
        rule: CompositeRule::new(12, 4),
    })
}

/// Two small parameters with a shared `L` and `ρ = 0`: `w = L^T u`
/// solves `Σ_i D_i ∂w/∂x_i = L^{-1} f`.
pub fn solve_reduced_2d_two_param(
    sys: &CoupledSystem2D,
    factor: &SharedLdl,
) -> Result<ReducedSolution2D> {
    if sys.rho != 0.0 {
        return Err(Error::InvalidInput(
            "two-parameter reduced problem needs rho = 0 (L^T does not diagonalize rho I)".into(),
        ));
    }
    let velocities = [factor.velocity(0), factor.velocity(1)];
    characteristic_check(velocities)?;
    let l_inv = factor.lower().inverse().expect("unit triangular");
    Ok(ReducedSolution2D {
        velocities,
        back: l_inv.transpose(),
        forward: l_inv,
        rho: 0.0,
        rhs: sys.rhs.clone(),
        rule: CompositeRule::new(12, 4),
    })
}

/// Analysis plus reduced solve, dispatching on the perturbation type.
pub fn reduced_2d(sys: &CoupledSystem2D) -> Result<ReducedSolution2D> {
    if sys.perturbation.is_two_param() {
        solve_reduced_2d_two_param(sys, &shared_ldl(&sys.a1, &sys.a2)?)
    } else {
        solve_reduced_2d(sys, &joint_diagonalize(&sys.a1, &sys.a2)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{make_preset, Preset};
    use crate::system::Endpoint;

    fn example() -> CoupledSystem1D {
        make_preset(Preset::Example1D).into_1d().unwrap()
    }

    #[test]
    fn example_reduced_solution_is_the_affine_oracle() {
        // hand elimination: u0 = C^{-1} f x + c with (1,-2).u0(0) = 0,
        // (2,1).u0(1) = 0 gives c = (8/25, 4/25), slope (-11/25, 2/25)
        let sys = example();
        let r = reduced_1d(&sys).unwrap();
        for x in [0.0, 0.3, 1.0] {
            let u = r.eval(x);
            assert!((u[0] - (8.0 - 11.0 * x) / 25.0).abs() < 1e-15);
            assert!((u[1] - (4.0 + 2.0 * x) / 25.0).abs() < 1e-15);
        }
        assert!(r.pde_residual(&sys.convection, 100) < 1e-10);
        assert!(r.bc_residual() < 1e-15);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = example().with_rhs(Rhs1D::Constant { value: [0.0, 0.0] });
        let r = reduced_1d(&sys).unwrap();
        assert_eq!(r.eval(0.4), [0.0, 0.0]);
    }

    #[test]
    fn swapped_endpoints_give_a_different_solution() {
        let sys = example();
        let mut bcs = reduced_bcs_1d(&sys).unwrap();
        for e in &mut bcs.entries {
            e.location = match e.location {
                BoundaryPart::Endpoint(Endpoint::Zero) => BoundaryPart::Endpoint(Endpoint::One),
                _ => BoundaryPart::Endpoint(Endpoint::Zero),
            };
        }
        let r = solve_reduced_1d(&sys, &bcs).unwrap();
        assert!(r.bc_residual() < 1e-15);
        assert!(r.pde_residual(&sys.convection, 50) < 1e-10);
        // (1,-2).u(1) = 0 and (2,1).u(0) = 0 with slope (-11,2)/25
        // gives u(0) = (3/25, -6/25)
        let u0 = r.eval(0.0);
        assert!((u0[0] - 3.0 / 25.0).abs() < 1e-14 && (u0[1] + 6.0 / 25.0).abs() < 1e-14);
    }

    #[test]
    fn reaction_paths_satisfy_the_ode() {
        let base = example();
        let rhs = Rhs1D::Polynomial {
            coeffs: vec![[1.0, 2.0], [0.0, -1.0], [3.0, 0.0]],
        };
        for reaction in [SymMat2::new(1.0, 0.25, 0.5), SymMat2::new(20.0, 1.0, 10.0), SymMat2::diag(1.0, 0.0)] {
            let sys = CoupledSystem1D {
                reaction,
                rhs: rhs.clone(),
                ..base.clone()
            };
            let r = reduced_1d(&sys).unwrap();
            let res = r.pde_residual(&sys.convection, 100);
            assert!(res < 1e-10, "{reaction:?}: {res:e}");
            assert!(r.bc_residual() < 1e-12);
            let d = r.derivative(0.5);
            let h = 1e-6;
            let fd = (r.eval(0.5 + h)[0] - r.eval(0.5 - h)[0]) / (2.0 * h);
            assert!((d[0] - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn rhs_shift_shifts_slope() {
        // f -> f + C c shifts u0' by c when R = 0
        let sys = example();
        let c = [0.25, -0.5];
        let shift = sys.convection.mul_vec(c);
        let shifted = sys.with_rhs(Rhs1D::Constant {
            value: [1.0 + shift[0], 2.0 + shift[1]],
        });
        let (a, b) = (reduced_1d(&sys).unwrap(), reduced_1d(&shifted).unwrap());
        let (da, db) = (a.derivative(0.5), b.derivative(0.5));
        assert!((db[0] - da[0] - c[0]).abs() < 1e-14 && (db[1] - da[1] - c[1]).abs() < 1e-14);
    }

    #[test]
    fn singular_convection_is_rejected() {
        let sys = CoupledSystem1D {
            convection: SymMat2::diag(1.0, 0.0),
            ..example()
        };
        let bcs = ReducedBc::default();
        assert!(matches!(
            solve_reduced_1d(&sys, &bcs),
            Err(Error::SingularConvection(_))
        ));
    }

    #[test]
    fn case_i_value_is_min_coordinate() {
        let sys = make_preset(Preset::CaseI).into_2d().unwrap();
        let r = reduced_2d(&sys).unwrap();
        for (x1, x2) in [(0.2, 0.7), (0.9, 0.4), (0.5, 0.5)] {
            let v = r.eval_transformed(x1, x2);
            assert!((v[0] - f64::min(x1, x2)).abs() < 1e-15);
        }
        assert!(r.transport_residual(9) < 1e-8);
    }

    #[test]
    fn duct_flow_transformed_rhs() {
        let sys = make_preset(Preset::DuctFlow).into_2d().unwrap();
        let r = reduced_2d(&sys).unwrap();
        let f = r.transformed_rhs(0.3, 0.3);
        assert!(f[0].abs() < 1e-15 && (f[1] - 2f64.sqrt()).abs() < 1e-15);
        // inflow of component 2 (velocity (-1,-1)) is the right and top edges
        assert!(r.eval_transformed(1.0, 0.4)[1].abs() < 1e-15);
        assert!((r.eval_transformed(0.2, 0.6)[1] - 0.4 * 2f64.sqrt()).abs() < 1e-15);
        assert!(r.transport_residual(9) < 1e-8);
    }

    #[test]
    fn polynomial_rhs_and_reaction_in_2d() {
        let mut sys = make_preset(Preset::CaseIII).into_2d().unwrap();
        sys.rho = 0.7;
        sys.rhs = Rhs2D::Polynomial {
            coeffs: vec![vec![[1.0, 0.0], [0.0, 1.0]], vec![[2.0, -1.0]]],
        };
        let r = reduced_2d(&sys).unwrap();
        assert!(r.transport_residual(7) < 1e-8);
    }

    #[test]
    fn two_param_reduced_2d_satisfies_transport() {
        let sys = make_preset(Preset::Example2DTwoParam).into_2d().unwrap();
        let r = reduced_2d(&sys).unwrap();
        assert!(r.transport_residual(7) < 1e-8);
        let mut with_rho = sys.clone();
        with_rho.rho = 1.0;
        assert!(matches!(reduced_2d(&with_rho), Err(Error::InvalidInput(_))));
        // A1 u_x1 + A2 u_x2 = f checked directly
        let h = 1e-6;
        let (x1, x2) = (0.4, 0.55);
        let du1 = crate::linalg::small::sub(r.eval(x1 + h, x2), r.eval(x1 - h, x2));
        let du2 = crate::linalg::small::sub(r.eval(x1, x2 + h), r.eval(x1, x2 - h));
        let lhs = add(sys.a1.mul_vec(scale(du1, 0.5 / h)), sys.a2.mul_vec(scale(du2, 0.5 / h)));
        assert!((lhs[0] - 1.0).abs() < 1e-7 && (lhs[1] - 2.0).abs() < 1e-7);
    }

    #[test]
    fn characteristic_velocity_is_rejected() {
        let mut sys = make_preset(Preset::CaseI).into_2d().unwrap();
        sys.a2 = SymMat2::diag(1.0, 0.0);
        let d = joint_diagonalize(&sys.a1, &sys.a2).unwrap();
        assert!(matches!(
            solve_reduced_2d(&sys, &d),
            Err(Error::CharacteristicBoundary(_))
        ));
    }
}
