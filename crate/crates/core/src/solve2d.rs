//! Finite differences for `-E Δu + A1 u_x1 + A2 u_x2 + ρ u = f` on the unit
//! square with `u = 0` on the boundary.
//!
//! Each direction reuses the 1D three-point stencil, so the 2D operator is a
//! 5-point Laplacian per component plus 2×2 convection blocks. Unknowns are
//! interior nodes only, `x1` fastest, with the two components adjacent.

use crate::analysis::{commutes, shared_ldl, JointDiagonalization, SharedLdl, COMMUTE_TOL};
use crate::error::{Error, Result};
use crate::linalg::sparse::CsrMatrix;
use crate::linalg::{solve_sparse, LinearSolver, Mat2, SymMat2, Vec2};
use crate::mesh::Mesh2D;
use crate::par::{self, Execution};
use crate::solve1d::{rowwise_split, stencil, Scheme};
use crate::system::{CoupledSystem2D, PerturbationSpec};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Largest supported node count per direction.
pub const MAX_NODES_PER_DIR: usize = 513;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveOptions {
    pub scheme: Scheme,
    pub solver: LinearSolver,
    pub exec: Option<Execution>,
}

impl SolveOptions {
    pub fn new(scheme: Scheme) -> Self {
        SolveOptions {
            scheme,
            ..Default::default()
        }
    }

    fn exec(&self) -> Execution {
        self.exec.unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSolution2D {
    pub mesh: Mesh2D,
    /// Indexed by `mesh.index(i, j)`.
    pub values: Vec<Vec2>,
}

impl DiscreteSolution2D {
    pub fn at(&self, i: usize, j: usize) -> Vec2 {
        self.values[self.mesh.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0f64, |m, u| m.max(u[0].abs()).max(u[1].abs()))
    }

    /// CSV with columns `x1,x2,u1,u2`, one row per node, `x1` fastest.
    pub fn to_csv(&self) -> String {
        let (n1, n2) = self.mesh.shape();
        let mut s = String::with_capacity(80 * n1 * n2 + 16);
        s.push_str("x1,x2,u1,u2\n");
        for j in 0..n2 {
            for i in 0..n1 {
                let u = self.at(i, j);
                let _ = writeln!(
                    s,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.mesh.x1.nodes[i], self.mesh.x2.nodes[j], u[0], u[1]
                );
            }
        }
        s
    }

    /// Legacy VTK structured grid with point data `u1` and `u2`.
    pub fn to_vtk(&self) -> String {
        let (n1, n2) = self.mesh.shape();
        let mut s = String::new();
        s.push_str("# vtk DataFile Version 3.0\nsolution\nASCII\nDATASET STRUCTURED_GRID\n");
        let _ = writeln!(s, "DIMENSIONS {n1} {n2} 1");
        let _ = writeln!(s, "POINTS {} double", n1 * n2);
        for j in 0..n2 {
            for i in 0..n1 {
                let _ = writeln!(
                    s,
                    "{:.16e} {:.16e} 0",
                    self.mesh.x1.nodes[i], self.mesh.x2.nodes[j]
                );
            }
        }
        let _ = writeln!(s, "POINT_DATA {}", n1 * n2);
        for c in 0..2 {
            let _ = writeln!(s, "SCALARS u{} double 1\nLOOKUP_TABLE default", c + 1);
            for u in &self.values {
                let _ = writeln!(s, "{:.16e}", u[c]);
            }
        }
        s
    }
}

fn check_mesh(mesh: &Mesh2D) -> Result<()> {
    let (n1, n2) = mesh.shape();
    if n1.max(n2) > MAX_NODES_PER_DIR {
        return Err(Error::MeshTooLarge {
            nodes: n1.max(n2),
            max: MAX_NODES_PER_DIR,
        });
    }
    if !mesh.x1.is_valid() || !mesh.x2.is_valid() {
        return Err(Error::InvalidInput("mesh must increase strictly from 0 to 1".into()));
    }
    Ok(())
}

/// Upwind splits `(P, Q)` of `A1` and `A2`.
///
/// Commuting one-parameter systems split along the shared eigenvectors and
/// shared-`L` two-parameter systems along `L D± L^T`. Anything else falls
/// back to the per-equation rule on the diagonal (a heuristic).
pub fn upwind_splits_2d(sys: &CoupledSystem2D) -> [(Mat2, Mat2); 2] {
    let spectral = |a: &SymMat2| {
        let (p, q) = a.spectral_parts();
        (p.to_mat2(), q.to_mat2())
    };
    match sys.perturbation {
        PerturbationSpec::OneParam { .. } if commutes(&sys.a1, &sys.a2) => {
            [spectral(&sys.a1), spectral(&sys.a2)]
        }
        PerturbationSpec::TwoParam { .. } => match shared_ldl(&sys.a1, &sys.a2) {
            Ok(f) => {
                let l = f.lower();
                let part = |d: Vec2| l.mul(&Mat2::diag(d)).mul(&l.transpose());
                let split = |d: Vec2| {
                    (
                        part([d[0].max(0.0), d[1].max(0.0)]),
                        part([d[0].min(0.0), d[1].min(0.0)]),
                    )
                };
                [split(f.d_a1), split(f.d_a2)]
            }
            Err(_) => [rowwise_split(&sys.a1.to_mat2()), rowwise_split(&sys.a2.to_mat2())],
        },
        _ => [rowwise_split(&sys.a1.to_mat2()), rowwise_split(&sys.a2.to_mat2())],
    }
}

/// Discrete operator and right-hand side over the interior nodes.
///
/// Unknown `2 k + c` belongs to interior node `k = (j-1)(n1-2) + (i-1)`.
pub fn assemble_2d(
    sys: &CoupledSystem2D,
    mesh: &Mesh2D,
    scheme: Scheme,
    exec: Execution,
) -> (CsrMatrix, Vec<f64>) {
    let (n1, n2) = mesh.shape();
    let (m1, m2) = (n1.saturating_sub(2), n2.saturating_sub(2));
    let e = sys.perturbation.diffusion();
    let (a1, a2) = (sys.a1.to_mat2(), sys.a2.to_mat2());
    let splits = (scheme == Scheme::Upwind).then(|| upwind_splits_2d(sys));
    let reaction = Mat2::diag([sys.rho, sys.rho]);
    let unknown = |i: usize, j: usize| 2 * ((j - 1) * m1 + (i - 1));

    let lines = par::map_range(exec, m2, |jj| {
        let j = jj + 1;
        let mut rows = Vec::with_capacity(2 * m1);
        let mut rhs = Vec::with_capacity(2 * m1);
        for i in 1..=m1 {
            let sx = stencil(
                e,
                &a1,
                splits.as_ref().map(|s| &s[0]),
                mesh.x1.h(i),
                mesh.x1.h(i + 1),
            );
            let sy = stencil(
                e,
                &a2,
                splits.as_ref().map(|s| &s[1]),
                mesh.x2.h(j),
                mesh.x2.h(j + 1),
            );
            let diag = sx.diag.add(&sy.diag).add(&reaction);
            let f = sys.rhs.eval(mesh.x1.nodes[i], mesh.x2.nodes[j]);
            let neighbours = [
                (i, j - 1, &sy.lower),
                (i - 1, j, &sx.lower),
                (i, j, &diag),
                (i + 1, j, &sx.upper),
                (i, j + 1, &sy.upper),
            ];
            for r in 0..2 {
                let mut row = Vec::with_capacity(10);
                for &(ni, nj, m) in &neighbours {
                    if ni == 0 || nj == 0 || ni == n1 - 1 || nj == n2 - 1 {
                        continue;
                    }
                    for c in 0..2 {
                        if m.0[r][c] != 0.0 {
                            row.push((unknown(ni, nj) + c, m.0[r][c]));
                        }
                    }
                }
                rows.push(row);
                rhs.push(f[r]);
            }
        }
        (rows, rhs)
    });

    let dim = 2 * m1 * m2;
    let mut b = Vec::with_capacity(dim);
    let mut all_rows = Vec::with_capacity(dim);
    for (rows, rhs) in lines {
        all_rows.extend(rows);
        b.extend(rhs);
    }
    (CsrMatrix::from_rows(dim, all_rows), b)
}

fn scatter(mesh: &Mesh2D, interior: &[f64]) -> Vec<Vec2> {
    let (n1, n2) = mesh.shape();
    let m1 = n1 - 2;
    let mut values = vec![[0.0, 0.0]; n1 * n2];
    for j in 1..n2 - 1 {
        for i in 1..n1 - 1 {
            let k = 2 * ((j - 1) * m1 + (i - 1));
            values[mesh.index(i, j)] = [interior[k], interior[k + 1]];
        }
    }
    values
}

pub fn solve_fd_2d(sys: &CoupledSystem2D, mesh: &Mesh2D, scheme: Scheme) -> Result<DiscreteSolution2D> {
    solve_fd_2d_with(sys, mesh, &SolveOptions::new(scheme))
}

pub fn solve_fd_2d_with(
    sys: &CoupledSystem2D,
    mesh: &Mesh2D,
    opts: &SolveOptions,
) -> Result<DiscreteSolution2D> {
    check_mesh(mesh)?;
    sys.perturbation.check()?;
    let (a, b) = assemble_2d(sys, mesh, opts.scheme, opts.exec());
    let x = solve_sparse(&a, &b, opts.solver, 2, mesh.shape().0.max(mesh.shape().1))?;
    Ok(DiscreteSolution2D {
        mesh: mesh.clone(),
        values: scatter(mesh, &x),
    })
}

/// `-eps Δv + speed·∇v + rho v = f` for one scalar field given at every node.
fn solve_scalar_2d(
    eps: f64,
    speed: Vec2,
    rho: f64,
    f: &[f64],
    mesh: &Mesh2D,
    scheme: Scheme,
    solver: LinearSolver,
) -> Result<Vec<f64>> {
    let (n1, n2) = mesh.shape();
    let (m1, m2) = (n1 - 2, n2 - 2);
    let split = |s: f64| {
        (
            Mat2::diag([s.max(0.0), 0.0]),
            Mat2::diag([s.min(0.0), 0.0]),
        )
    };
    let splits = (scheme == Scheme::Upwind).then(|| [split(speed[0]), split(speed[1])]);
    let (c1, c2) = (Mat2::diag([speed[0], 0.0]), Mat2::diag([speed[1], 0.0]));
    let unknown = |i: usize, j: usize| (j - 1) * m1 + (i - 1);
    let mut rows = Vec::with_capacity(m1 * m2);
    let mut b = Vec::with_capacity(m1 * m2);
    for j in 1..=m2 {
        for i in 1..=m1 {
            let sx = stencil(
                [eps, eps],
                &c1,
                splits.as_ref().map(|s| &s[0]),
                mesh.x1.h(i),
                mesh.x1.h(i + 1),
            );
            let sy = stencil(
                [eps, eps],
                &c2,
                splits.as_ref().map(|s| &s[1]),
                mesh.x2.h(j),
                mesh.x2.h(j + 1),
            );
            let mut row = Vec::with_capacity(5);
            let diag = sx.diag.0[0][0] + sy.diag.0[0][0] + rho;
            for (ni, nj, w) in [
                (i, j - 1, sy.lower.0[0][0]),
                (i - 1, j, sx.lower.0[0][0]),
                (i, j, diag),
                (i + 1, j, sx.upper.0[0][0]),
                (i, j + 1, sy.upper.0[0][0]),
            ] {
                if ni == 0 || nj == 0 || ni == n1 - 1 || nj == n2 - 1 || w == 0.0 {
                    continue;
                }
                row.push((unknown(ni, nj), w));
            }
            rows.push(row);
            b.push(f[mesh.index(i, j)]);
        }
    }
    let a = CsrMatrix::from_rows(m1 * m2, rows);
    let x = solve_sparse(&a, &b, solver, 1, n1.max(n2))?;
    let mut v = vec![0.0; n1 * n2];
    for j in 1..n2 - 1 {
        for i in 1..n1 - 1 {
            v[mesh.index(i, j)] = x[unknown(i, j)];
        }
    }
    Ok(v)
}

/// Commuting one-parameter systems: two scalar solves for `v = T^T u`, then
/// `u = T v`. With the central scheme (or the spectral upwind split) this is
/// an exact conjugation of the coupled discrete system.
pub fn solve_transformed_2d(
    sys: &CoupledSystem2D,
    diag: &JointDiagonalization,
    mesh: &Mesh2D,
    scheme: Scheme,
) -> Result<DiscreteSolution2D> {
    let PerturbationSpec::OneParam { eps } = sys.perturbation else {
        return Err(Error::InvalidInput("transformed solve needs one small parameter".into()));
    };
    sys.perturbation.check()?;
    check_mesh(mesh)?;
    for (a, lambda) in [(&sys.a1, diag.lambda1), (&sys.a2, diag.lambda2)] {
        let err = diag.reconstruct(lambda).sub(a).norm();
        if err > COMMUTE_TOL * a.norm().max(1.0) {
            return Err(Error::NonCommuting(err));
        }
    }
    let ft: Vec<Vec2> = (0..mesh.shape().1)
        .flat_map(|j| {
            (0..mesh.shape().0).map(move |i| (mesh.x1.nodes[i], mesh.x2.nodes[j]))
        })
        .map(|(x1, x2)| diag.to_transformed(sys.rhs.eval(x1, x2)))
        .collect();
    let v = par::map_range(Execution::default(), 2, |k| {
        let fk: Vec<f64> = ft.iter().map(|f| f[k]).collect();
        solve_scalar_2d(eps, diag.velocity(k), sys.rho, &fk, mesh, scheme, LinearSolver::Auto)
    });
    let [v0, v1]: [Result<Vec<f64>>; 2] = v.try_into().expect("two components");
    let (v0, v1) = (v0?, v1?);
    let values = v0
        .iter()
        .zip(&v1)
        .map(|(&a, &b)| diag.from_transformed([a, b]))
        .collect();
    Ok(DiscreteSolution2D {
        mesh: mesh.clone(),
        values,
    })
}

/// Two-parameter systems. The transformed diffusion `L^T`-conjugate of `E`
/// is not diagonal, so there is no decoupled path: after checking the
/// shared factor the coupled system is solved in the original variables.
pub fn solve_two_param_2d(
    sys: &CoupledSystem2D,
    factor: &SharedLdl,
    mesh: &Mesh2D,
    scheme: Scheme,
) -> Result<DiscreteSolution2D> {
    if !sys.perturbation.is_two_param() {
        return Err(Error::InvalidInput("two-parameter solve needs eps1 and eps2".into()));
    }
    let l = factor.lower();
    let scale = sys.a1.norm().max(sys.a2.norm()).max(1.0);
    for (name, a, d) in [("A1", &sys.a1, factor.d_a1), ("A2", &sys.a2, factor.d_a2)] {
        let err = l.mul(&Mat2::diag(d)).mul(&l.transpose()).sub(&a.to_mat2()).norm();
        if err > 1e-10 * scale {
            return Err(Error::NoSharedLFactor(format!(
                "{name} differs from L D L^T by {err:.3e}"
            )));
        }
    }
    solve_fd_2d(sys, mesh, scheme)
}

/// Dispatch on the system structure: shared-`L` check for two parameters,
/// the direct coupled solve otherwise.
pub fn solve_2d(sys: &CoupledSystem2D, mesh: &Mesh2D, opts: &SolveOptions) -> Result<DiscreteSolution2D> {
    if sys.perturbation.is_two_param() {
        let f = shared_ldl(&sys.a1, &sys.a2)?;
        solve_two_param_2d(sys, &f, mesh, opts.scheme)
    } else {
        solve_fd_2d_with(sys, mesh, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{joint_diagonalize, layer_catalog_2d};
    use crate::mesh::shishkin_mesh_2d;
    use crate::presets::{make_preset, Preset};
    use crate::system::Rhs2D;
    use std::f64::consts::SQRT_2;

    fn preset(p: Preset) -> CoupledSystem2D {
        make_preset(p).into_2d().unwrap()
    }

    fn mesh_for(sys: &CoupledSystem2D, n: usize) -> Mesh2D {
        shishkin_mesh_2d(n, &layer_catalog_2d(sys).unwrap(), 2.0).unwrap()
    }

    fn max_diff(a: &DiscreteSolution2D, b: &DiscreteSolution2D) -> f64 {
        a.values
            .iter()
            .zip(&b.values)
            .fold(0.0f64, |m, (u, v)| m.max((u[0] - v[0]).abs()).max((u[1] - v[1]).abs()))
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = preset(Preset::DuctFlow).with_rhs(Rhs2D::Constant { value: [0.0, 0.0] });
        let mesh = mesh_for(&sys, 16);
        let sol = solve_fd_2d(&sys, &mesh, Scheme::Central).unwrap();
        assert!(sol.values.iter().all(|u| u[0] == 0.0 && u[1] == 0.0));
        let d = joint_diagonalize(&sys.a1, &sys.a2).unwrap();
        let t = solve_transformed_2d(&sys, &d, &mesh, Scheme::Central).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn boundary_is_exactly_zero() {
        let sys = preset(Preset::CaseIII);
        let mesh = mesh_for(&sys, 16);
        let sol = solve_fd_2d(&sys, &mesh, Scheme::Upwind).unwrap();
        let (n1, n2) = mesh.shape();
        for j in 0..n2 {
            for i in 0..n1 {
                if i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1 {
                    assert_eq!(sol.at(i, j), [0.0, 0.0]);
                }
            }
        }
    }

    #[test]
    fn duct_flow_transformed_rhs() {
        let sys = preset(Preset::DuctFlow);
        let d = joint_diagonalize(&sys.a1, &sys.a2).unwrap();
        let ft = d.to_transformed([1.0, 1.0]);
        assert!(ft[0].abs() < 1e-15);
        assert!((ft[1] - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn transformed_matches_coupled() {
        for p in [Preset::DuctFlow, Preset::CaseI, Preset::CaseII, Preset::CaseIII] {
            let sys = preset(p);
            let mesh = mesh_for(&sys, 32);
            let d = joint_diagonalize(&sys.a1, &sys.a2).unwrap();
            for scheme in [Scheme::Central, Scheme::Upwind] {
                let a = solve_fd_2d(&sys, &mesh, scheme).unwrap();
                let b = solve_transformed_2d(&sys, &d, &mesh, scheme).unwrap();
                assert!(max_diff(&a, &b) <= 1e-10 * a.max_abs().max(1.0), "{p:?} {scheme:?}");
            }
        }
    }

    #[test]
    fn sequential_and_parallel_assembly_agree() {
        let sys = preset(Preset::CaseII);
        let mesh = mesh_for(&sys, 16);
        let a = assemble_2d(&sys, &mesh, Scheme::Upwind, Execution::Sequential);
        let b = assemble_2d(&sys, &mesh, Scheme::Upwind, Execution::Parallel);
        assert_eq!(a, b);
    }

    #[test]
    fn oversized_mesh_is_rejected() {
        let sys = preset(Preset::DuctFlow);
        let mesh = Mesh2D::uniform(516).unwrap();
        assert!(matches!(
            solve_fd_2d(&sys, &mesh, Scheme::Central),
            Err(Error::MeshTooLarge { nodes: 517, max: 513 })
        ));
    }

    #[test]
    fn equal_params_and_zero_l_match_diagonal_system() {
        let eps = 1e-2;
        let two = CoupledSystem2D {
            perturbation: PerturbationSpec::TwoParam { eps1: eps, eps2: eps },
            a1: SymMat2::diag(1.0, -2.0),
            a2: SymMat2::diag(0.5, 1.0),
            rho: 0.0,
            rhs: Rhs2D::Constant { value: [1.0, 2.0] },
        };
        let one = two.with_perturbation(PerturbationSpec::OneParam { eps });
        let mesh = Mesh2D::uniform(32).unwrap();
        let f = shared_ldl(&two.a1, &two.a2).unwrap();
        assert_eq!(f.l, 0.0);
        let a = solve_two_param_2d(&two, &f, &mesh, Scheme::Central).unwrap();
        let b = solve_fd_2d(&one, &mesh, Scheme::Central).unwrap();
        assert!(max_diff(&a, &b) <= 1e-10);
    }

    #[test]
    fn mismatched_factor_is_rejected() {
        let sys = preset(Preset::Example2DTwoParam);
        let mut f = shared_ldl(&sys.a1, &sys.a2).unwrap();
        f.l += 0.1;
        let mesh = Mesh2D::uniform(8).unwrap();
        assert!(matches!(
            solve_two_param_2d(&sys, &f, &mesh, Scheme::Central),
            Err(Error::NoSharedLFactor(_))
        ));
    }

    #[test]
    fn scaling_rhs_scales_solution() {
        let sys = preset(Preset::CaseI);
        let mesh = mesh_for(&sys, 16);
        let a = solve_fd_2d(&sys, &mesh, Scheme::Central).unwrap();
        let b = solve_fd_2d(&sys.with_rhs(sys.rhs.scaled(-3.0)), &mesh, Scheme::Central).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            assert!((3.0 * u[0] + v[0]).abs() <= 1e-12 * a.max_abs().max(1.0));
            assert!((3.0 * u[1] + v[1]).abs() <= 1e-12 * a.max_abs().max(1.0));
        }
    }

    #[test]
    fn csv_and_vtk_shapes() {
        let sys = preset(Preset::DuctFlow);
        let mesh = Mesh2D::uniform(8).unwrap();
        let sol = solve_fd_2d(&sys, &mesh, Scheme::Central).unwrap();
        assert_eq!(sol.to_csv().lines().count(), 1 + 81);
        let vtk = sol.to_vtk();
        assert!(vtk.contains("DIMENSIONS 9 9 1"));
        assert_eq!(vtk.lines().count(), 5 + 1 + 81 + 1 + 2 * (2 + 81));
    }
}
