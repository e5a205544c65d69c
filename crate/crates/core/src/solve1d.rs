//! Finite differences for `-E u'' + C u' + R u = f`, `u(0) = u(1) = 0`.
//!
//! Three-point stencils on arbitrary meshes. The central scheme uses
//! `(u_{i+1} - u_{i-1}) / (h_i + h_{i+1})` for `u'`; the upwind scheme
//! splits `C = C+ + C-` and applies backward differences to `C+`,
//! forward differences to `C-`.

use crate::analysis::ldl;
use crate::error::{Error, Result};
use crate::linalg::banded::BandMatrix;
use crate::linalg::sparse::CsrMatrix;
use crate::linalg::{solve_sparse, LinearSolver, Mat2, SymMat2, Vec2};
use crate::mesh::Mesh1D;
use crate::system::{CoupledSystem1D, PerturbationSpec};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Central,
    Upwind,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "central" => Ok(Scheme::Central),
            "upwind" => Ok(Scheme::Upwind),
            other => Err(Error::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSolution1D {
    pub mesh: Mesh1D,
    pub values: Vec<Vec2>,
}

impl DiscreteSolution1D {
    pub fn eval(&self, x: f64) -> Vec2 {
        self.mesh.interpolate(&self.values, x)
    }

    /// CSV with columns `x,u1,u2` plus any named extra column pairs.
    pub fn to_csv(&self, extra: &[(&str, &dyn Fn(f64) -> Vec2)]) -> String {
        let mut s = String::from("x,u1,u2");
        for (name, _) in extra {
            let _ = write!(s, ",{name}1,{name}2");
        }
        s.push('\n');
        for (x, u) in self.mesh.nodes.iter().zip(&self.values) {
            let _ = write!(s, "{:.16e},{:.16e},{:.16e}", x, u[0], u[1]);
            for (_, f) in extra {
                let v = f(*x);
                let _ = write!(s, ",{:.16e},{:.16e}", v[0], v[1]);
            }
            s.push('\n');
        }
        s
    }
}

/// `C = P + Q`; `P` takes backward differences, `Q` forward differences.
///
/// One parameter: spectral parts. Two parameters: `L D+ L^T` and
/// `L D- L^T` from the pivots. Without either structure, each row goes
/// with the sign of its diagonal entry.
pub fn upwind_split(c: &SymMat2, perturbation: &PerturbationSpec) -> (Mat2, Mat2) {
    match perturbation {
        PerturbationSpec::OneParam { .. } => {
            let (p, q) = c.spectral_parts();
            (p.to_mat2(), q.to_mat2())
        }
        PerturbationSpec::TwoParam { .. } => match ldl(c) {
            Ok(f) => {
                let l = f.lower();
                let part = |d: Vec2| l.mul(&Mat2::diag(d)).mul(&l.transpose());
                let (d1, d2) = (f.d1, f.d2);
                (
                    part([d1.max(0.0), d2.max(0.0)]),
                    part([d1.min(0.0), d2.min(0.0)]),
                )
            }
            Err(_) => rowwise_split(&c.to_mat2()),
        },
    }
}

/// Row `r` goes entirely to the backward part when `c_rr >= 0`.
pub fn rowwise_split(c: &Mat2) -> (Mat2, Mat2) {
    let mut p = Mat2::ZERO;
    let mut q = Mat2::ZERO;
    for r in 0..2 {
        if c.0[r][r] >= 0.0 {
            p.0[r] = c.0[r];
        } else {
            q.0[r] = c.0[r];
        }
    }
    (p, q)
}

/// Three-point stencil coefficients `(w_{i-1}, w_i, w_{i+1})` for one node.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    pub lower: Mat2,
    pub diag: Mat2,
    pub upper: Mat2,
}

/// `-diag(e) u'' + conv u'` at an interior node with spacings `hm`, `hp`.
pub(crate) fn stencil(
    e: Vec2,
    conv: &Mat2,
    split: Option<&(Mat2, Mat2)>,
    hm: f64,
    hp: f64,
) -> Stencil {
    let s = 2.0 / (hm + hp);
    let dl = Mat2::diag([-e[0] * s / hm, -e[1] * s / hm]);
    let du = Mat2::diag([-e[0] * s / hp, -e[1] * s / hp]);
    let mut st = Stencil {
        lower: dl,
        diag: dl.add(&du).scaled(-1.0),
        upper: du,
    };
    match split {
        None => {
            let w = 1.0 / (hm + hp);
            st.lower = st.lower.sub(&conv.scaled(w));
            st.upper = st.upper.add(&conv.scaled(w));
        }
        Some((p, q)) => {
            st.lower = st.lower.sub(&p.scaled(1.0 / hm));
            st.diag = st.diag.add(&p.scaled(1.0 / hm)).sub(&q.scaled(1.0 / hp));
            st.upper = st.upper.add(&q.scaled(1.0 / hp));
        }
    }
    st
}

/// Discrete system over the interior nodes in node-major order: unknown
/// `2 (i - 1) + c` for node `i`. Boundary values are zero and eliminated.
pub fn assemble_1d(sys: &CoupledSystem1D, mesh: &Mesh1D, scheme: Scheme) -> (CsrMatrix, Vec<f64>) {
    let n = mesh.intervals();
    let e = sys.perturbation.diffusion();
    let conv = sys.convection.to_mat2();
    let split = (scheme == Scheme::Upwind).then(|| upwind_split(&sys.convection, &sys.perturbation));
    let reaction = sys.reaction.to_mat2();
    let m = n.saturating_sub(1);
    let mut rows = Vec::with_capacity(2 * m);
    let mut rhs = vec![0.0; 2 * m];
    for i in 1..n {
        let st = stencil(e, &conv, split.as_ref(), mesh.h(i), mesh.h(i + 1));
        let diag = st.diag.add(&reaction);
        let f = sys.rhs.eval(mesh.nodes[i]);
        for r in 0..2 {
            let mut row = Vec::with_capacity(6);
            for (node, m) in [(i - 1, &st.lower), (i, &diag), (i + 1, &st.upper)] {
                if node == 0 || node == n {
                    continue;
                }
                for c in 0..2 {
                    if m.0[r][c] != 0.0 {
                        row.push((2 * (node - 1) + c, m.0[r][c]));
                    }
                }
            }
            rows.push(row);
            rhs[2 * (i - 1) + r] = f[r];
        }
    }
    (CsrMatrix::from_rows(2 * m, rows), rhs)
}

pub fn solve_fd_1d(sys: &CoupledSystem1D, mesh: &Mesh1D, scheme: Scheme) -> Result<DiscreteSolution1D> {
    if !mesh.is_valid() {
        return Err(Error::InvalidInput("mesh must increase strictly from 0 to 1".into()));
    }
    sys.perturbation.check()?;
    let (a, b) = assemble_1d(sys, mesh, scheme);
    let x = solve_sparse(&a, &b, LinearSolver::Banded, 2, 0)?;
    let mut values = Vec::with_capacity(mesh.len());
    values.push([0.0, 0.0]);
    values.extend(x.chunks_exact(2).map(|c| [c[0], c[1]]));
    values.push([0.0, 0.0]);
    Ok(DiscreteSolution1D {
        mesh: mesh.clone(),
        values,
    })
}

/// Scalar problem `-eps v'' + speed v' + reaction v = f` with the same
/// stencils, solved as a tridiagonal system.
pub fn solve_scalar_1d(
    eps: f64,
    speed: f64,
    reaction: f64,
    f: &[f64],
    mesh: &Mesh1D,
    scheme: Scheme,
) -> Result<Vec<f64>> {
    let n = mesh.intervals();
    let m = n - 1;
    let mut a = BandMatrix::zeros(m, 1, 1);
    let mut b = vec![0.0; m];
    let conv = Mat2::diag([speed, 0.0]);
    let split = (scheme == Scheme::Upwind).then(|| {
        (
            Mat2::diag([speed.max(0.0), 0.0]),
            Mat2::diag([speed.min(0.0), 0.0]),
        )
    });
    for i in 1..n {
        let st = stencil([eps, eps], &conv, split.as_ref(), mesh.h(i), mesh.h(i + 1));
        let k = i - 1;
        if i > 1 {
            a.add(k, k - 1, st.lower.0[0][0]);
        }
        a.add(k, k, st.diag.0[0][0] + reaction);
        if i + 1 < n {
            a.add(k, k + 1, st.upper.0[0][0]);
        }
        b[k] = f[i];
    }
    let lu = a.factor()?;
    lu.solve_in_place(&mut b);
    let mut v = Vec::with_capacity(n + 1);
    v.push(0.0);
    v.extend(b);
    v.push(0.0);
    Ok(v)
}

/// One parameter, `T^T R T` diagonal: solve the two decoupled scalar
/// problems in `v = T^T u` and return `u = T v`.
pub fn solve_transformed_1d(
    sys: &CoupledSystem1D,
    mesh: &Mesh1D,
    scheme: Scheme,
) -> Result<DiscreteSolution1D> {
    let PerturbationSpec::OneParam { eps } = sys.perturbation else {
        return Err(Error::InvalidInput("transformed solve needs one small parameter".into()));
    };
    let d = crate::analysis::diagonalize(&sys.convection);
    let rt = d.t.transpose().mul(&sys.reaction.to_mat2()).mul(&d.t);
    if rt.0[0][1].abs() > 1e-12 * rt.max_abs().max(1.0) {
        return Err(Error::NonCommuting(rt.0[0][1].abs()));
    }
    let ft: Vec<Vec2> = mesh
        .nodes
        .iter()
        .map(|&x| d.to_transformed(sys.rhs.eval(x)))
        .collect();
    let mut v = [Vec::new(), Vec::new()];
    for (k, vk) in v.iter_mut().enumerate() {
        let fk: Vec<f64> = ft.iter().map(|f| f[k]).collect();
        *vk = solve_scalar_1d(eps, d.lambda1[k], rt.0[k][k], &fk, mesh, scheme)?;
    }
    let values = (0..mesh.len())
        .map(|i| d.from_transformed([v[0][i], v[1][i]]))
        .collect();
    Ok(DiscreteSolution1D {
        mesh: mesh.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::layer_catalog_1d;
    use crate::mesh::shishkin_mesh;
    use crate::presets::{make_preset, Preset};
    use crate::reduce::reduced_1d;
    use crate::system::Rhs1D;

    fn example(eps: f64) -> CoupledSystem1D {
        make_preset(Preset::Example1D)
            .into_1d()
            .unwrap()
            .with_perturbation(PerturbationSpec::OneParam { eps })
    }

    fn mesh_for(sys: &CoupledSystem1D, n: usize) -> Mesh1D {
        shishkin_mesh(n, &layer_catalog_1d(sys).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let sys = example(1e-2).with_rhs(Rhs1D::Constant { value: [0.0, 0.0] });
        let sol = solve_fd_1d(&sys, &mesh_for(&sys, 64), Scheme::Central).unwrap();
        assert!(sol.values.iter().all(|u| u[0] == 0.0 && u[1] == 0.0));
    }

    #[test]
    fn interior_matches_reduced_solution() {
        let sys = example(1e-2);
        let sol = solve_fd_1d(&sys, &mesh_for(&sys, 256), Scheme::Central).unwrap();
        let r = reduced_1d(&sys).unwrap();
        assert_eq!(sol.values[0], [0.0, 0.0]);
        assert_eq!(*sol.values.last().unwrap(), [0.0, 0.0]);
        for x in [0.3, 0.5, 0.7] {
            let (u, u0) = (sol.eval(x), r.eval(x));
            assert!((u[0] - u0[0]).abs() < 1e-2 && (u[1] - u0[1]).abs() < 1e-2, "x = {x}");
        }
    }

    #[test]
    fn central_and_upwind_agree_on_a_smooth_problem() {
        let sys = example(1.0);
        let mesh = Mesh1D::uniform(400).unwrap();
        let a = solve_fd_1d(&sys, &mesh, Scheme::Central).unwrap();
        let b = solve_fd_1d(&sys, &mesh, Scheme::Upwind).unwrap();
        let diff = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(p, q)| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()))
            .fold(0.0, f64::max);
        assert!(diff < 2e-3, "{diff}");
    }

    #[test]
    fn transformed_solve_matches_coupled_solve() {
        for scheme in [Scheme::Central, Scheme::Upwind] {
            let sys = example(1e-3);
            let mesh = mesh_for(&sys, 128);
            let a = solve_fd_1d(&sys, &mesh, scheme).unwrap();
            let b = solve_transformed_1d(&sys, &mesh, scheme).unwrap();
            for (p, q) in a.values.iter().zip(&b.values) {
                assert!((p[0] - q[0]).abs() < 1e-10 && (p[1] - q[1]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn two_param_upwind_split_uses_pivot_signs() {
        let c = SymMat2::new(-3.0, -4.0, 3.0);
        let (p, q) = upwind_split(&c, &PerturbationSpec::TwoParam { eps1: 1e-6, eps2: 1e-3 });
        assert!(p.add(&q).sub(&c.to_mat2()).max_abs() < 1e-14);
        // D+ = diag(0, 25/3): P = (25/3) e2 e2^T since L e2 = e2
        assert!(p.sub(&Mat2([[0.0, 0.0], [0.0, 25.0 / 3.0]])).max_abs() < 1e-14);
    }

    #[test]
    fn rowwise_fallback_follows_diagonal_signs() {
        let (p, q) = rowwise_split(&Mat2([[0.0, 1.0], [1.0, -2.0]]));
        assert_eq!(p, Mat2([[0.0, 1.0], [0.0, 0.0]]));
        assert_eq!(q, Mat2([[0.0, 0.0], [1.0, -2.0]]));
    }

    #[test]
    fn two_param_layers_have_different_widths() {
        let sys = make_preset(Preset::Example1DTwoParam).into_1d().unwrap();
        let mesh = mesh_for(&sys, 256);
        let sol = solve_fd_1d(&sys, &mesh, Scheme::Central).unwrap();
        let r = reduced_1d(&sys).unwrap();
        // deviation from u0 dies out within a few eps1/3 at x=0 and a few
        // 3 eps2/25 at x=1
        let dev = |x: f64| {
            let (u, u0) = (sol.eval(x), r.eval(x));
            (u[0] - u0[0]).abs().max((u[1] - u0[1]).abs())
        };
        assert!(dev(2e-5) < 1e-3);
        assert!(dev(1.0 - 2e-5) > 1e-2);
        assert!(dev(1.0 - 2e-3) < 1e-3);
    }

    #[test]
    fn csv_has_one_row_per_node() {
        let sys = example(1e-2);
        let sol = solve_fd_1d(&sys, &Mesh1D::uniform(16).unwrap(), Scheme::Central).unwrap();
        let csv = sol.to_csv(&[("reduced", &|_x| [0.0, 0.0])]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,u1,u2,reduced1,reduced2"));
        assert_eq!(lines.count(), 17);
    }
}
