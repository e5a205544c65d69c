pub mod banded;
pub mod gmres;
pub mod quad;
pub mod small;
pub mod sparse;

pub use small::{Mat2, SymEigen, SymMat2, Vec2};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sparse::CsrMatrix;

/// Acceptable normwise backward error of a direct solve.
pub const DIRECT_RESIDUAL_TOL: f64 = 1e-10;

/// Which linear solver handles an assembled discrete system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearSolver {
    /// Banded LU up to 257 nodes per direction, GMRES above.
    #[default]
    Auto,
    Banded,
    Gmres,
}

/// Solve `a x = b` and verify the residual.
///
/// `block` is the number of unknowns per mesh node (used by the GMRES
/// preconditioner); `nodes_per_dir` selects the solver in `Auto` mode.
pub fn solve_sparse(
    a: &CsrMatrix,
    b: &[f64],
    solver: LinearSolver,
    block: usize,
    nodes_per_dir: usize,
) -> Result<Vec<f64>> {
    if a.dim() == 0 {
        return Ok(Vec::new());
    }
    let use_gmres = match solver {
        LinearSolver::Auto => nodes_per_dir > 257,
        LinearSolver::Banded => false,
        LinearSolver::Gmres => true,
    };
    if use_gmres {
        let opts = gmres::GmresOptions {
            block,
            ..Default::default()
        };
        let (x, _) = gmres::gmres(a, b, &opts)?;
        return Ok(x);
    }
    let lu = a.to_band().factor()?;
    let mut x = b.to_vec();
    lu.solve_in_place(&mut x);
    let eta = a.backward_error(&x, b);
    if !(eta <= DIRECT_RESIDUAL_TOL) {
        return Err(Error::SingularDiscreteSystem(format!(
            "backward error {eta:.3e} exceeds {DIRECT_RESIDUAL_TOL:.0e}"
        )));
    }
    Ok(x)
}

/// Gaussian elimination with partial pivoting for small dense systems.
///
/// Returns `None` when a pivot falls below `rel_tol` times the largest entry.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, rel_tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() <= rel_tol * scale {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}
