//! Restarted GMRES with block-Jacobi right preconditioning.
//!
//! Only used for meshes too large for the banded direct solver.

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iter: usize,
    /// Target for `|b - Ax|_2 / |b|_2`.
    pub rel_tol: f64,
    /// Size of the diagonal blocks inverted by the preconditioner.
    pub block: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 60,
            max_iter: 20_000,
            rel_tol: 1e-10,
            block: 2,
        }
    }
}

/// Inverses of the `block x block` diagonal blocks (block size 1 or 2).
struct BlockJacobi {
    block: usize,
    inv: Vec<[[f64; 2]; 2]>,
}

impl BlockJacobi {
    fn new(a: &CsrMatrix, block: usize) -> Result<Self> {
        assert!(block == 1 || block == 2);
        let n = a.dim();
        assert_eq!(n % block, 0);
        let mut inv = Vec::with_capacity(n / block);
        for b in 0..n / block {
            let mut m = [[0.0; 2]; 2];
            for r in 0..block {
                let i = b * block + r;
                for (j, v) in a.row(i) {
                    if j >= b * block && j < (b + 1) * block {
                        m[r][j - b * block] = v;
                    }
                }
            }
            let blk = if block == 1 {
                if m[0][0] == 0.0 {
                    return Err(Error::SingularDiscreteSystem(format!("zero diagonal at {b}")));
                }
                [[1.0 / m[0][0], 0.0], [0.0, 0.0]]
            } else {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                if det == 0.0 {
                    return Err(Error::SingularDiscreteSystem(format!("singular block at {b}")));
                }
                [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
            };
            inv.push(blk);
        }
        Ok(BlockJacobi { block, inv })
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        if self.block == 1 {
            for (i, m) in self.inv.iter().enumerate() {
                y[i] = m[0][0] * x[i];
            }
        } else {
            for (b, m) in self.inv.iter().enumerate() {
                let (p, q) = (x[2 * b], x[2 * b + 1]);
                y[2 * b] = m[0][0] * p + m[0][1] * q;
                y[2 * b + 1] = m[1][0] * p + m[1][1] * q;
            }
        }
        y
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `a x = b`; returns the solution and the number of iterations.
pub fn gmres(a: &CsrMatrix, b: &[f64], opts: &GmresOptions) -> Result<(Vec<f64>, usize)> {
    let n = a.dim();
    let precond = BlockJacobi::new(a, opts.block)?;
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let m = opts.restart.max(1);
    let mut iters = 0;
    loop {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = norm2(&r);
        if beta <= opts.rel_tol * bnorm {
            return Ok((x, iters));
        }
        if iters >= opts.max_iter {
            return Err(Error::SingularDiscreteSystem(format!(
                "GMRES stalled at relative residual {:.3e} after {iters} iterations",
                beta / bnorm
            )));
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_done = 0;
        for k in 0..m {
            iters += 1;
            let z = precond.apply(&basis[k]);
            let mut w = a.matvec(&z);
            for (i, v) in basis.iter().enumerate() {
                let hik = dot(&w, v);
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= hik * vj;
                }
            }
            let hn = norm2(&w);
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_done = k + 1;
            if g[k + 1].abs() <= 0.1 * opts.rel_tol * bnorm || hn == 0.0 || iters >= opts.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        let mut y = vec![0.0; k_done];
        for i in (0..k_done).rev() {
            let s: f64 = (i + 1..k_done).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vj) in update.iter_mut().zip(v) {
                *u += yi * vj;
            }
        }
        let dz = precond.apply(&update);
        for (xi, d) in x.iter_mut().zip(dz) {
            *xi += d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_nonsymmetric_tridiagonal() {
        let n = 200;
        let rows = (0..n).map(|i| {
            let mut r = vec![(i, 4.0)];
            if i > 0 {
                r.push((i - 1, -1.5));
            }
            if i + 1 < n {
                r.push((i + 1, -0.5));
            }
            r
        });
        let a = CsrMatrix::from_rows(n, rows);
        let x_true: Vec<f64> = (0..n).map(|i| (0.1 * i as f64).cos()).collect();
        let b = a.matvec(&x_true);
        let (x, _) = gmres(&a, &b, &GmresOptions::default()).unwrap();
        let err = x.iter().zip(&x_true).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        assert!(err < 1e-8, "{err}");
    }
}
