//! Banded LU factorization with partial pivoting.
//!
//! Storage follows the LAPACK `gbtrf` layout: column `j` holds rows
//! `j - kl - ku ..= j + kl`, the top `kl` rows of the band being reserved for
//! the fill-in created by row interchanges.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    /// Zero `n x n` matrix with `kl` sub- and `ku` superdiagonals.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    /// Accumulate `v` into entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i + self.ku >= j && j + self.kl >= i,
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku >= j && j + self.kl >= i {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// In-place LU factorization with partial pivoting (unblocked `gbtf2`).
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let kv = kl + ku;
        let ldab = self.ldab;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab + kv;
            let mut p = 0;
            let mut best = self.data[col].abs();
            for r in 1..=km {
                let v = self.data[col + r].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            ipiv[j] = j + p;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularDiscreteSystem(format!(
                    "zero pivot in column {j} of {n}"
                )));
            }
            ju = ju.max((j + ku + p).min(n - 1));
            if p != 0 {
                for c in j..=ju {
                    let base = c * ldab + kv;
                    self.data.swap(base + j - c + p, base + j - c);
                }
            }
            let pivot = self.data[col];
            for r in 1..=km {
                self.data[col + r] /= pivot;
            }
            if km == 0 {
                continue;
            }
            let (head, tail) = self.data.split_at_mut((j + 1) * ldab);
            let mults = &head[col + 1..=col + km];
            for c in j + 1..=ju {
                let base = (c - j - 1) * ldab + kv + j - c;
                let t = tail[base];
                if t != 0.0 {
                    let target = &mut tail[base + 1..=base + km];
                    for (x, m) in target.iter_mut().zip(mults) {
                        *x -= m * t;
                    }
                }
            }
        }
        Ok(BandLu { lu: self, ipiv })
    }
}

/// Factored band matrix ready for repeated solves.
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.lu;
        let n = m.n;
        assert_eq!(b.len(), n);
        let kv = m.kl + m.ku;
        for j in 0..n {
            let km = m.kl.min(n - 1 - j);
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                let col = j * m.ldab + kv;
                for r in 1..=km {
                    b[j + r] -= m.data[col + r] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let col = j * m.ldab + kv;
            b[j] /= m.data[col];
            let bj = b[j];
            if bj != 0.0 {
                let top = j.saturating_sub(kv);
                for i in top..j {
                    b[i] -= m.data[col + i - j] * bj;
                }
            }
        }
    }
}
