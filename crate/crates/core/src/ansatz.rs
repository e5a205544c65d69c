//! Asymptotic ansatz in 1D: reduced solution plus exponential layer terms,
//! with all four free constants fixed by `u(0) = u(1) = 0`.

use crate::analysis::{diagonalize, JointDiagonalization, LdlFactorization, SmallParameter};
use crate::error::{Error, Result};
use crate::linalg::small::{add, canonical_sign, norm, scale};
use crate::linalg::{solve_dense, Mat2, Vec2};
use crate::reduce::ReducedSolution1D;
use crate::system::{CoupledSystem1D, Endpoint, PerturbationSpec};
use serde::Serialize;

/// `coefficient * direction * exp(-rate * |x - anchor|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerTerm {
    /// Unit vector with canonical sign.
    pub direction: Vec2,
    /// Full exponent `coefficient / parameter`.
    pub rate: f64,
    pub anchor: Endpoint,
    pub parameter: SmallParameter,
    pub coefficient: f64,
}

impl LayerTerm {
    pub fn eval(&self, x: f64) -> Vec2 {
        scale(
            self.direction,
            self.coefficient * (-self.rate * self.anchor.distance(x)).exp(),
        )
    }

    /// Vector amplitude at the anchor.
    pub fn amplitude(&self) -> Vec2 {
        scale(self.direction, self.coefficient)
    }
}

#[derive(Debug, Clone)]
pub struct Ansatz1D {
    pub reduced: ReducedSolution1D,
    /// Homogeneous coefficients of the outer part.
    pub c: Vec2,
    pub layers: Vec<LayerTerm>,
}

impl Ansatz1D {
    /// Outer (reduced-type) part `w0(x) + exp(M x) c`.
    pub fn outer(&self, x: f64) -> Vec2 {
        add(
            self.reduced.particular(x),
            self.reduced.homogeneous_basis(x).mul_vec(self.c),
        )
    }

    pub fn eval(&self, x: f64) -> Vec2 {
        self.layers
            .iter()
            .fold(self.outer(x), |acc, l| add(acc, l.eval(x)))
    }

    pub fn boundary_residual(&self) -> f64 {
        let (a, b) = (self.eval(0.0), self.eval(1.0));
        a[0].abs().max(a[1].abs()).max(b[0].abs()).max(b[1].abs())
    }
}

/// Solve the 4x4 boundary system for `(c1, c2, d1, d2)`.
fn fit(reduced: &ReducedSolution1D, mut layers: Vec<LayerTerm>) -> Result<Ansatz1D> {
    let mut a = vec![vec![0.0; 4]; 4];
    let mut rhs = vec![0.0; 4];
    for (side, x) in [0.0, 1.0].into_iter().enumerate() {
        let phi = reduced.homogeneous_basis(x);
        let w0 = reduced.particular(x);
        for r in 0..2 {
            let row = &mut a[2 * side + r];
            row[0] = phi.0[r][0];
            row[1] = phi.0[r][1];
            for (k, l) in layers.iter().enumerate() {
                row[2 + k] = l.direction[r] * (-l.rate * l.anchor.distance(x)).exp();
            }
            rhs[2 * side + r] = -w0[r];
        }
    }
    let sol = solve_dense(a, rhs, 1e-14).ok_or(Error::DegenerateBoundarySystem)?;
    for (k, l) in layers.iter_mut().enumerate() {
        l.coefficient = sol[2 + k];
    }
    Ok(Ansatz1D {
        reduced: reduced.clone(),
        c: [sol[0], sol[1]],
        layers,
    })
}

fn anchor_for(speed: f64) -> Endpoint {
    // layers sit on the outflow end
    if speed > 0.0 {
        Endpoint::One
    } else {
        Endpoint::Zero
    }
}

/// Layer vectors are the eigenvectors of `C`, each at the outflow end of
/// its transformed component, with rate `|mu_k| / eps`.
pub fn build_ansatz_one_param(
    sys: &CoupledSystem1D,
    diag: &JointDiagonalization,
    reduced: &ReducedSolution1D,
) -> Result<Ansatz1D> {
    let PerturbationSpec::OneParam { eps } = sys.perturbation else {
        return Err(Error::InvalidInput("one-parameter ansatz on a two-parameter system".into()));
    };
    let layers = (0..2)
        .map(|k| {
            let mu = diag.lambda1[k];
            if mu == 0.0 {
                return Err(Error::SingularConvection(0.0));
            }
            Ok(LayerTerm {
                direction: canonical_sign(diag.t.col(k)),
                rate: mu.abs() / eps,
                anchor: anchor_for(mu),
                parameter: SmallParameter::Eps,
                coefficient: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fit(reduced, layers)
}

/// Roots of `det(C - kappa E) = 0`, i.e.
/// `e1 e2 k^2 - (c11 e2 + c22 e1) k + det C = 0`, computed stably.
pub fn generalized_roots(c: &Mat2, e: Vec2) -> Option<[f64; 2]> {
    let a = e[0] * e[1];
    let b = -(c.0[0][0] * e[1] + c.0[1][1] * e[0]);
    let cc = c.det();
    let disc = b * b - 4.0 * a * cc;
    if disc < 0.0 || a == 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return None;
    }
    Some([q / a, cc / q])
}

/// Unit null vector of `C - kappa E`, canonical sign.
fn null_vector(c: &Mat2, e: Vec2, kappa: f64) -> Vec2 {
    let m = c.sub(&Mat2::diag([kappa * e[0], kappa * e[1]]));
    let r = if norm(m.row(0)) >= norm(m.row(1)) { m.row(0) } else { m.row(1) };
    let v = [-r[1], r[0]];
    canonical_sign(scale(v, 1.0 / norm(v)))
}

/// Exact exponential modes of `-E u'' + C u' = 0`: one decaying from each
/// end, the `eps1` layer on the side given by the sign of `d1`.
pub fn build_ansatz_two_param(
    sys: &CoupledSystem1D,
    ldl: &LdlFactorization,
    reduced: &ReducedSolution1D,
) -> Result<Ansatz1D> {
    let PerturbationSpec::TwoParam { eps1, eps2 } = sys.perturbation else {
        return Err(Error::InvalidInput("two-parameter ansatz on a one-parameter system".into()));
    };
    if ldl.d1 * ldl.d2 >= 0.0 {
        return Err(Error::UnsupportedSignPattern {
            d1: ldl.d1,
            d2: ldl.d2,
        });
    }
    let c = sys.convection.to_mat2();
    let e = [eps1, eps2];
    let roots = generalized_roots(&c, e).ok_or(Error::DegenerateBoundarySystem)?;
    let eps1_side = anchor_for(ldl.d1);
    let layers = roots
        .iter()
        .map(|&kappa| {
            let anchor = anchor_for(kappa);
            LayerTerm {
                direction: null_vector(&c, e, kappa),
                rate: kappa.abs(),
                anchor,
                parameter: if anchor == eps1_side {
                    SmallParameter::Eps1
                } else {
                    SmallParameter::Eps2
                },
                coefficient: 0.0,
            }
        })
        .collect();
    fit(reduced, layers)
}

/// Dispatch on the perturbation type.
pub fn build_ansatz(sys: &CoupledSystem1D, reduced: &ReducedSolution1D) -> Result<Ansatz1D> {
    match sys.perturbation {
        PerturbationSpec::OneParam { .. } => {
            build_ansatz_one_param(sys, &diagonalize(&sys.convection), reduced)
        }
        PerturbationSpec::TwoParam { .. } => {
            build_ansatz_two_param(sys, &crate::analysis::ldl(&sys.convection)?, reduced)
        }
    }
}
