//! Quantitative checks on computed solutions: convergence in the small
//! parameter, ansatz accuracy, layer amplitudes and locations, and mesh
//! convergence tables.

use crate::analysis::{layer_catalog, AmplitudeScale, LayerCatalog, LayerKind, LayerPrediction};
use crate::ansatz::build_ansatz;
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::mesh::{transition, Mesh1D, Mesh2D, MeshSpec, DEFAULT_SIGMA, MIN_STRIP_NODES};
use crate::par::{self, Execution};
use crate::reduce::{reduced_1d, reduced_2d, ReducedSolution1D, ReducedSolution2D};
use crate::solve1d::{solve_fd_1d, DiscreteSolution1D, Scheme};
use crate::solve2d::{solve_2d, DiscreteSolution2D, SolveOptions};
use crate::system::{BoundaryPart, CoupledSystem1D, EdgeId, Endpoint, PerturbationSpec, System};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

fn norm2(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

/// Discrete L2 norm with trapezoid weights, pointwise Euclidean.
pub fn l2_norm_1d(mesh: &Mesh1D, values: &[Vec2]) -> f64 {
    mesh.weights()
        .iter()
        .zip(values)
        .map(|(w, v)| w * (v[0] * v[0] + v[1] * v[1]))
        .sum::<f64>()
        .sqrt()
}

pub fn l2_norm_2d(mesh: &Mesh2D, values: &[Vec2]) -> f64 {
    let (w1, w2) = (mesh.x1.weights(), mesh.x2.weights());
    let mut s = 0.0;
    for (j, wj) in w2.iter().enumerate() {
        for (i, wi) in w1.iter().enumerate() {
            let v = values[mesh.index(i, j)];
            s += wi * wj * (v[0] * v[0] + v[1] * v[1]);
        }
    }
    s.sqrt()
}

pub fn max_norm(values: &[Vec2]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs()))
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// `None` with fewer than two usable (positive) points.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Some(Fit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
    })
}

/// What a sweep varies. Rates are reported as orders: `err ~ eps^rate`
/// for `Eps`, `err ~ n^-rate` for `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Eps,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub l2: f64,
    pub max: f64,
    pub rate_l2: Option<f64>,
    pub rate_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    pub fit_l2: Option<Fit>,
    pub fit_max: Option<Fit>,
}

/// Closed acceptance interval for a fitted rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl SweepResult {
    fn new(axis: SweepAxis, points: Vec<(f64, f64, f64)>) -> SweepResult {
        let sign = match axis {
            SweepAxis::Eps => 1.0,
            SweepAxis::N => -1.0,
        };
        let pair = |a: f64, b: f64, pa: f64, pb: f64| {
            // `+ 0.0` turns a negative zero into zero
            (a > 0.0 && b > 0.0).then(|| sign * (b / a).ln() / (pb / pa).ln() + 0.0)
        };
        let rows = points
            .iter()
            .enumerate()
            .map(|(k, &(p, l2, max))| {
                let prev = k.checked_sub(1).map(|j| points[j]);
                SweepRow {
                    parameter: p,
                    l2,
                    max,
                    rate_l2: prev.and_then(|q| pair(q.1, l2, q.0, p)),
                    rate_max: prev.and_then(|q| pair(q.2, max, q.0, p)),
                }
            })
            .collect();
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let col = |k: usize| -> Vec<f64> { points.iter().map(|p| if k == 1 { p.1 } else { p.2 }).collect() };
        let orient = |f: Fit| Fit {
            slope: sign * f.slope,
            ..f
        };
        SweepResult {
            axis,
            rows,
            fit_l2: fit_loglog(&xs, &col(1)).map(orient),
            fit_max: fit_loglog(&xs, &col(2)).map(orient),
        }
    }

    /// Least-squares order in the L2 norm.
    pub fn rate(&self) -> Option<f64> {
        self.fit_l2.map(|f| f.slope)
    }

    pub fn to_csv(&self) -> String {
        let name = match self.axis {
            SweepAxis::Eps => "eps",
            SweepAxis::N => "n",
        };
        let opt = |r: Option<f64>| r.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let mut s = format!("{name},l2,max,rate_l2,rate_max\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{},{}",
                r.parameter,
                r.l2,
                r.max,
                opt(r.rate_l2),
                opt(r.rate_max)
            );
        }
        s
    }
}

fn narrowest(catalog: &LayerCatalog, part: BoundaryPart) -> Option<f64> {
    catalog
        .at(part)
        .filter_map(|l| l.rate.map(|r| r.width()))
        .reduce(f64::min)
}

/// Transition strip width used for probing a layer of e-folding width `w`.
pub fn strip_width(w: f64, n: usize) -> f64 {
    transition(w, DEFAULT_SIGMA, n)
}

/// Every predicted 1D layer needs `MIN_STRIP_NODES` nodes in its strip.
pub fn check_resolved_1d(mesh: &Mesh1D, catalog: &LayerCatalog) -> Result<()> {
    for e in Endpoint::ALL {
        let part = BoundaryPart::Endpoint(e);
        if let Some(w) = narrowest(catalog, part) {
            let nodes = mesh.strip(e == Endpoint::One, strip_width(w, mesh.intervals())).len();
            if nodes < MIN_STRIP_NODES {
                return Err(Error::UnresolvedLayer {
                    location: part.to_string(),
                    nodes,
                });
            }
        }
    }
    Ok(())
}

pub fn check_resolved_2d(mesh: &Mesh2D, catalog: &LayerCatalog) -> Result<()> {
    for e in EdgeId::ALL {
        let part = BoundaryPart::Edge(e);
        if let Some(w) = narrowest(catalog, part) {
            let axis = if e.is_vertical() { &mesh.x1 } else { &mesh.x2 };
            let lines = mesh.strip_lines(e, strip_width(w, axis.intervals()));
            if lines < MIN_STRIP_NODES {
                return Err(Error::UnresolvedLayer {
                    location: part.to_string(),
                    nodes: lines,
                });
            }
        }
    }
    Ok(())
}

/// Discrete solution of either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    OneD(DiscreteSolution1D),
    TwoD(DiscreteSolution2D),
}

impl Solution {
    pub fn node_count(&self) -> usize {
        match self {
            Solution::OneD(s) => s.values.len(),
            Solution::TwoD(s) => s.values.len(),
        }
    }

    pub fn to_csv(&self) -> String {
        match self {
            Solution::OneD(s) => s.to_csv(&[]),
            Solution::TwoD(s) => s.to_csv(),
        }
    }
}

/// Reduced solution of either dimension.
#[derive(Debug, Clone)]
pub enum Reduced {
    OneD(ReducedSolution1D),
    TwoD(ReducedSolution2D),
}

pub fn reduced(sys: &System) -> Result<Reduced> {
    Ok(match sys {
        System::OneD(s) => Reduced::OneD(reduced_1d(s)?),
        System::TwoD(s) => Reduced::TwoD(reduced_2d(s)?),
    })
}

/// Build the mesh for `sys` and solve.
pub fn solve(sys: &System, mesh: &MeshSpec, opts: &SolveOptions) -> Result<Solution> {
    let catalog = layer_catalog(sys)?;
    Ok(match sys {
        System::OneD(s) => {
            let m = mesh.build_1d(&catalog)?;
            Solution::OneD(solve_fd_1d(s, &m, opts.scheme)?)
        }
        System::TwoD(s) => {
            let m = mesh.build_2d(&catalog)?;
            Solution::TwoD(solve_2d(s, &m, opts)?)
        }
    })
}

/// `(L2, max)` norms of `u - u0` over the mesh nodes.
pub fn distance_to_reduced(sol: &Solution, red: &Reduced) -> Result<(f64, f64)> {
    match (sol, red) {
        (Solution::OneD(s), Reduced::OneD(r)) => {
            let d: Vec<Vec2> = s
                .mesh
                .nodes
                .iter()
                .zip(&s.values)
                .map(|(&x, u)| {
                    let u0 = r.eval(x);
                    [u[0] - u0[0], u[1] - u0[1]]
                })
                .collect();
            Ok((l2_norm_1d(&s.mesh, &d), max_norm(&d)))
        }
        (Solution::TwoD(s), Reduced::TwoD(r)) => {
            let (n1, n2) = s.mesh.shape();
            let mut d = vec![[0.0, 0.0]; n1 * n2];
            for j in 0..n2 {
                for i in 0..n1 {
                    let k = s.mesh.index(i, j);
                    let u0 = r.eval(s.mesh.x1.nodes[i], s.mesh.x2.nodes[j]);
                    d[k] = [s.values[k][0] - u0[0], s.values[k][1] - u0[1]];
                }
            }
            Ok((l2_norm_2d(&s.mesh, &d), max_norm(&d)))
        }
        _ => Err(Error::InvalidInput("solution and reduced solution differ in dimension".into())),
    }
}

fn with_eps(sys: &System, eps: f64) -> Result<System> {
    match sys.perturbation() {
        PerturbationSpec::OneParam { .. } => Ok(sys.with_perturbation(PerturbationSpec::OneParam { eps })),
        PerturbationSpec::TwoParam { .. } => Err(Error::InvalidInput(
            "epsilon sweeps need a one-parameter system".into(),
        )),
    }
}

/// `‖u_eps - u0‖` for each `eps` with a log-log fit against `eps`.
///
/// The mesh is rebuilt for every `eps` and must resolve each predicted
/// layer. Points run concurrently under `exec`; rows keep the input order.
pub fn eps_rate_sweep(
    sys: &System,
    eps_list: &[f64],
    mesh: &MeshSpec,
    scheme: Scheme,
    exec: Execution,
) -> Result<SweepResult> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidInput("an epsilon sweep needs at least three values".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) || eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidInput("epsilon values must be positive and decreasing".into()));
    }
    let opts = SolveOptions {
        scheme,
        exec: Some(Execution::Sequential),
        ..Default::default()
    };
    let red = reduced(sys)?;
    let points = par::map(exec, eps_list, |&eps| -> Result<(f64, f64, f64)> {
        let s = with_eps(sys, eps)?;
        let catalog = layer_catalog(&s)?;
        let sol = solve(&s, mesh, &opts)?;
        match &sol {
            Solution::OneD(d) => check_resolved_1d(&d.mesh, &catalog)?,
            Solution::TwoD(d) => check_resolved_2d(&d.mesh, &catalog)?,
        }
        let (l2, max) = distance_to_reduced(&sol, &red)?;
        Ok((eps, l2, max))
    });
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::new(SweepAxis::Eps, points))
}

/// `‖u_fd - u_as‖∞` over the mesh nodes for the system's own parameters.
pub fn ansatz_error_on(sys: &CoupledSystem1D, mesh: &MeshSpec) -> Result<f64> {
    let red = reduced_1d(sys)?;
    let ansatz = build_ansatz(sys, &red)?;
    let catalog = crate::analysis::layer_catalog_1d(sys)?;
    let m = mesh.build_1d(&catalog)?;
    let sol = solve_fd_1d(sys, &m, Scheme::Central)?;
    Ok(m.nodes
        .iter()
        .zip(&sol.values)
        .map(|(&x, u)| {
            let a = ansatz.eval(x);
            (u[0] - a[0]).abs().max((u[1] - a[1]).abs())
        })
        .fold(0.0, f64::max))
}

/// Ansatz error of a one-parameter system at `eps` on a layer-resolving mesh.
pub fn ansatz_error(sys: &CoupledSystem1D, eps: f64, mesh: &MeshSpec) -> Result<f64> {
    if sys.perturbation.is_two_param() {
        return Err(Error::InvalidInput("ansatz_error takes a one-parameter system".into()));
    }
    ansatz_error_on(&sys.with_perturbation(PerturbationSpec::OneParam { eps }), mesh)
}

/// Measured deviation from the reduced solution for one predicted layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub component: usize,
    pub location: BoundaryPart,
    pub kind: LayerKind,
    pub amplitude_scale: AmplitudeScale,
    pub amplitude: f64,
    /// Nodes (1D) or mesh lines (2D) inside the probed strip.
    pub strip_nodes: usize,
}

fn amplitude_entry(l: &LayerPrediction, part: BoundaryPart, amplitude: f64, nodes: usize) -> Amplitude {
    Amplitude {
        component: l.component,
        location: part,
        kind: l.kind,
        amplitude_scale: l.amplitude_scale,
        amplitude,
        strip_nodes: nodes,
    }
}

/// Per predicted layer: `max |u_c - u0_c|` over its transition strip.
pub fn amplitude_probe_1d(
    sol: &DiscreteSolution1D,
    catalog: &LayerCatalog,
    red: &ReducedSolution1D,
) -> Result<Vec<Amplitude>> {
    let mut out = Vec::new();
    for l in catalog.boundary_layers() {
        let (Some(part @ BoundaryPart::Endpoint(e)), Some(rate)) = (l.location.part(), l.rate) else {
            continue;
        };
        let strip = sol
            .mesh
            .strip(e == Endpoint::One, strip_width(rate.width(), sol.mesh.intervals()));
        if strip.len() < MIN_STRIP_NODES {
            return Err(Error::UnresolvedLayer {
                location: part.to_string(),
                nodes: strip.len(),
            });
        }
        let c = l.component - 1;
        let amp = strip
            .iter()
            .map(|&i| (sol.values[i][c] - red.eval(sol.mesh.nodes[i])[c]).abs())
            .fold(0.0, f64::max);
        out.push(amplitude_entry(l, part, amp, strip.len()));
    }
    Ok(out)
}

/// Per predicted edge layer: `max |u_c - u0_c|` along the first interior
/// mesh line parallel to the edge, skipping the strips of perpendicular
/// edges that carry layers of their own.
pub fn amplitude_probe_2d(
    sol: &DiscreteSolution2D,
    catalog: &LayerCatalog,
    red: &ReducedSolution2D,
) -> Result<Vec<Amplitude>> {
    let mesh = &sol.mesh;
    let (n1, n2) = mesh.shape();
    let strip_of = |e: EdgeId| {
        let axis = if e.is_vertical() { &mesh.x1 } else { &mesh.x2 };
        narrowest(catalog, BoundaryPart::Edge(e)).map(|w| strip_width(w, axis.intervals()))
    };
    let mut out = Vec::new();
    for l in catalog.boundary_layers() {
        let (Some(part @ BoundaryPart::Edge(e)), Some(rate)) = (l.location.part(), l.rate) else {
            continue;
        };
        let axis = if e.is_vertical() { &mesh.x1 } else { &mesh.x2 };
        let lines = mesh.strip_lines(e, strip_width(rate.width(), axis.intervals()));
        if lines < MIN_STRIP_NODES {
            return Err(Error::UnresolvedLayer {
                location: part.to_string(),
                nodes: lines,
            });
        }
        let (ends, nodes): (_, Vec<(usize, usize)>) = match e {
            EdgeId::Left => ([EdgeId::Bottom, EdgeId::Top], (1..n2 - 1).map(|j| (1, j)).collect()),
            EdgeId::Right => ([EdgeId::Bottom, EdgeId::Top], (1..n2 - 1).map(|j| (n1 - 2, j)).collect()),
            EdgeId::Bottom => ([EdgeId::Left, EdgeId::Right], (1..n1 - 1).map(|i| (i, 1)).collect()),
            EdgeId::Top => ([EdgeId::Left, EdgeId::Right], (1..n1 - 1).map(|i| (i, n2 - 2)).collect()),
        };
        let c = l.component - 1;
        let amp = nodes
            .into_iter()
            .filter(|&(i, j)| {
                let (x1, x2) = (mesh.x1.nodes[i], mesh.x2.nodes[j]);
                ends.iter()
                    .all(|&p| strip_of(p).is_none_or(|w| p.distance(x1, x2) > w))
            })
            .map(|(i, j)| {
                let u0 = red.eval(mesh.x1.nodes[i], mesh.x2.nodes[j]);
                (sol.at(i, j)[c] - u0[c]).abs()
            })
            .fold(0.0, f64::max);
        out.push(amplitude_entry(l, part, amp, lines));
    }
    Ok(out)
}

/// Largest cell gradient `max_c |∇_h u_c|` and the cell midpoint where it
/// occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientMax {
    pub value: f64,
    pub at: Vec2,
}

fn cell_gradient(sol: &DiscreteSolution2D, i: usize, j: usize) -> f64 {
    let m = &sol.mesh;
    let (h1, h2) = (m.x1.h(i + 1), m.x2.h(j + 1));
    let (a, b, c, d) = (sol.at(i, j), sol.at(i + 1, j), sol.at(i, j + 1), sol.at(i + 1, j + 1));
    (0..2)
        .map(|k| {
            let gx = 0.5 * ((b[k] - a[k]) + (d[k] - c[k])) / h1;
            let gy = 0.5 * ((c[k] - a[k]) + (d[k] - b[k])) / h2;
            gx.hypot(gy)
        })
        .fold(0.0, f64::max)
}

/// Maximum over cells whose midpoint passes `keep`.
pub fn max_gradient(sol: &DiscreteSolution2D, keep: impl Fn(f64, f64) -> bool) -> Option<GradientMax> {
    let m = &sol.mesh;
    let (n1, n2) = m.shape();
    let mut best: Option<GradientMax> = None;
    for j in 0..n2 - 1 {
        for i in 0..n1 - 1 {
            let at = [
                0.5 * (m.x1.nodes[i] + m.x1.nodes[i + 1]),
                0.5 * (m.x2.nodes[j] + m.x2.nodes[j + 1]),
            ];
            if !keep(at[0], at[1]) {
                continue;
            }
            let g = cell_gradient(sol, i, j);
            if best.is_none_or(|b| g > b.value) {
                best = Some(GradientMax { value: g, at });
            }
        }
    }
    best
}

/// Outcome of comparing where the solution is steep with where the
/// catalog predicts layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerLocationCheck {
    pub gradient: GradientMax,
    /// Strip widths of the edges carrying predicted layers.
    pub strips: Vec<(EdgeId, f64)>,
    pub inside_strips: bool,
    /// Largest gradient next to edges without predicted layers, away from
    /// the other strips.
    pub quiet_edge_gradient: f64,
    /// `10 ‖f‖∞`, the bound for gradients where no layer is predicted.
    pub bound: f64,
    pub passed: bool,
}

/// The global gradient maximum must lie inside a predicted strip, and next
/// to layer-free edges the gradient must stay below `10 ‖f‖∞`.
pub fn check_layer_locations(
    sol: &DiscreteSolution2D,
    catalog: &LayerCatalog,
    rhs_max: f64,
) -> LayerLocationCheck {
    let mesh = &sol.mesh;
    let strips: Vec<(EdgeId, f64)> = EdgeId::ALL
        .into_iter()
        .filter_map(|e| {
            let axis = if e.is_vertical() { &mesh.x1 } else { &mesh.x2 };
            narrowest(catalog, BoundaryPart::Edge(e)).map(|w| (e, strip_width(w, axis.intervals())))
        })
        .collect();
    let in_strip = |x1: f64, x2: f64| strips.iter().any(|&(e, w)| e.distance(x1, x2) <= w);
    let gradient = max_gradient(sol, |_, _| true).expect("mesh has cells");
    let bound = 10.0 * rhs_max;
    let quiet: Vec<EdgeId> = EdgeId::ALL
        .into_iter()
        .filter(|e| !strips.iter().any(|s| s.0 == *e))
        .collect();
    let quiet_edge_gradient = quiet
        .iter()
        .filter_map(|&e| {
            let axis = if e.is_vertical() { &mesh.x1 } else { &mesh.x2 };
            let first_cell = if matches!(e, EdgeId::Left | EdgeId::Bottom) {
                axis.h(1)
            } else {
                axis.h(axis.intervals())
            };
            max_gradient(sol, |x1, x2| e.distance(x1, x2) < first_cell && !in_strip(x1, x2))
        })
        .map(|g| g.value)
        .fold(0.0, f64::max);
    let inside_strips = in_strip(gradient.at[0], gradient.at[1]);
    let passed = if strips.is_empty() {
        gradient.value <= bound
    } else {
        inside_strips && quiet_edge_gradient <= bound
    };
    LayerLocationCheck {
        gradient,
        strips,
        inside_strips,
        quiet_edge_gradient,
        bound,
        passed,
    }
}

fn bilinear(sol: &DiscreteSolution2D, x1: f64, x2: f64) -> Vec2 {
    let m = &sol.mesh;
    let locate = |nodes: &[f64], x: f64| {
        let i = nodes.partition_point(|&t| t < x).clamp(1, nodes.len() - 1);
        let t = ((x - nodes[i - 1]) / (nodes[i] - nodes[i - 1])).clamp(0.0, 1.0);
        (i - 1, t)
    };
    let (i, s) = locate(&m.x1.nodes, x1);
    let (j, t) = locate(&m.x2.nodes, x2);
    let (a, b, c, d) = (sol.at(i, j), sol.at(i + 1, j), sol.at(i, j + 1), sol.at(i + 1, j + 1));
    let mut out = [0.0; 2];
    for k in 0..2 {
        out[k] = (1.0 - s) * (1.0 - t) * a[k] + s * (1.0 - t) * b[k] + (1.0 - s) * t * c[k] + s * t * d[k];
    }
    out
}

/// Errors against a fine reference (`n_ref = 4 max n`, same scheme and mesh
/// family), interpolated onto each coarse mesh.
pub fn scheme_convergence(
    sys: &System,
    n_list: &[usize],
    mesh: &MeshSpec,
    scheme: Scheme,
    exec: Execution,
) -> Result<SweepResult> {
    let Some(&n_max) = n_list.iter().max() else {
        return Err(Error::InvalidInput("empty mesh list".into()));
    };
    let opts = SolveOptions {
        scheme,
        exec: Some(Execution::Sequential),
        ..Default::default()
    };
    let reference = solve(sys, &mesh.with_n(4 * n_max), &SolveOptions { exec: Some(exec), ..opts })?;
    let points = par::map(exec, n_list, |&n| -> Result<(f64, f64, f64)> {
        let sol = solve(sys, &mesh.with_n(n), &opts)?;
        let (l2, max) = match (&sol, &reference) {
            (Solution::OneD(s), Solution::OneD(r)) => {
                let d: Vec<Vec2> = s
                    .mesh
                    .nodes
                    .iter()
                    .zip(&s.values)
                    .map(|(&x, u)| {
                        let v = r.eval(x);
                        [u[0] - v[0], u[1] - v[1]]
                    })
                    .collect();
                (l2_norm_1d(&s.mesh, &d), max_norm(&d))
            }
            (Solution::TwoD(s), Solution::TwoD(r)) => {
                let (n1, n2) = s.mesh.shape();
                let mut d = vec![[0.0, 0.0]; n1 * n2];
                for j in 0..n2 {
                    for i in 0..n1 {
                        let v = bilinear(r, s.mesh.x1.nodes[i], s.mesh.x2.nodes[j]);
                        let u = s.at(i, j);
                        d[s.mesh.index(i, j)] = [u[0] - v[0], u[1] - v[1]];
                    }
                }
                (l2_norm_2d(&s.mesh, &d), max_norm(&d))
            }
            _ => unreachable!("same system"),
        };
        Ok((n as f64, l2, max))
    });
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::new(SweepAxis::N, points))
}

/// Largest pointwise norm of a solution, for reporting.
pub fn solution_max(sol: &Solution) -> f64 {
    match sol {
        Solution::OneD(s) => s.values.iter().map(|v| norm2(*v)).fold(0.0, f64::max),
        Solution::TwoD(s) => s.values.iter().map(|v| norm2(*v)).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{make_preset, Preset};
    use crate::system::{Rhs1D, Rhs2D};

    #[test]
    fn l2_of_constant_on_uniform_mesh_is_exact() {
        let mesh = Mesh1D::uniform(10).unwrap();
        let v = vec![[3.0, 4.0]; 11];
        assert_eq!(l2_norm_1d(&mesh, &v), 5.0);
        let m2 = Mesh2D::uniform(8).unwrap();
        let v2 = vec![[0.0, -2.0]; 81];
        assert_eq!(l2_norm_2d(&m2, &v2), 2.0);
    }

    #[test]
    fn l2_of_linear_function_matches_integral() {
        // sqrt(∫ x^2) = 1/sqrt(3), trapezoid error O(h^2)
        let mesh = Mesh1D::shishkin(4096, Some(0.25), None).unwrap();
        let v: Vec<Vec2> = mesh.nodes.iter().map(|&x| [x, 0.0]).collect();
        assert!((l2_norm_1d(&mesh, &v) - (1.0f64 / 3.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn fit_recovers_power_law() {
        let xs = [1e-1, 1e-2, 1e-3, 1e-4];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 7.0 * x.powf(0.5)).collect();
        let f = fit_loglog(&xs, &ys).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!(fit_loglog(&[1.0], &[1.0]).is_none());
        assert!(fit_loglog(&xs, &[0.0; 4]).is_none());
    }

    #[test]
    fn n_axis_rates_are_positive_orders() {
        let pts = vec![(16.0, 1.0 / 256.0, 1.0 / 256.0), (32.0, 1.0 / 1024.0, 1.0 / 1024.0)];
        let r = SweepResult::new(SweepAxis::N, pts);
        assert!((r.rows[1].rate_l2.unwrap() - 2.0).abs() < 1e-12);
        assert!((r.rate().unwrap() - 2.0).abs() < 1e-12);
        assert!(r.rows[0].rate_l2.is_none());
    }

    #[test]
    fn zero_rhs_sweep_has_no_fit() {
        let sys = make_preset(Preset::Example1D);
        let System::OneD(s) = sys else { unreachable!() };
        let sys = System::OneD(s.with_rhs(Rhs1D::Constant { value: [0.0, 0.0] }));
        let r = eps_rate_sweep(&sys, &[1e-2, 1e-3, 1e-4], &MeshSpec::shishkin(64), Scheme::Central, Execution::Sequential)
            .unwrap();
        assert!(r.rows.iter().all(|row| row.l2 == 0.0 && row.max == 0.0 && row.rate_l2.is_none()));
        assert!(r.fit_l2.is_none());
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let sys = make_preset(Preset::Example1D);
        let m = MeshSpec::shishkin(64);
        for list in [&[][..], &[1e-2, 1e-3][..], &[1e-3, 1e-2, 1e-4][..]] {
            assert!(matches!(
                eps_rate_sweep(&sys, list, &m, Scheme::Central, Execution::Sequential),
                Err(Error::InvalidInput(_))
            ));
        }
    }

    #[test]
    fn coarse_uniform_mesh_is_unresolved() {
        let sys = make_preset(Preset::Example1D);
        let r = eps_rate_sweep(
            &sys,
            &[1e-2, 1e-3, 1e-4],
            &MeshSpec::Uniform { n: 64 },
            Scheme::Central,
            Execution::Sequential,
        );
        assert!(matches!(r, Err(Error::UnresolvedLayer { .. })));
    }

    #[test]
    fn ansatz_error_is_zero_for_zero_rhs() {
        let s = make_preset(Preset::Example1D)
            .into_1d()
            .unwrap()
            .with_rhs(Rhs1D::Constant { value: [0.0, 0.0] });
        assert_eq!(ansatz_error(&s, 1e-3, &MeshSpec::shishkin(256)).unwrap(), 0.0);
    }

    #[test]
    fn zero_rhs_amplitudes_vanish() {
        let s = make_preset(Preset::DuctFlow)
            .into_2d()
            .unwrap()
            .with_rhs(Rhs2D::Constant { value: [0.0, 0.0] });
        let catalog = crate::analysis::layer_catalog_2d(&s).unwrap();
        let mesh = crate::mesh::shishkin_mesh_2d(64, &catalog, 2.0).unwrap();
        let sol = crate::solve2d::solve_fd_2d(&s, &mesh, Scheme::Upwind).unwrap();
        let red = reduced_2d(&s).unwrap();
        let amps = amplitude_probe_2d(&sol, &catalog, &red).unwrap();
        assert!(!amps.is_empty());
        assert!(amps.iter().all(|a| a.amplitude == 0.0));
    }

    #[test]
    fn uniform_central_converges_at_second_order() {
        let s = make_preset(Preset::Example1D)
            .into_1d()
            .unwrap()
            .with_perturbation(PerturbationSpec::OneParam { eps: 1.0 });
        let r = scheme_convergence(
            &System::OneD(s),
            &[16, 32, 64, 128],
            &MeshSpec::Uniform { n: 0 },
            Scheme::Central,
            Execution::Sequential,
        )
        .unwrap();
        let rate = r.fit_max.unwrap().slope;
        assert!((rate - 2.0).abs() < 0.1, "rate {rate}");
    }
}
