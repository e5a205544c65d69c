//! Uniform and Shishkin (piecewise-uniform, layer-adapted) meshes.

use crate::analysis::LayerCatalog;
use crate::error::{Error, Result};
use crate::system::{BoundaryPart, EdgeId, Endpoint};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SIGMA: f64 = 2.0;
/// Fewest mesh nodes a layer strip must contain to count as resolved.
pub const MIN_STRIP_NODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshKind {
    Uniform,
    /// Transition points measured from each end; `None` where no layer is
    /// predicted.
    Shishkin {
        tau_left: Option<f64>,
        tau_right: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    pub nodes: Vec<f64>,
    pub kind: MeshKind,
}

impl Mesh1D {
    pub fn uniform(n: usize) -> Result<Mesh1D> {
        if n < 2 {
            return Err(Error::BadMeshSize(n));
        }
        Ok(Mesh1D {
            nodes: (0..=n).map(|i| i as f64 / n as f64).collect(),
            kind: MeshKind::Uniform,
        })
    }

    /// Piecewise-uniform mesh with `n/4` intervals in each layer region
    /// (`n/2` when only one side has a layer).
    pub fn shishkin(n: usize, tau_left: Option<f64>, tau_right: Option<f64>) -> Result<Mesh1D> {
        if n < 8 || !n.is_multiple_of(4) {
            return Err(Error::BadMeshSize(n));
        }
        let mut breaks: Vec<(f64, usize)> = Vec::new();
        let (a, b) = (tau_left.unwrap_or(0.0), 1.0 - tau_right.unwrap_or(0.0));
        match (tau_left, tau_right) {
            (None, None) => return Mesh1D::uniform(n),
            (Some(_), Some(_)) => {
                breaks.push((a, n / 4));
                breaks.push((b, n / 2));
                breaks.push((1.0, n / 4));
            }
            (Some(_), None) => {
                breaks.push((a, n / 2));
                breaks.push((1.0, n / 2));
            }
            (None, Some(_)) => {
                breaks.push((b, n / 2));
                breaks.push((1.0, n / 2));
            }
        }
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(0.0);
        let mut start = 0.0;
        for (end, count) in breaks {
            for i in 1..=count {
                nodes.push(if i == count {
                    end
                } else {
                    start + (end - start) * i as f64 / count as f64
                });
            }
            start = end;
        }
        Ok(Mesh1D {
            nodes,
            kind: MeshKind::Shishkin {
                tau_left,
                tau_right,
            },
        })
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `h_i = x_i - x_{i-1}`, `1 <= i <= n`.
    pub fn h(&self, i: usize) -> f64 {
        self.nodes[i] - self.nodes[i - 1]
    }

    pub fn is_valid(&self) -> bool {
        self.nodes.first() == Some(&0.0)
            && self.nodes.last() == Some(&1.0)
            && self.nodes.windows(2).all(|w| w[1] > w[0])
    }

    /// Trapezoid weights; they sum to 1.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.intervals();
        (0..=n)
            .map(|i| {
                let left = if i > 0 { self.h(i) } else { 0.0 };
                let right = if i < n { self.h(i + 1) } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }

    /// Node indices with distance at most `width` from the given end
    /// (`false` = x=0, `true` = x=1).
    pub fn strip(&self, at_right: bool, width: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let d = if at_right { 1.0 - self.nodes[i] } else { self.nodes[i] };
                d <= width * (1.0 + 1e-12)
            })
            .collect()
    }

    /// Linear interpolation of nodal values.
    pub fn interpolate(&self, values: &[[f64; 2]], x: f64) -> [f64; 2] {
        let i = self.nodes.partition_point(|&t| t < x).clamp(1, self.intervals());
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
        let (a, b) = (values[i - 1], values[i]);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }
}

/// Shishkin transition `min(1/4, sigma * width * ln n)`.
pub fn transition(width: f64, sigma: f64, n: usize) -> f64 {
    (sigma * width * (n as f64).ln()).min(0.25)
}

/// 1D Shishkin mesh from a layer catalog; with several layers at one
/// endpoint the widest one sets the transition.
pub fn shishkin_mesh(n: usize, catalog: &LayerCatalog, sigma: f64) -> Result<Mesh1D> {
    let tau = |e: Endpoint| {
        catalog
            .widest(BoundaryPart::Endpoint(e))
            .map(|w| transition(w, sigma, n))
    };
    Mesh1D::shishkin(n, tau(Endpoint::Zero), tau(Endpoint::One))
}

/// Tensor-product mesh, `x1` factor first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh2D {
    pub x1: Mesh1D,
    pub x2: Mesh1D,
}

impl Mesh2D {
    pub fn uniform(n: usize) -> Result<Mesh2D> {
        Ok(Mesh2D {
            x1: Mesh1D::uniform(n)?,
            x2: Mesh1D::uniform(n)?,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x1.len(), self.x2.len())
    }

    /// Flat index of node `(i, j)`, `x1` fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.x1.len() + i
    }

    pub fn node_count(&self) -> usize {
        self.x1.len() * self.x2.len()
    }

    /// Node indices `(i, j)` within `width` of `edge`.
    pub fn strip(&self, edge: EdgeId, width: f64) -> Vec<(usize, usize)> {
        let (n1, n2) = self.shape();
        let mut out = Vec::new();
        for j in 0..n2 {
            for i in 0..n1 {
                if edge.distance(self.x1.nodes[i], self.x2.nodes[j]) <= width * (1.0 + 1e-12) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Number of mesh lines within `width` of `edge` (including the edge).
    pub fn strip_lines(&self, edge: EdgeId, width: f64) -> usize {
        let axis = if edge.is_vertical() { &self.x1 } else { &self.x2 };
        let right = matches!(edge, EdgeId::Right | EdgeId::Top);
        axis.strip(right, width).len()
    }
}

/// Per-edge Shishkin transitions from a 2D layer catalog.
pub fn shishkin_mesh_2d(n: usize, catalog: &LayerCatalog, sigma: f64) -> Result<Mesh2D> {
    let tau = |e: EdgeId| {
        catalog
            .widest(BoundaryPart::Edge(e))
            .map(|w| transition(w, sigma, n))
    };
    Ok(Mesh2D {
        x1: Mesh1D::shishkin(n, tau(EdgeId::Left), tau(EdgeId::Right))?,
        x2: Mesh1D::shishkin(n, tau(EdgeId::Bottom), tau(EdgeId::Top))?,
    })
}

/// How a solver should build its mesh for a given system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshSpec {
    Uniform { n: usize },
    Shishkin { n: usize, sigma: f64 },
}

impl MeshSpec {
    pub fn shishkin(n: usize) -> MeshSpec {
        MeshSpec::Shishkin {
            n,
            sigma: DEFAULT_SIGMA,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            MeshSpec::Uniform { n } | MeshSpec::Shishkin { n, .. } => n,
        }
    }

    pub fn with_n(&self, n: usize) -> MeshSpec {
        match *self {
            MeshSpec::Uniform { .. } => MeshSpec::Uniform { n },
            MeshSpec::Shishkin { sigma, .. } => MeshSpec::Shishkin { n, sigma },
        }
    }

    /// Sigma used for strip widths; uniform meshes use the default.
    pub fn sigma(&self) -> f64 {
        match *self {
            MeshSpec::Uniform { .. } => DEFAULT_SIGMA,
            MeshSpec::Shishkin { sigma, .. } => sigma,
        }
    }

    pub fn build_1d(&self, catalog: &LayerCatalog) -> Result<Mesh1D> {
        match *self {
            MeshSpec::Uniform { n } => Mesh1D::uniform(n),
            MeshSpec::Shishkin { n, sigma } => shishkin_mesh(n, catalog, sigma),
        }
    }

    pub fn build_2d(&self, catalog: &LayerCatalog) -> Result<Mesh2D> {
        match *self {
            MeshSpec::Uniform { n } => Mesh2D::uniform(n),
            MeshSpec::Shishkin { n, sigma } => shishkin_mesh_2d(n, catalog, sigma),
        }
    }
}
