//! Gaussian radial basis functions on regular grids and their design
//! matrix, plus the neighbor structure over the centers that gives
//! "consecutive" tuning parameters their meaning.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Gaussian RBF basis on an equally spaced grid: 1D chain or a 2D
/// tensor grid ordered row-major.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    dims: usize,
    /// m x dims matrix of center coordinates.
    centers: DMatrix<f64>,
    width: f64,
    domain: Vec<(f64, f64)>,
    m_per_dim: usize,
}

impl BasisSpec {
    /// Equally spaced grid of centers including both endpoints per
    /// dimension, with width = `scale` times the grid spacing.
    pub fn grid(domain: &[(f64, f64)], m_per_dim: usize, scale: f64) -> Result<Self> {
        let dims = domain.len();
        if dims == 0 || dims > 2 {
            return Err(Error::InvalidParameter(format!(
                "built-in bases support 1 or 2 dimensions, got {dims}"
            )));
        }
        let axes: Vec<Vec<f64>> = domain
            .iter()
            .map(|&(lo, hi)| build_grid_axis(lo, hi, m_per_dim))
            .collect::<Result<_>>()?;
        let spacing = (axes[0][1] - axes[0][0]).abs();
        let width = rbf_width(spacing, scale)?;

        let centers = match dims {
            1 => DMatrix::from_column_slice(m_per_dim, 1, &axes[0]),
            _ => {
                // Row-major tensor grid: index j = r * m_per_dim + c maps to
                // (axis0[r], axis1[c]).
                let m = m_per_dim * m_per_dim;
                let mut centers = DMatrix::zeros(m, 2);
                for r in 0..m_per_dim {
                    for c in 0..m_per_dim {
                        centers[(r * m_per_dim + c, 0)] = axes[0][r];
                        centers[(r * m_per_dim + c, 1)] = axes[1][c];
                    }
                }
                centers
            }
        };
        Ok(Self {
            dims,
            centers,
            width,
            domain: domain.to_vec(),
            m_per_dim,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn num_centers(&self) -> usize {
        self.centers.nrows()
    }

    pub fn centers(&self) -> &DMatrix<f64> {
        &self.centers
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Chain adjacency in 1D, 4-neighbor grid adjacency in 2D.
    pub fn adjacency(&self) -> Adjacency {
        match self.dims {
            1 => Adjacency::chain(self.num_centers()),
            _ => Adjacency::grid(self.m_per_dim, self.m_per_dim),
        }
    }

    /// Evaluates one basis function at a point.
    pub fn eval(&self, j: usize, x: &[f64]) -> f64 {
        let mut d2 = 0.0;
        for (d, &xd) in x.iter().enumerate() {
            let diff = xd - self.centers[(j, d)];
            d2 += diff * diff;
        }
        (-d2 / (2.0 * self.width * self.width)).exp()
    }

    /// Evaluates the full basis vector at a point.
    pub fn eval_row(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_fn(self.num_centers(), |j, _| self.eval(j, x))
    }
}

/// Equally spaced axis including both endpoints.
pub fn build_grid_axis(lo: f64, hi: f64, m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::TooFewCenters(m));
    }
    if !(hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "domain bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (m - 1) as f64;
    Ok((0..m).map(|i| lo + step * i as f64).collect())
}

/// RBF bandwidth from grid spacing: width = scale * spacing.
pub fn rbf_width(spacing: f64, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::NonPositiveScale(scale));
    }
    Ok(scale * spacing)
}

/// Symmetric, connected neighbor structure over the basis centers.
#[derive(Debug, Clone)]
pub struct Adjacency {
    neighbors: Vec<Vec<usize>>,
    /// Incident difference terms per node when the boundary is padded
    /// with phantom zero neighbors: 2 on a chain, 4 on a grid.
    phantom_degree: usize,
}

impl Adjacency {
    pub fn chain(m: usize) -> Self {
        let neighbors = (0..m)
            .map(|j| {
                let mut nb = Vec::with_capacity(2);
                if j > 0 {
                    nb.push(j - 1);
                }
                if j + 1 < m {
                    nb.push(j + 1);
                }
                nb
            })
            .collect();
        Self {
            neighbors,
            phantom_degree: 2,
        }
    }

    /// 4-neighbor adjacency of a rows x cols grid, row-major indexing.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let idx = |r: usize, c: usize| r * cols + c;
        let neighbors = (0..rows * cols)
            .map(|j| {
                let (r, c) = (j / cols, j % cols);
                let mut nb = Vec::with_capacity(4);
                if r > 0 {
                    nb.push(idx(r - 1, c));
                }
                if c > 0 {
                    nb.push(idx(r, c - 1));
                }
                if c + 1 < cols {
                    nb.push(idx(r, c + 1));
                }
                if r + 1 < rows {
                    nb.push(idx(r + 1, c));
                }
                nb
            })
            .collect();
        Self {
            neighbors,
            phantom_degree: 4,
        }
    }

    pub fn phantom_degree(&self) -> usize {
        self.phantom_degree
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.neighbors[j]
    }

    pub fn degree(&self, j: usize) -> usize {
        self.neighbors[j].len()
    }

    /// Edges (i, j) with i < j.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// Graph Laplacian (degree minus adjacency). For a 1D chain this is
    /// the second-difference matrix with corner entries 1, and
    /// lambda' L lambda equals the sum of squared edge differences.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut lap = DMatrix::zeros(m, m);
        for (i, nb) in self.neighbors.iter().enumerate() {
            lap[(i, i)] = nb.len() as f64;
            for &j in nb {
                lap[(i, j)] = -1.0;
            }
        }
        lap
    }
}

/// Evaluated design matrix phi[i][j] = phi_j(x_i) plus the neighbor
/// structure over the m centers.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub phi: DMatrix<f64>,
    pub adjacency: Adjacency,
}

impl DesignMatrix {
    pub fn n(&self) -> usize {
        self.phi.nrows()
    }

    pub fn m(&self) -> usize {
        self.phi.ncols()
    }
}

/// Evaluates phi[i][j] = exp(-||x_i - c_j||^2 / (2 width^2)) for all
/// design points.
pub fn design_matrix(spec: &BasisSpec, xs: &DMatrix<f64>) -> DesignMatrix {
    let n = xs.nrows();
    let m = spec.num_centers();
    let mut phi = DMatrix::zeros(n, m);
    let point: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..xs.ncols()).map(|d| xs[(i, d)]).collect())
        .collect();
    for i in 0..n {
        for j in 0..m {
            phi[(i, j)] = spec.eval(j, &point[i]);
        }
    }
    DesignMatrix {
        phi,
        adjacency: spec.adjacency(),
    }
}
