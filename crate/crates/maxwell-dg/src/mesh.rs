//! 1D interval partitions and 2D cartesian tensor meshes.
//!
//! Only periodic connectivity is supported; the energy and flux telescoping
//! arguments used throughout the solver rely on it, and non-periodic meshes
//! are rejected at construction.

use crate::error::{Error, Result};

/// Partition of an interval into cells [x_{j-1/2}, x_{j+1/2}], periodic.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    boundaries: Vec<f64>,
}

impl Mesh1D {
    /// Build a (possibly nonuniform) periodic mesh from strictly increasing
    /// cell boundaries.
    pub fn from_boundaries(boundaries: Vec<f64>, periodic: bool) -> Result<Self> {
        if !periodic {
            return Err(Error::InvalidArg(
                "only periodic meshes are supported".into(),
            ));
        }
        if boundaries.len() < 2 {
            return Err(Error::InvalidArg("mesh needs at least one cell".into()));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArg(
                "cell boundaries must be strictly increasing".into(),
            ));
        }
        Ok(Self { boundaries })
    }

    pub fn n_cells(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn a(&self) -> f64 {
        self.boundaries[0]
    }

    pub fn b(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.b() - self.a()
    }

    pub fn cell_width(&self, j: usize) -> f64 {
        self.boundaries[j + 1] - self.boundaries[j]
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        0.5 * (self.boundaries[j] + self.boundaries[j + 1])
    }

    /// Left boundary x_{j-1/2} of cell j.
    pub fn left_face(&self, j: usize) -> f64 {
        self.boundaries[j]
    }

    /// Right boundary x_{j+1/2} of cell j.
    pub fn right_face(&self, j: usize) -> f64 {
        self.boundaries[j + 1]
    }

    pub fn h_max(&self) -> f64 {
        (0..self.n_cells())
            .map(|j| self.cell_width(j))
            .fold(0.0, f64::max)
    }

    /// Periodic left neighbor; cell 0 wraps to cell N−1.
    pub fn left_neighbor(&self, j: usize) -> usize {
        if j == 0 {
            self.n_cells() - 1
        } else {
            j - 1
        }
    }

    /// Periodic right neighbor; cell N−1 wraps to cell 0.
    pub fn right_neighbor(&self, j: usize) -> usize {
        if j + 1 == self.n_cells() {
            0
        } else {
            j + 1
        }
    }

    /// Map a reference coordinate ξ ∈ [-1, 1] into cell j.
    pub fn to_physical(&self, j: usize, xi: f64) -> f64 {
        self.cell_center(j) + 0.5 * self.cell_width(j) * xi
    }

    /// Cell index containing x (periodic wrap of x into [a, b)).
    pub fn locate(&self, x: f64) -> usize {
        let len = self.length();
        let mut xw = (x - self.a()).rem_euclid(len) + self.a();
        if xw >= self.b() {
            xw = self.a();
        }
        match self
            .boundaries
            .binary_search_by(|v| v.partial_cmp(&xw).unwrap())
        {
            Ok(i) => i.min(self.n_cells() - 1),
            Err(i) => i - 1,
        }
    }
}

/// N equal cells on [a, b].
pub fn uniform_mesh_1d(a: f64, b: f64, n: usize, periodic: bool) -> Result<Mesh1D> {
    if !(b > a) {
        return Err(Error::InvalidArg(format!("degenerate interval [{a}, {b}]")));
    }
    if n == 0 {
        return Err(Error::InvalidArg("mesh needs at least one cell".into()));
    }
    let h = (b - a) / n as f64;
    let mut boundaries: Vec<f64> = (0..=n).map(|j| a + j as f64 * h).collect();
    // pin the last boundary so the domain length is exact
    boundaries[n] = b;
    Mesh1D::from_boundaries(boundaries, periodic)
}

/// Cartesian product of two 1D partitions; cells are I_i × J_j.
#[derive(Debug, Clone)]
pub struct Mesh2D {
    pub x: Mesh1D,
    pub y: Mesh1D,
}

pub fn tensor_mesh_2d(mx: Mesh1D, my: Mesh1D) -> Mesh2D {
    Mesh2D { x: mx, y: my }
}

impl Mesh2D {
    pub fn nx(&self) -> usize {
        self.x.n_cells()
    }

    pub fn ny(&self) -> usize {
        self.y.n_cells()
    }

    pub fn n_cells(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn area(&self) -> f64 {
        self.x.length() * self.y.length()
    }

    pub fn h_max(&self) -> f64 {
        self.x.h_max().max(self.y.h_max())
    }
}
