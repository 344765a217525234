//! Modal coefficient vectors for scalar fields on 1D and 2D meshes.
//!
//! 1D layout is cell-major with mode-minor index: (j, l) ↦ j(k+1) + l.
//! 2D layout flattens cells x-fastest and tensor modes as l = a + (k+1)b
//! for x-mode a and y-mode b: (i, j, l) ↦ (i + N_x j)(k+1)² + l.

use crate::basis::{eval_legendre, gauss_rule, BasisSpec};
use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, Mesh2D};

/// Modal coefficients of one scalar field on a 1D mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCoeffs {
    pub data: Vec<f64>,
    n_cells: usize,
    degree: usize,
}

impl FieldCoeffs {
    pub fn zeros(n_cells: usize, degree: usize) -> Self {
        Self {
            data: vec![0.0; n_cells * (degree + 1)],
            n_cells,
            degree,
        }
    }

    pub fn from_data(data: Vec<f64>, n_cells: usize, degree: usize) -> Result<Self> {
        if data.len() != n_cells * (degree + 1) {
            return Err(Error::Dimension(format!(
                "coefficient vector has length {}, expected {}",
                data.len(),
                n_cells * (degree + 1)
            )));
        }
        Ok(Self {
            data,
            n_cells,
            degree,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn idx(&self, j: usize, l: usize) -> usize {
        j * (self.degree + 1) + l
    }

    #[inline]
    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.data[self.idx(j, l)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, l: usize, v: f64) {
        let i = self.idx(j, l);
        self.data[i] = v;
    }

    /// Evaluate inside cell j at reference coordinate ξ ∈ [-1, 1].
    pub fn eval_ref(&self, j: usize, xi: f64) -> f64 {
        let k1 = self.degree + 1;
        let cell = &self.data[j * k1..(j + 1) * k1];
        let mut acc = 0.0;
        for (l, &c) in cell.iter().enumerate() {
            acc += c * eval_legendre(l, xi);
        }
        acc
    }

    /// Evaluate at a physical point (periodic wrap).
    pub fn eval_at(&self, mesh: &Mesh1D, x: f64) -> f64 {
        let j = mesh.locate(x);
        let xi = (x - mesh.cell_center(j)) / (0.5 * mesh.cell_width(j));
        self.eval_ref(j, xi.clamp(-1.0, 1.0))
    }

    /// Trace value at the right face of cell j (ξ = 1): Σ_l c_j^l.
    pub fn trace_right(&self, j: usize) -> f64 {
        let k1 = self.degree + 1;
        self.data[j * k1..(j + 1) * k1].iter().sum()
    }

    /// Trace value at the left face of cell j (ξ = -1): Σ_l (-1)^l c_j^l.
    pub fn trace_left(&self, j: usize) -> f64 {
        let k1 = self.degree + 1;
        self.data[j * k1..(j + 1) * k1]
            .iter()
            .enumerate()
            .map(|(l, &c)| if l % 2 == 0 { c } else { -c })
            .sum()
    }

    /// ∫ f² dx via the diagonal mass: Σ_{j,l} (c_j^l)² h_j/(2l+1).
    pub fn l2_norm_sq(&self, mesh: &Mesh1D) -> f64 {
        mass_inner_1d(&self.data, &self.data, mesh, self.degree)
    }
}

/// Mass-weighted inner product of two 1D coefficient vectors,
/// ⟨a, b⟩_M = Σ_{j,l} a_j^l b_j^l h_j/(2l+1) = ∫ a_h b_h dx.
pub fn mass_inner_1d(a: &[f64], b: &[f64], mesh: &Mesh1D, degree: usize) -> f64 {
    let k1 = degree + 1;
    let mut acc = 0.0;
    for j in 0..mesh.n_cells() {
        let h = mesh.cell_width(j);
        for l in 0..k1 {
            acc += a[j * k1 + l] * b[j * k1 + l] * h / (2 * l + 1) as f64;
        }
    }
    acc
}

/// L² error of a 1D field against a closure, by per-cell Gauss quadrature.
pub fn l2_error_1d<F: Fn(f64) -> f64>(
    field: &FieldCoeffs,
    mesh: &Mesh1D,
    g: F,
    n_quad: usize,
) -> f64 {
    let rule = gauss_rule(n_quad);
    let mut acc = 0.0;
    for j in 0..mesh.n_cells() {
        let h = mesh.cell_width(j);
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let x = mesh.to_physical(j, xi);
            let d = field.eval_ref(j, xi) - g(x);
            acc += w * d * d * h / 2.0;
        }
    }
    acc.sqrt()
}

/// Modal coefficients of one scalar field on a 2D tensor mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCoeffs2D {
    pub data: Vec<f64>,
    nx: usize,
    ny: usize,
    degree: usize,
}

impl FieldCoeffs2D {
    pub fn zeros(nx: usize, ny: usize, degree: usize) -> Self {
        let k1 = degree + 1;
        Self {
            data: vec![0.0; nx * ny * k1 * k1],
            nx,
            ny,
            degree,
        }
    }

    pub fn from_data(data: Vec<f64>, nx: usize, ny: usize, degree: usize) -> Result<Self> {
        let k1 = degree + 1;
        if data.len() != nx * ny * k1 * k1 {
            return Err(Error::Dimension(format!(
                "coefficient vector has length {}, expected {}",
                data.len(),
                nx * ny * k1 * k1
            )));
        }
        Ok(Self {
            data,
            nx,
            ny,
            degree,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Flat index of (cell i, cell j, x-mode a, y-mode b).
    #[inline]
    pub fn idx(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        let k1 = self.degree + 1;
        (i + self.nx * j) * k1 * k1 + a + k1 * b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        self.data[self.idx(i, j, a, b)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, a: usize, b: usize, v: f64) {
        let ix = self.idx(i, j, a, b);
        self.data[ix] = v;
    }

    /// Evaluate inside cell (i, j) at reference coordinates (ξ, η).
    pub fn eval_ref(&self, i: usize, j: usize, xi: f64, eta: f64) -> f64 {
        let k1 = self.degree + 1;
        let base = (i + self.nx * j) * k1 * k1;
        let mut acc = 0.0;
        for b in 0..k1 {
            let pb = eval_legendre(b, eta);
            for a in 0..k1 {
                acc += self.data[base + a + k1 * b] * eval_legendre(a, xi) * pb;
            }
        }
        acc
    }

    /// Evaluate at a physical point (periodic wrap).
    pub fn eval_at(&self, mesh: &Mesh2D, x: f64, y: f64) -> f64 {
        let i = mesh.x.locate(x);
        let j = mesh.y.locate(y);
        let xi = (x - mesh.x.cell_center(i)) / (0.5 * mesh.x.cell_width(i));
        let eta = (y - mesh.y.cell_center(j)) / (0.5 * mesh.y.cell_width(j));
        self.eval_ref(i, j, xi.clamp(-1.0, 1.0), eta.clamp(-1.0, 1.0))
    }

    pub fn l2_norm_sq(&self, mesh: &Mesh2D) -> f64 {
        mass_inner_2d(&self.data, &self.data, mesh, self.degree)
    }
}

/// Mass-weighted inner product on the 2D tensor layout,
/// ⟨a, b⟩_M = Σ a b · (h_x/(2a+1))(h_y/(2b+1)) = ∬ a_h b_h dx dy.
pub fn mass_inner_2d(a: &[f64], b: &[f64], mesh: &Mesh2D, degree: usize) -> f64 {
    let k1 = degree + 1;
    let nx = mesh.nx();
    let mut acc = 0.0;
    for j in 0..mesh.ny() {
        let hy = mesh.y.cell_width(j);
        for i in 0..nx {
            let hx = mesh.x.cell_width(i);
            let base = (i + nx * j) * k1 * k1;
            for bm in 0..k1 {
                let wy = hy / (2 * bm + 1) as f64;
                for am in 0..k1 {
                    let w = wy * hx / (2 * am + 1) as f64;
                    acc += a[base + am + k1 * bm] * b[base + am + k1 * bm] * w;
                }
            }
        }
    }
    acc
}

/// L² error of a 2D field against a closure, by tensor Gauss quadrature.
pub fn l2_error_2d<F: Fn(f64, f64) -> f64>(
    field: &FieldCoeffs2D,
    mesh: &Mesh2D,
    g: F,
    n_quad: usize,
) -> f64 {
    let rule = gauss_rule(n_quad);
    let mut acc = 0.0;
    for j in 0..mesh.ny() {
        let hy = mesh.y.cell_width(j);
        for i in 0..mesh.nx() {
            let hx = mesh.x.cell_width(i);
            for (&eta, &wy) in rule.nodes.iter().zip(&rule.weights) {
                let y = mesh.y.to_physical(j, eta);
                for (&xi, &wx) in rule.nodes.iter().zip(&rule.weights) {
                    let x = mesh.x.to_physical(i, xi);
                    let d = field.eval_ref(i, j, xi, eta) - g(x, y);
                    acc += wx * wy * d * d * hx * hy / 4.0;
                }
            }
        }
    }
    acc.sqrt()
}

/// Project basis helper shared by tests: number of modes for a degree.
pub fn n_modes(basis: &BasisSpec) -> usize {
    basis.n_modes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{tensor_mesh_2d, uniform_mesh_1d};

    #[test]
    fn traces_match_eval() {
        let mesh = uniform_mesh_1d(0.0, 1.0, 3, true).unwrap();
        let mut f = FieldCoeffs::zeros(3, 2);
        for j in 0..3 {
            for l in 0..3 {
                f.set(j, l, (j + 1) as f64 * 0.3 + l as f64 * 0.11);
            }
        }
        for j in 0..3 {
            assert!((f.trace_right(j) - f.eval_ref(j, 1.0)).abs() < 1e-14);
            assert!((f.trace_left(j) - f.eval_ref(j, -1.0)).abs() < 1e-14);
        }
        let x = mesh.to_physical(1, 0.3);
        assert!((f.eval_at(&mesh, x) - f.eval_ref(1, 0.3)).abs() < 1e-13);
    }

    #[test]
    fn l2_norm_matches_quadrature() {
        let mesh = uniform_mesh_1d(0.0, 2.0, 5, true).unwrap();
        let mut f = FieldCoeffs::zeros(5, 2);
        let vals = [0.7, -0.3, 0.22, 0.9, -0.5];
        for j in 0..5 {
            for l in 0..3 {
                f.set(j, l, vals[j] / (l + 1) as f64);
            }
        }
        let rule = gauss_rule(6);
        let mut quad = 0.0;
        for j in 0..5 {
            let h = mesh.cell_width(j);
            quad += rule.integrate(|xi| {
                let v = f.eval_ref(j, xi);
                v * v
            }) * h
                / 2.0;
        }
        let m = f.l2_norm_sq(&mesh);
        assert!((m - quad).abs() < 1e-12 * quad);
    }

    #[test]
    fn l2_norm_matches_quadrature_2d() {
        let mesh = tensor_mesh_2d(
            uniform_mesh_1d(0.0, 1.0, 3, true).unwrap(),
            uniform_mesh_1d(0.0, 2.0, 2, true).unwrap(),
        );
        let mut f = FieldCoeffs2D::zeros(3, 2, 1);
        for (n, v) in f.data.iter_mut().enumerate() {
            *v = ((n * 7919) % 13) as f64 / 13.0 - 0.5;
        }
        let rule = gauss_rule(4);
        let mut quad = 0.0;
        for j in 0..2 {
            for i in 0..3 {
                let hx = mesh.x.cell_width(i);
                let hy = mesh.y.cell_width(j);
                for (&eta, &wy) in rule.nodes.iter().zip(&rule.weights) {
                    for (&xi, &wx) in rule.nodes.iter().zip(&rule.weights) {
                        let v = f.eval_ref(i, j, xi, eta);
                        quad += wx * wy * v * v * hx * hy / 4.0;
                    }
                }
            }
        }
        let m = f.l2_norm_sq(&mesh);
        assert!((m - quad).abs() < 1e-12 * quad.abs());
    }
}
