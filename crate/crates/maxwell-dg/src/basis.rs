//! Shifted Legendre modal basis and Gauss–Legendre quadrature.
//!
//! Basis functions are the classical Legendre polynomials P_l on the
//! reference interval [-1, 1], normalized so that P_l(1) = 1, and mapped
//! affinely to each mesh cell. With this convention the modal mass matrix
//! is diagonal with entries ∫_{I_j} (φ_j^l)² dx = h_j / (2l + 1).

use crate::error::{Error, Result};

/// Degree of the DG polynomial space; the modal basis is P_0, ..., P_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    degree: usize,
}

impl BasisSpec {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of modes per cell, k + 1.
    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    /// Evaluate the l-th basis function at a reference coordinate ξ ∈ [-1, 1].
    pub fn eval_basis(&self, l: usize, xi: f64) -> Result<f64> {
        if l > self.degree {
            return Err(Error::InvalidArg(format!(
                "basis index {l} exceeds degree {}",
                self.degree
            )));
        }
        Ok(eval_legendre(l, xi))
    }
}

/// P_l(ξ) by the three-term recurrence
/// (l+1) P_{l+1} = (2l+1) ξ P_l − l P_{l-1}.
pub fn eval_legendre(l: usize, xi: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => xi,
        _ => {
            let mut pm1 = 1.0;
            let mut p = xi;
            for n in 1..l {
                let nf = n as f64;
                let next = ((2.0 * nf + 1.0) * xi * p - nf * pm1) / (nf + 1.0);
                pm1 = p;
                p = next;
            }
            p
        }
    }
}

/// (P_n(ξ), P_n'(ξ)), used by the Newton iteration for quadrature nodes.
fn eval_legendre_with_deriv(n: usize, xi: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut pm1 = 1.0;
    let mut p = xi;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0) * xi * p - mf * pm1) / (mf + 1.0);
        pm1 = p;
        p = next;
    }
    // P_n'(ξ) = n (ξ P_n − P_{n-1}) / (ξ² − 1)
    let dp = if (xi * xi - 1.0).abs() < 1e-30 {
        // endpoint limit: P_n'(±1) = ±^{n+1} n(n+1)/2
        let s = if xi > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        (n as f64) * (xi * p - pm1) / (xi * xi - 1.0)
    };
    (p, dp)
}

/// Gauss–Legendre rule on [-1, 1]; exact for polynomials of degree ≤ 2n−1.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_{-1}^{1} f(ξ) dξ.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// n-point Gauss–Legendre nodes and weights, computed by Newton iteration
/// on the roots of P_n (no tables, any n ≥ 1).
pub fn gauss_rule(n: usize) -> QuadratureRule {
    assert!(n >= 1, "quadrature rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess for the i-th root (descending order)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = eval_legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = eval_legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, dp) = eval_legendre_with_deriv(n, 0.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }
    QuadratureRule { nodes, weights }
}

/// Diagonal mass data of one cell: 1/μ^l = ∫_{I_j} (φ^l)² dx = h/(2l+1),
/// together with the inverses μ^l.
#[derive(Debug, Clone)]
pub struct MassData {
    /// μ^l = (2l+1)/h
    pub mu: Vec<f64>,
    /// 1/μ^l = h/(2l+1)
    pub inv_mu: Vec<f64>,
}

pub fn mass_data(h: f64, degree: usize) -> Result<MassData> {
    if !(h > 0.0) {
        return Err(Error::InvalidArg(format!("non-positive cell width {h}")));
    }
    let mu: Vec<f64> = (0..=degree).map(|l| (2 * l + 1) as f64 / h).collect();
    let inv_mu: Vec<f64> = (0..=degree).map(|l| h / (2 * l + 1) as f64).collect();
    Ok(MassData { mu, inv_mu })
}

/// Overlap table c[m][l] = ∫_{-1}^{1} P_l(ξ) P_m'(ξ) dξ, row-major (k+1)².
///
/// Since P_m' expands in Legendre polynomials of the same parity as m−1,
/// the entry is 2 when l < m and m−l is odd, and 0 otherwise.
pub(crate) fn deriv_overlap(degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let mut c = vec![0.0; n * n];
    for m in 0..n {
        for l in 0..m {
            if (m - l) % 2 == 1 {
                c[m * n + l] = 2.0;
            }
        }
    }
    c
}
