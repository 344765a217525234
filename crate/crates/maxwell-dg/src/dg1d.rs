//! 1D DG semi-discretization of dη = −u_x dt − λ₁ dW, du = −η_x dt + λ₂ dW
//! with generalized alternating fluxes ǔ = {u} + α[u], η̌ = {η} − α[η].
//!
//! The weak flux-derivative form on cell j against test function g is
//!
//!   𝒜_j(f; g) = ∫_{I_j} f g_x dx − (f̌ g⁻)_{j+1/2} + (f̌ g⁺)_{j-1/2},
//!
//! which after mass inversion yields a periodic block-tridiagonal operator.
//! Both drift operators here are built from that form; constants are
//! annihilated and ⟨W(β) a, b⟩_M = −⟨a, W(−β) b⟩_M holds by telescoping,
//! which is the discrete mechanism behind the energy law.

use crate::basis::{deriv_overlap, BasisSpec};
use crate::error::{Error, Result};
use crate::field::FieldCoeffs;
use crate::mesh::Mesh1D;
use crate::qwiener::{noise_load_1d, raw_gram_1d, SpectralNoiseModel};
use crate::system::{DriftSystem, Operator};

/// Flux parameter α of the alternating-flux family; α ∈ [-1, 1] \ {0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParam(pub f64);

impl FluxParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha == 0.0 || !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArg(format!(
                "flux parameter must be nonzero in [-1, 1], got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }
}

/// Periodic block-tridiagonal operator with per-cell (k+1)×(k+1) blocks.
#[derive(Debug, Clone)]
pub struct BlockTriOp {
    n_cells: usize,
    bs: usize,
    minus: Vec<f64>,
    diag: Vec<f64>,
    plus: Vec<f64>,
}

impl BlockTriOp {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn block_size(&self) -> usize {
        self.bs
    }

    pub fn dim(&self) -> usize {
        self.n_cells * self.bs
    }

    pub fn scale(&mut self, c: f64) {
        for v in self
            .minus
            .iter_mut()
            .chain(self.diag.iter_mut())
            .chain(self.plus.iter_mut())
        {
            *v *= c;
        }
    }

    /// Per-cell (minus, diag, plus) blocks of cell j, row-major.
    pub(crate) fn blocks(&self, j: usize) -> (&[f64], &[f64], &[f64]) {
        let s = self.bs * self.bs;
        (
            &self.minus[j * s..(j + 1) * s],
            &self.diag[j * s..(j + 1) * s],
            &self.plus[j * s..(j + 1) * s],
        )
    }

    /// y = T x with periodic wrap (cell 0 couples to cell N−1).
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let bs = self.bs;
        let n = self.n_cells;
        debug_assert_eq!(x.len(), n * bs);
        debug_assert_eq!(y.len(), n * bs);
        for j in 0..n {
            let jm = if j == 0 { n - 1 } else { j - 1 };
            let jp = if j + 1 == n { 0 } else { j + 1 };
            let xm = &x[jm * bs..jm * bs + bs];
            let xc = &x[j * bs..j * bs + bs];
            let xp = &x[jp * bs..jp * bs + bs];
            let bm = &self.minus[j * bs * bs..(j + 1) * bs * bs];
            let bd = &self.diag[j * bs * bs..(j + 1) * bs * bs];
            let bp = &self.plus[j * bs * bs..(j + 1) * bs * bs];
            let yj = &mut y[j * bs..(j + 1) * bs];
            for m in 0..bs {
                let row = m * bs;
                let mut acc = 0.0;
                for l in 0..bs {
                    acc += bm[row + l] * xm[l] + bd[row + l] * xc[l] + bp[row + l] * xp[l];
                }
                yj[m] = acc;
            }
        }
    }
}

/// Mass-inverted weak flux-derivative W(β): (W(β) f)_j^m = μ_j^m 𝒜_j(f; φ_j^m)
/// with interface values f̌ = {f} + β[f]. Approximates −∂_x on smooth data.
pub(crate) fn flux_weak_blocks(mesh: &Mesh1D, basis: &BasisSpec, beta: f64) -> BlockTriOp {
    let bs = basis.n_modes();
    let n = mesh.n_cells();
    let c = deriv_overlap(basis.degree());
    let wl = 0.5 - beta; // weight of the left trace f⁻
    let wr = 0.5 + beta; // weight of the right trace f⁺
    let mut minus = vec![0.0; n * bs * bs];
    let mut diag = vec![0.0; n * bs * bs];
    let mut plus = vec![0.0; n * bs * bs];
    for j in 0..n {
        let h = mesh.cell_width(j);
        for m in 0..bs {
            let mu = (2 * m + 1) as f64 / h;
            let sgn_m = if m % 2 == 0 { 1.0 } else { -1.0 };
            for l in 0..bs {
                let sgn_l = if l % 2 == 0 { 1.0 } else { -1.0 };
                let o = j * bs * bs + m * bs + l;
                minus[o] = mu * sgn_m * wl;
                diag[o] = mu * (c[m * bs + l] - wl + sgn_m * sgn_l * wr);
                plus[o] = mu * (-wr * sgn_l);
            }
        }
    }
    BlockTriOp {
        n_cells: n,
        bs,
        minus,
        diag,
        plus,
    }
}

/// Flux-derivative operator D(α) ≈ ∂_x: maps modal coefficients of f to the
/// mass-inverted weak derivative with interface values f̌ = {f} + α[f].
pub fn assemble_derivative_op(mesh: &Mesh1D, basis: &BasisSpec, alpha: f64) -> Result<BlockTriOp> {
    let alpha = FluxParam::new(alpha)?.0;
    let mut op = flux_weak_blocks(mesh, basis, alpha);
    op.scale(-1.0);
    Ok(op)
}

/// Assemble the 1D Maxwell drift system with p = η, q = u:
///
///   dp = A q dt + L dB,  A = W(α)   (dη-equation, flux {u} + α[u])
///   dq = B p dt + N dB,  B = W(−α)  (du-equation, flux {η} − α[η])
///
/// and noise loads L = −λ₁ G, N = +λ₂ G.
pub fn assemble_maxwell_1d(
    mesh: &Mesh1D,
    basis: &BasisSpec,
    alpha: f64,
    lambda1: f64,
    lambda2: f64,
    noise: &SpectralNoiseModel,
) -> Result<DriftSystem> {
    let alpha = FluxParam::new(alpha)?.0;
    let a = flux_weak_blocks(mesh, basis, alpha);
    let b = flux_weak_blocks(mesh, basis, -alpha);
    let l = noise_load_1d(noise, mesh, basis, -lambda1)?;
    let n = noise_load_1d(noise, mesh, basis, lambda2)?;
    DriftSystem::new(Operator::BlockTri(a), Operator::BlockTri(b), l, n)
}

/// Discrete energy ‖u_h‖² + ‖η_h‖² via the diagonal mass.
pub fn discrete_energy_1d(u: &FieldCoeffs, eta: &FieldCoeffs, mesh: &Mesh1D) -> Result<f64> {
    if u.n_cells() != eta.n_cells()
        || u.degree() != eta.degree()
        || u.n_cells() != mesh.n_cells()
    {
        return Err(Error::Dimension("field layouts do not match".into()));
    }
    Ok(u.l2_norm_sq(mesh) + eta.l2_norm_sq(mesh))
}

/// Discrete energy on raw state vectors of a 1D system (p = η, q = u).
pub fn energy_from_state_1d(p: &[f64], q: &[f64], mesh: &Mesh1D, degree: usize) -> f64 {
    crate::field::mass_inner_1d(p, p, mesh, degree) + crate::field::mass_inner_1d(q, q, mesh, degree)
}

/// The energy-law constant K = Σ_j Σ_l μ_j^l Σ_m (∫_{I_j} φ_j^l √γ_m e_m dx)².
///
/// Equals Tr(Q) exactly for standard Brownian motion and Tr(Q) + O(h^r) for
/// smooth mode families; always bounded by (k+1) Tr(Q).
pub fn compute_k_1d(noise: &SpectralNoiseModel, mesh: &Mesh1D, basis: &BasisSpec) -> f64 {
    let k1 = basis.n_modes();
    let dof = mesh.n_cells() * k1;
    let g = raw_gram_1d(noise, mesh, basis);
    let mut k = 0.0;
    for m in 0..noise.n_modes() {
        for j in 0..mesh.n_cells() {
            let h = mesh.cell_width(j);
            for l in 0..k1 {
                let e = g[m * dof + j * k1 + l];
                k += (2 * l + 1) as f64 / h * e * e;
            }
        }
    }
    k
}
