//! Truncated Q-Wiener process W_t = Σ_m √γ_m e_m(x) B_m(t).
//!
//! A noise model is a finite list of modes (γ_m, e_m) with {e_m} orthonormal
//! in L² of the domain. Per time step the pair (ΔB, J) with
//! J = (1/τ)∫_t^{t+τ} (B_s − B_t) ds is drawn jointly Gaussian per mode:
//!
//!   Cov(ΔB, J) = [[τ, τ/2], [τ/2, τ/3]],
//!
//! realized through the Cholesky factorization ΔB = √τ Z₁,
//! J = ΔB/2 + √(τ/12) Z₂. Sampling uses one counter-seeded stream per
//! (sample path, mode) so paths are reproducible under parallel execution.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;

use crate::basis::{gauss_rule, BasisSpec};
use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, Mesh2D};

/// Quadrature points per cell (and per direction) for noise Gram entries.
const NOISE_QUAD_PTS: usize = 10;

/// Spatial domain a noise model lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseDomain {
    Interval { a: f64, b: f64 },
    Rectangle { ax: f64, bx: f64, ay: f64, by: f64 },
}

impl NoiseDomain {
    pub fn measure(&self) -> f64 {
        match *self {
            NoiseDomain::Interval { a, b } => b - a,
            NoiseDomain::Rectangle { ax, bx, ay, by } => (bx - ax) * (by - ay),
        }
    }
}

/// Shape of one orthonormal mode e_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeShape {
    /// e = 1/√|domain|
    Constant,
    /// e_m(x) = √(2/L) sin(2πm(x−a)/L) on an interval of length L
    Sine1D { m: u32 },
    /// e_{mn}(x, y) = √(2/Lx) sin(mπ(x−ax)/Lx) · √(2/Ly) sin(nπ(y−ay)/Ly)
    SineProduct { m: u32, n: u32 },
}

/// One mode of the spectral expansion: eigenvalue γ and shape of e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMode {
    pub gamma: f64,
    pub shape: ModeShape,
}

/// Truncated Q-Wiener description: modes (γ_m, e_m) on a domain.
#[derive(Debug, Clone)]
pub struct SpectralNoiseModel {
    pub domain: NoiseDomain,
    pub modes: Vec<NoiseMode>,
}

impl SpectralNoiseModel {
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Tr(Q) = Σ_m γ_m.
    pub fn trace(&self) -> f64 {
        self.modes.iter().map(|m| m.gamma).sum()
    }

    /// Evaluate the orthonormal mode e_m at a 1D point.
    pub fn eval_mode_1d(&self, mode: usize, x: f64) -> f64 {
        let NoiseDomain::Interval { a, b } = self.domain else {
            panic!("eval_mode_1d on a non-interval domain");
        };
        match self.modes[mode].shape {
            ModeShape::Constant => 1.0 / (b - a).sqrt(),
            ModeShape::Sine1D { m } => {
                let l = b - a;
                (2.0 / l).sqrt() * (2.0 * std::f64::consts::PI * m as f64 * (x - a) / l).sin()
            }
            ModeShape::SineProduct { .. } => panic!("product mode on an interval domain"),
        }
    }

    /// Evaluate the orthonormal mode e_m at a 2D point.
    pub fn eval_mode_2d(&self, mode: usize, x: f64, y: f64) -> f64 {
        let NoiseDomain::Rectangle { ax, bx, ay, by } = self.domain else {
            panic!("eval_mode_2d on a non-rectangle domain");
        };
        match self.modes[mode].shape {
            ModeShape::Constant => 1.0 / ((bx - ax) * (by - ay)).sqrt(),
            ModeShape::SineProduct { m, n } => {
                let lx = bx - ax;
                let ly = by - ay;
                let fx = (2.0 / lx).sqrt() * (std::f64::consts::PI * m as f64 * (x - ax) / lx).sin();
                let fy = (2.0 / ly).sqrt() * (std::f64::consts::PI * n as f64 * (y - ay) / ly).sin();
                fx * fy
            }
            ModeShape::Sine1D { .. } => panic!("1D sine mode on a rectangle domain"),
        }
    }

    /// √γ_m e_m at a 2D point; the summand shape of the expansion.
    pub fn sqrt_gamma_e_2d(&self, mode: usize, x: f64, y: f64) -> f64 {
        self.modes[mode].gamma.sqrt() * self.eval_mode_2d(mode, x, y)
    }
}

/// Standard Brownian motion as a single-mode model: γ₁ = |domain| and
/// e₁ = 1/√|domain|, so that √γ₁ e₁ ≡ 1 and Tr(Q) = |domain|.
pub fn standard_bm(domain: NoiseDomain) -> SpectralNoiseModel {
    SpectralNoiseModel {
        domain,
        modes: vec![NoiseMode {
            gamma: domain.measure(),
            shape: ModeShape::Constant,
        }],
    }
}

/// Orthonormal periodic sine family on an interval with caller-chosen γ_m.
pub fn sine_noise_1d<F: Fn(u32) -> f64>(
    a: f64,
    b: f64,
    m_max: u32,
    gamma: F,
) -> SpectralNoiseModel {
    SpectralNoiseModel {
        domain: NoiseDomain::Interval { a, b },
        modes: (1..=m_max)
            .map(|m| NoiseMode {
                gamma: gamma(m),
                shape: ModeShape::Sine1D { m },
            })
            .collect(),
    }
}

/// Colored noise on [0, 2/3] × [0, 1/2] built from products of sine modes:
///
///   W_t = Σ_{m,n} 2 √(3/(m³+n³)) sin(3mπx/2) sin(2nπy) B_{mn}(t),
///
/// one independent Brownian motion per (m, n) pair. With the orthonormal
/// e_{mn} = 2√3 sin(3mπx/2) sin(2nπy) this fixes γ_{mn} = 1/(m³+n³).
pub fn sine_product_noise(m_max: u32) -> SpectralNoiseModel {
    let mut modes = Vec::with_capacity((m_max * m_max) as usize);
    for m in 1..=m_max {
        for n in 1..=m_max {
            modes.push(NoiseMode {
                gamma: 1.0 / ((m as f64).powi(3) + (n as f64).powi(3)),
                shape: ModeShape::SineProduct { m, n },
            });
        }
    }
    SpectralNoiseModel {
        domain: NoiseDomain::Rectangle {
            ax: 0.0,
            bx: 2.0 / 3.0,
            ay: 0.0,
            by: 0.5,
        },
        modes,
    }
}

/// Per-mode increments over one step: ΔB_m always, J_m on request.
#[derive(Debug, Clone)]
pub struct NoiseIncrement {
    pub tau: f64,
    pub db: Vec<f64>,
    pub j: Option<Vec<f64>>,
}

impl NoiseIncrement {
    pub fn zero(tau: f64, n_modes: usize, with_j: bool) -> Self {
        Self {
            tau,
            db: vec![0.0; n_modes],
            j: with_j.then(|| vec![0.0; n_modes]),
        }
    }

    pub fn j(&self) -> Result<&[f64]> {
        self.j
            .as_deref()
            .ok_or_else(|| Error::InvalidArg("increment carries no J component".into()))
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Gaussian increment source for one sample path.
///
/// Each (path, mode) pair owns an independent ChaCha stream: the 256-bit key
/// is derived from (base_seed, path) and the mode index selects the stream.
pub struct PathSampler {
    rngs: Vec<ChaCha8Rng>,
}

impl PathSampler {
    pub fn new(base_seed: u64, path: u64, n_modes: usize) -> Self {
        let mut st = base_seed;
        let k = splitmix64(&mut st);
        let mut st2 = k ^ path.wrapping_mul(0xd129_0d3d_a7d4_1bbd) ^ path.rotate_left(32);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut st2).to_le_bytes());
        }
        let rngs = (0..n_modes)
            .map(|m| {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(m as u64);
                rng
            })
            .collect();
        Self { rngs }
    }

    pub fn n_modes(&self) -> usize {
        self.rngs.len()
    }

    /// Draw (ΔB, J) for one step of size τ; with `need_j == false` only
    /// ΔB ~ N(0, τ) is drawn and J is omitted.
    pub fn sample(&mut self, tau: f64, need_j: bool) -> NoiseIncrement {
        debug_assert!(tau > 0.0);
        let sq_tau = tau.sqrt();
        let sq_t12 = (tau / 12.0).sqrt();
        let mut db = Vec::with_capacity(self.rngs.len());
        let mut j = need_j.then(|| Vec::with_capacity(self.rngs.len()));
        for rng in &mut self.rngs {
            let z1: f64 = rng.sample(StandardNormal);
            let b = sq_tau * z1;
            db.push(b);
            if let Some(j) = j.as_mut() {
                let z2: f64 = rng.sample(StandardNormal);
                j.push(0.5 * b + sq_t12 * z2);
            }
        }
        NoiseIncrement { tau, db, j }
    }
}

/// Projection of the noise modes onto the DG space: applying the load to a
/// per-mode vector v yields the modal coefficients of λ Σ_m v_m √γ_m e_m.
#[derive(Debug, Clone)]
pub enum NoiseLoad {
    /// All-zero load (λ = 0).
    Zero { dof: usize, n_modes: usize },
    /// Mode-major dense matrix g[mode·dof + i].
    Dense {
        g: Vec<f64>,
        dof: usize,
        n_modes: usize,
    },
    /// Separable 2D form: mode q contributes scaleq · gx_{fx(q)} ⊗ gy_{fy(q)}.
    Tensor2 {
        gx: Vec<f64>,
        gy: Vec<f64>,
        nx_dof: usize,
        ny_dof: usize,
        /// per mode: (x-factor, y-factor, scale)
        modes: Vec<(u32, u32, f64)>,
        nx: usize,
        k1: usize,
    },
    /// Same load feeding two stacked state blocks: out = [G v; G v].
    Stacked2 { inner: Box<NoiseLoad> },
}

impl NoiseLoad {
    pub fn dof(&self) -> usize {
        match self {
            NoiseLoad::Zero { dof, .. } | NoiseLoad::Dense { dof, .. } => *dof,
            NoiseLoad::Tensor2 { nx_dof, ny_dof, .. } => nx_dof * ny_dof,
            NoiseLoad::Stacked2 { inner } => 2 * inner.dof(),
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            NoiseLoad::Zero { n_modes, .. } | NoiseLoad::Dense { n_modes, .. } => *n_modes,
            NoiseLoad::Tensor2 { modes, .. } => modes.len(),
            NoiseLoad::Stacked2 { inner } => inner.n_modes(),
        }
    }

    /// out += G v for a per-mode vector v.
    pub fn apply_add(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.n_modes());
        debug_assert_eq!(out.len(), self.dof());
        match self {
            NoiseLoad::Zero { .. } => {}
            NoiseLoad::Dense { g, dof, .. } => {
                for (m, &vm) in v.iter().enumerate() {
                    if vm == 0.0 {
                        continue;
                    }
                    let col = &g[m * dof..(m + 1) * dof];
                    for (o, &gi) in out.iter_mut().zip(col) {
                        *o += vm * gi;
                    }
                }
            }
            NoiseLoad::Tensor2 {
                gx,
                gy,
                nx_dof,
                ny_dof,
                modes,
                nx,
                k1,
            } => {
                let n_fx = gx.len() / nx_dof;
                // stage 1: contract the y-factors per x-factor
                let mut w = vec![0.0; n_fx * ny_dof];
                for (q, &(fx, fy, scale)) in modes.iter().enumerate() {
                    let c = scale * v[q];
                    if c == 0.0 {
                        continue;
                    }
                    let wrow = &mut w[fx as usize * ny_dof..(fx as usize + 1) * ny_dof];
                    let gyrow = &gy[fy as usize * ny_dof..(fy as usize + 1) * ny_dof];
                    for (wv, &gv) in wrow.iter_mut().zip(gyrow) {
                        *wv += c * gv;
                    }
                }
                // stage 2: outer products into the 2D dof layout
                let k1 = *k1;
                let nx = *nx;
                for fx in 0..n_fx {
                    let gxrow = &gx[fx * nx_dof..(fx + 1) * nx_dof];
                    let wrow = &w[fx * ny_dof..(fx + 1) * ny_dof];
                    for (jy, wj) in wrow.chunks_exact(k1).enumerate() {
                        for (b, &wv) in wj.iter().enumerate() {
                            if wv == 0.0 {
                                continue;
                            }
                            for (ix, gi) in gxrow.chunks_exact(k1).enumerate() {
                                let base = (ix + nx * jy) * k1 * k1 + k1 * b;
                                for (a, &gv) in gi.iter().enumerate() {
                                    out[base + a] += wv * gv;
                                }
                            }
                        }
                    }
                }
            }
            NoiseLoad::Stacked2 { inner } => {
                let d = inner.dof();
                inner.apply_add(v, &mut out[..d]);
                inner.apply_add(v, &mut out[d..]);
            }
        }
    }

    /// G v as a fresh vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dof()];
        self.apply_add(v, &mut out);
        out
    }
}

fn domain_matches_1d(model: &SpectralNoiseModel, mesh: &Mesh1D) -> bool {
    match model.domain {
        NoiseDomain::Interval { a, b } => {
            (a - mesh.a()).abs() < 1e-12 && (b - mesh.b()).abs() < 1e-12
        }
        _ => false,
    }
}

fn domain_matches_2d(model: &SpectralNoiseModel, mesh: &Mesh2D) -> bool {
    match model.domain {
        NoiseDomain::Rectangle { ax, bx, ay, by } => {
            (ax - mesh.x.a()).abs() < 1e-12
                && (bx - mesh.x.b()).abs() < 1e-12
                && (ay - mesh.y.a()).abs() < 1e-12
                && (by - mesh.y.b()).abs() < 1e-12
        }
        _ => false,
    }
}

/// Raw Gram entries ∫_{I_j} φ_j^l √γ_m e_m dx, mode-major over (j, l).
pub(crate) fn raw_gram_1d(
    model: &SpectralNoiseModel,
    mesh: &Mesh1D,
    basis: &BasisSpec,
) -> Vec<f64> {
    let k1 = basis.n_modes();
    let dof = mesh.n_cells() * k1;
    let rule = gauss_rule(NOISE_QUAD_PTS.max(k1 + 1));
    let mut g = vec![0.0; model.n_modes() * dof];
    for (m, mode) in model.modes.iter().enumerate() {
        let sq_gamma = mode.gamma.sqrt();
        for j in 0..mesh.n_cells() {
            let h = mesh.cell_width(j);
            for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
                let x = mesh.to_physical(j, xi);
                let ev = sq_gamma * model.eval_mode_1d(m, x) * w * h / 2.0;
                for l in 0..k1 {
                    g[m * dof + j * k1 + l] += ev * crate::basis::eval_legendre(l, xi);
                }
            }
        }
    }
    g
}

/// Assemble the 1D noise load G with G[(j,l), m] = λ μ_j^l ∫ φ_j^l √γ_m e_m dx.
pub fn noise_load_1d(
    model: &SpectralNoiseModel,
    mesh: &Mesh1D,
    basis: &BasisSpec,
    lambda: f64,
) -> Result<NoiseLoad> {
    if !domain_matches_1d(model, mesh) {
        return Err(Error::Dimension(
            "noise model domain does not match the mesh".into(),
        ));
    }
    let k1 = basis.n_modes();
    let dof = mesh.n_cells() * k1;
    if lambda == 0.0 {
        return Ok(NoiseLoad::Zero {
            dof,
            n_modes: model.n_modes(),
        });
    }
    let mut g = raw_gram_1d(model, mesh, basis);
    for m in 0..model.n_modes() {
        for j in 0..mesh.n_cells() {
            let h = mesh.cell_width(j);
            for l in 0..k1 {
                g[m * dof + j * k1 + l] *= lambda * (2 * l + 1) as f64 / h;
            }
        }
    }
    Ok(NoiseLoad::Dense {
        g,
        dof,
        n_modes: model.n_modes(),
    })
}

/// Mass-inverted 1D factor Gram μ_i^a ∫_{I_i} φ^a f(x) dx for one factor f.
fn factor_gram<F: Fn(f64) -> f64>(mesh: &Mesh1D, basis: &BasisSpec, f: F) -> Vec<f64> {
    let k1 = basis.n_modes();
    let rule = gauss_rule(NOISE_QUAD_PTS.max(k1 + 1));
    let mut g = vec![0.0; mesh.n_cells() * k1];
    for i in 0..mesh.n_cells() {
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let x = mesh.to_physical(i, xi);
            let ev = f(x) * w / 2.0;
            for a in 0..k1 {
                // μ h/2 = (2a+1)/2 cancels the cell width
                g[i * k1 + a] += ev * crate::basis::eval_legendre(a, xi) * (2 * a + 1) as f64;
            }
        }
    }
    g
}

#[derive(PartialEq, Eq, Hash, Clone, Copy)]
enum FactorKey {
    One,
    Sin(u32),
}

/// Assemble the 2D noise load in separable (x ⊗ y) form.
pub fn noise_load_2d(
    model: &SpectralNoiseModel,
    mesh: &Mesh2D,
    basis: &BasisSpec,
    lambda: f64,
) -> Result<NoiseLoad> {
    if !domain_matches_2d(model, mesh) {
        return Err(Error::Dimension(
            "noise model domain does not match the mesh".into(),
        ));
    }
    let k1 = basis.n_modes();
    let nx_dof = mesh.nx() * k1;
    let ny_dof = mesh.ny() * k1;
    if lambda == 0.0 {
        return Ok(NoiseLoad::Zero {
            dof: nx_dof * ny_dof,
            n_modes: model.n_modes(),
        });
    }
    let NoiseDomain::Rectangle { ax, bx, ay, by } = model.domain else {
        unreachable!()
    };
    let lx = bx - ax;
    let ly = by - ay;

    let mut x_keys: HashMap<FactorKey, u32> = HashMap::new();
    let mut y_keys: HashMap<FactorKey, u32> = HashMap::new();
    let mut gx: Vec<f64> = Vec::new();
    let mut gy: Vec<f64> = Vec::new();
    let mut modes = Vec::with_capacity(model.n_modes());

    let mut x_factor = |key: FactorKey, gx: &mut Vec<f64>| -> u32 {
        *x_keys.entry(key).or_insert_with(|| {
            let g = match key {
                FactorKey::One => factor_gram(&mesh.x, basis, |_| 1.0 / lx.sqrt()),
                FactorKey::Sin(m) => factor_gram(&mesh.x, basis, |x| {
                    (2.0 / lx).sqrt() * (std::f64::consts::PI * m as f64 * (x - ax) / lx).sin()
                }),
            };
            gx.extend_from_slice(&g);
            (gx.len() / nx_dof - 1) as u32
        })
    };
    let mut y_factor = |key: FactorKey, gy: &mut Vec<f64>| -> u32 {
        *y_keys.entry(key).or_insert_with(|| {
            let g = match key {
                FactorKey::One => factor_gram(&mesh.y, basis, |_| 1.0 / ly.sqrt()),
                FactorKey::Sin(n) => factor_gram(&mesh.y, basis, |y| {
                    (2.0 / ly).sqrt() * (std::f64::consts::PI * n as f64 * (y - ay) / ly).sin()
                }),
            };
            gy.extend_from_slice(&g);
            (gy.len() / ny_dof - 1) as u32
        })
    };

    for mode in &model.modes {
        let (kx, ky) = match mode.shape {
            ModeShape::Constant => (FactorKey::One, FactorKey::One),
            ModeShape::SineProduct { m, n } => (FactorKey::Sin(m), FactorKey::Sin(n)),
            ModeShape::Sine1D { .. } => {
                return Err(Error::Dimension(
                    "1D sine mode cannot be projected on a 2D mesh".into(),
                ))
            }
        };
        let fx = x_factor(kx, &mut gx);
        let fy = y_factor(ky, &mut gy);
        modes.push((fx, fy, lambda * mode.gamma.sqrt()));
    }

    Ok(NoiseLoad::Tensor2 {
        gx,
        gy,
        nx_dof,
        ny_dof,
        modes,
        nx: mesh.nx(),
        k1,
    })
}
