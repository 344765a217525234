//! 2D DG semi-discretization of the three-field system
//!
//!   dE = (T_x − S_y) dt − λ₁ dW,
//!   dS = −E_y dt + λ₂ dW,
//!   dT =  E_x dt + λ₂ dW,
//!
//! on cartesian tensor meshes. The directional operators apply the 1D weak
//! flux-derivative along one axis and the identity along the other, so the
//! assembled drift acts through Kronecker structure instead of materialized
//! 2D matrices. With p = E and q = (S, T) stacked, the system takes the
//! canonical form dp = Aq dt + L dB, dq = Bp dt + N dB.

use crate::basis::BasisSpec;
use crate::dg1d::{flux_weak_blocks, BlockTriOp, FluxParam};
use crate::error::{Error, Result};
use crate::field::FieldCoeffs2D;
use crate::mesh::Mesh2D;
use crate::qwiener::{noise_load_2d, NoiseLoad, SpectralNoiseModel};
use crate::system::{DriftSystem, Operator};

/// Direction a derivative operator acts along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Flux parameters of the two directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParams2D {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl FluxParams2D {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        FluxParam::new(alpha1)?;
        FluxParam::new(alpha2)?;
        Ok(Self { alpha1, alpha2 })
    }
}

/// 1D block-tridiagonal operator applied along one axis of the 2D layout.
#[derive(Debug, Clone)]
pub struct DirectionalOp {
    axis: Axis,
    blocks: BlockTriOp,
    nx: usize,
    ny: usize,
    k1: usize,
}

impl DirectionalOp {
    pub fn dof(&self) -> usize {
        self.nx * self.ny * self.k1 * self.k1
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn scale(&mut self, c: f64) {
        self.blocks.scale(c);
    }

    fn apply_impl<const ACC: bool>(&self, x: &[f64], y: &mut [f64]) {
        let k1 = self.k1;
        let bs2 = k1 * k1;
        let nx = self.nx;
        let ny = self.ny;
        debug_assert_eq!(x.len(), self.dof());
        debug_assert_eq!(y.len(), self.dof());
        match self.axis {
            Axis::X => {
                for j in 0..ny {
                    for i in 0..nx {
                        let im = if i == 0 { nx - 1 } else { i - 1 };
                        let ip = if i + 1 == nx { 0 } else { i + 1 };
                        let (bm, bd, bp) = self.blocks.blocks(i);
                        let bc = (i + nx * j) * bs2;
                        let bmx = (im + nx * j) * bs2;
                        let bpx = (ip + nx * j) * bs2;
                        for b in 0..k1 {
                            let off = k1 * b;
                            for a in 0..k1 {
                                let row = a * k1;
                                let mut acc = 0.0;
                                for ap in 0..k1 {
                                    acc += bm[row + ap] * x[bmx + ap + off]
                                        + bd[row + ap] * x[bc + ap + off]
                                        + bp[row + ap] * x[bpx + ap + off];
                                }
                                if ACC {
                                    y[bc + a + off] += acc;
                                } else {
                                    y[bc + a + off] = acc;
                                }
                            }
                        }
                    }
                }
            }
            Axis::Y => {
                for j in 0..ny {
                    let jm = if j == 0 { ny - 1 } else { j - 1 };
                    let jp = if j + 1 == ny { 0 } else { j + 1 };
                    let (bm, bd, bp) = self.blocks.blocks(j);
                    for i in 0..nx {
                        let bc = (i + nx * j) * bs2;
                        let bmy = (i + nx * jm) * bs2;
                        let bpy = (i + nx * jp) * bs2;
                        for a in 0..k1 {
                            for b in 0..k1 {
                                let row = b * k1;
                                let mut acc = 0.0;
                                for bq in 0..k1 {
                                    acc += bm[row + bq] * x[bmy + a + k1 * bq]
                                        + bd[row + bq] * x[bc + a + k1 * bq]
                                        + bp[row + bq] * x[bpy + a + k1 * bq];
                                }
                                if ACC {
                                    y[bc + a + k1 * b] += acc;
                                } else {
                                    y[bc + a + k1 * b] = acc;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// y = T x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_impl::<false>(x, y);
    }

    /// y += T x.
    pub fn apply_add(&self, x: &[f64], y: &mut [f64]) {
        self.apply_impl::<true>(x, y);
    }
}

/// Mass-inverted weak flux-derivative along one axis with f̌ = {f} + β[f];
/// approximates −∂ along that axis.
pub(crate) fn directional_weak(
    mesh: &Mesh2D,
    basis: &BasisSpec,
    axis: Axis,
    beta: f64,
) -> DirectionalOp {
    let blocks = match axis {
        Axis::X => flux_weak_blocks(&mesh.x, basis, beta),
        Axis::Y => flux_weak_blocks(&mesh.y, basis, beta),
    };
    DirectionalOp {
        axis,
        blocks,
        nx: mesh.nx(),
        ny: mesh.ny(),
        k1: basis.n_modes(),
    }
}

/// Directional derivative operator D(α) ≈ ∂ along the given axis, with
/// interface values {f} + α[f] in that direction and identity in the other.
pub fn assemble_directional_op(
    mesh: &Mesh2D,
    basis: &BasisSpec,
    axis: Axis,
    alpha: f64,
) -> Result<DirectionalOp> {
    let alpha = FluxParam::new(alpha)?.0;
    let mut op = directional_weak(mesh, basis, axis, alpha);
    op.scale(-1.0);
    Ok(op)
}

/// Assemble the 2D Maxwell drift system with p = E and q = (S, T):
///
///   dE = [W_y(−α₂) S − W_x(α₁) T] dt − λ₁ dW
///   dS = W_y(α₂) E dt + λ₂ dW
///   dT = −W_x(−α₁) E dt + λ₂ dW
///
/// where W is the mass-inverted weak flux-derivative of the direction.
pub fn assemble_maxwell_2d(
    mesh: &Mesh2D,
    basis: &BasisSpec,
    fluxes: FluxParams2D,
    lambda1: f64,
    lambda2: f64,
    noise: &SpectralNoiseModel,
) -> Result<DriftSystem> {
    let FluxParams2D { alpha1, alpha2 } = FluxParams2D::new(fluxes.alpha1, fluxes.alpha2)?;
    let on_s = directional_weak(mesh, basis, Axis::Y, -alpha2);
    let mut on_t = directional_weak(mesh, basis, Axis::X, alpha1);
    on_t.scale(-1.0);
    let top = directional_weak(mesh, basis, Axis::Y, alpha2);
    let mut bottom = directional_weak(mesh, basis, Axis::X, -alpha1);
    bottom.scale(-1.0);

    let l = noise_load_2d(noise, mesh, basis, -lambda1)?;
    let n_single = noise_load_2d(noise, mesh, basis, lambda2)?;
    let n = NoiseLoad::Stacked2 {
        inner: Box::new(n_single),
    };

    DriftSystem::new(
        Operator::SplitIn {
            left: on_s,
            right: on_t,
        },
        Operator::SplitOut { top, bottom },
        l,
        n,
    )
}

/// Discrete energy ‖E_h‖² + ‖S_h‖² + ‖T_h‖².
pub fn discrete_energy_2d(
    e: &FieldCoeffs2D,
    s: &FieldCoeffs2D,
    t: &FieldCoeffs2D,
    mesh: &Mesh2D,
) -> Result<f64> {
    for f in [s, t] {
        if f.nx() != e.nx() || f.ny() != e.ny() || f.degree() != e.degree() {
            return Err(Error::Dimension("field layouts do not match".into()));
        }
    }
    if e.nx() != mesh.nx() || e.ny() != mesh.ny() {
        return Err(Error::Dimension("fields do not match the mesh".into()));
    }
    Ok(e.l2_norm_sq(mesh) + s.l2_norm_sq(mesh) + t.l2_norm_sq(mesh))
}

/// Discrete energy on raw state vectors (p = E, q = [S; T]).
pub fn energy_from_state_2d(p: &[f64], q: &[f64], mesh: &Mesh2D, degree: usize) -> f64 {
    let d = p.len();
    crate::field::mass_inner_2d(p, p, mesh, degree)
        + crate::field::mass_inner_2d(&q[..d], &q[..d], mesh, degree)
        + crate::field::mass_inner_2d(&q[d..], &q[d..], mesh, degree)
}

/// The 2D energy-law constant
/// K = Σ_{i,j} Σ_l μ_{i,j}^l Σ_m (∬ φ_{i,j}^l √γ_m e_m dx dy)²,
/// summed over all (k+1)² tensor modes per cell.
pub fn compute_k_2d(noise: &SpectralNoiseModel, mesh: &Mesh2D, basis: &BasisSpec) -> Result<f64> {
    // unit-λ load carries μ ∫ φ √γ e per direction in separable form
    let load = noise_load_2d(noise, mesh, basis, 1.0)?;
    let NoiseLoad::Tensor2 {
        gx,
        gy,
        nx_dof,
        ny_dof,
        modes,
        ..
    } = &load
    else {
        return Err(Error::Numerical("expected separable 2D load".into()));
    };
    let k1 = basis.n_modes();
    // Σ_{i,a} μ (∫φ ê)² = Σ (μ ∫φ ê)² / μ per factor, and K is the product
    // of the per-direction sums weighted by γ = scale²
    let fac_sum = |g: &[f64], mesh1: &crate::mesh::Mesh1D, f: usize, dof: usize| -> f64 {
        let row = &g[f * dof..(f + 1) * dof];
        let mut acc = 0.0;
        for (i, cell) in row.chunks_exact(k1).enumerate() {
            let h = mesh1.cell_width(i);
            for (a, &v) in cell.iter().enumerate() {
                acc += v * v * h / (2 * a + 1) as f64;
            }
        }
        acc
    };
    let mut k = 0.0;
    for &(fx, fy, scale) in modes {
        k += scale
            * scale
            * fac_sum(gx, &mesh.x, fx as usize, *nx_dof)
            * fac_sum(gy, &mesh.y, fy as usize, *ny_dof);
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::mass_inner_2d;
    use crate::mesh::{tensor_mesh_2d, uniform_mesh_1d};
    use crate::qwiener::{sine_product_noise, standard_bm, NoiseDomain};
    use rand::Rng;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
    use std::f64::consts::PI;

    fn mesh_2pi(nx: usize, ny: usize) -> Mesh2D {
        tensor_mesh_2d(
            uniform_mesh_1d(0.0, 2.0 * PI, nx, true).unwrap(),
            uniform_mesh_1d(0.0, 2.0 * PI, ny, true).unwrap(),
        )
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn directional_ops_kill_constants() {
        let mesh = mesh_2pi(5, 4);
        let basis = BasisSpec::new(2);
        for axis in [Axis::X, Axis::Y] {
            let d = assemble_directional_op(&mesh, &basis, axis, 0.5).unwrap();
            let mut x = vec![0.0; d.dof()];
            for c in 0..20 {
                x[c * 9] = 2.2;
            }
            let mut y = vec![0.0; d.dof()];
            d.apply(&x, &mut y);
            assert!(y.iter().all(|v| v.abs() < 1e-12));
        }
        assert!(assemble_directional_op(&mesh, &basis, Axis::X, 0.0).is_err());
    }

    #[test]
    fn directional_op_matches_kronecker_oracle() {
        // on separable data c = cx ⊗ cy the x-operator must act as
        // (D1d cx) ⊗ cy, the tensor form of (1D operator ⊗ identity)
        let nx = 6;
        let ny = 5;
        let k = 2;
        let mesh = mesh_2pi(nx, ny);
        let basis = BasisSpec::new(k);
        let k1 = k + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cx = random_vec(nx * k1, &mut rng);
        let cy = random_vec(ny * k1, &mut rng);

        let mut field = vec![0.0; nx * ny * k1 * k1];
        for j in 0..ny {
            for i in 0..nx {
                for b in 0..k1 {
                    for a in 0..k1 {
                        field[(i + nx * j) * k1 * k1 + a + k1 * b] =
                            cx[i * k1 + a] * cy[j * k1 + b];
                    }
                }
            }
        }

        let d2 = assemble_directional_op(&mesh, &basis, Axis::X, 0.5).unwrap();
        let mut got = vec![0.0; d2.dof()];
        d2.apply(&field, &mut got);

        let d1 = crate::dg1d::assemble_derivative_op(&mesh.x, &basis, 0.5).unwrap();
        let mut dcx = vec![0.0; nx * k1];
        d1.apply(&cx, &mut dcx);
        for j in 0..ny {
            for i in 0..nx {
                for b in 0..k1 {
                    for a in 0..k1 {
                        let want = dcx[i * k1 + a] * cy[j * k1 + b];
                        let v = got[(i + nx * j) * k1 * k1 + a + k1 * b];
                        assert!((v - want).abs() < 1e-12, "({i},{j},{a},{b})");
                    }
                }
            }
        }
    }

    #[test]
    fn directional_adjointness() {
        let mesh = mesh_2pi(4, 3);
        let basis = BasisSpec::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for axis in [Axis::X, Axis::Y] {
            let dp = assemble_directional_op(&mesh, &basis, axis, 0.5).unwrap();
            let dm = assemble_directional_op(&mesh, &basis, axis, -0.5).unwrap();
            for _ in 0..8 {
                let a = random_vec(dp.dof(), &mut rng);
                let b = random_vec(dp.dof(), &mut rng);
                let mut da = vec![0.0; dp.dof()];
                let mut db = vec![0.0; dp.dof()];
                dp.apply(&a, &mut da);
                dm.apply(&b, &mut db);
                let v = mass_inner_2d(&da, &b, &mesh, 1) + mass_inner_2d(&a, &db, &mesh, 1);
                assert!(v.abs() < 1e-12, "axis {axis:?}: {v}");
            }
        }
    }

    #[test]
    fn directional_ops_commute() {
        let mesh = mesh_2pi(4, 5);
        let basis = BasisSpec::new(2);
        let dx = assemble_directional_op(&mesh, &basis, Axis::X, 0.5).unwrap();
        let dy = assemble_directional_op(&mesh, &basis, Axis::Y, -0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = random_vec(dx.dof(), &mut rng);
        let mut t1 = vec![0.0; dx.dof()];
        let mut xy = vec![0.0; dx.dof()];
        let mut yx = vec![0.0; dx.dof()];
        dx.apply(&x, &mut t1);
        dy.apply(&t1, &mut xy);
        dy.apply(&x, &mut t1);
        dx.apply(&t1, &mut yx);
        for (a, b) in xy.iter().zip(&yx) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_row_mesh_reduces_to_1d_operator() {
        // one cell in y and y-constant data: the x-operator must agree with
        // the plain 1D operator on the x-coefficients
        let nx = 7;
        let k = 1;
        let k1 = k + 1;
        let mesh = tensor_mesh_2d(
            uniform_mesh_1d(0.0, 2.0 * PI, nx, true).unwrap(),
            uniform_mesh_1d(0.0, 1.0, 1, true).unwrap(),
        );
        let basis = BasisSpec::new(k);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cx = random_vec(nx * k1, &mut rng);
        let mut field = vec![0.0; nx * k1 * k1];
        for i in 0..nx {
            for a in 0..k1 {
                field[i * k1 * k1 + a] = cx[i * k1 + a]; // b = 0 only
            }
        }
        let d2 = assemble_directional_op(&mesh, &basis, Axis::X, 0.5).unwrap();
        let mut got = vec![0.0; d2.dof()];
        d2.apply(&field, &mut got);
        let d1 = crate::dg1d::assemble_derivative_op(&mesh.x, &basis, 0.5).unwrap();
        let mut want = vec![0.0; nx * k1];
        d1.apply(&cx, &mut want);
        for i in 0..nx {
            for a in 0..k1 {
                assert!((got[i * k1 * k1 + a] - want[i * k1 + a]).abs() < 1e-13);
                assert!(got[i * k1 * k1 + a + k1].abs() < 1e-13); // b = 1 stays zero
            }
        }
    }

    #[test]
    fn maxwell_2d_stationary_on_constants() {
        let mesh = mesh_2pi(4, 4);
        let basis = BasisSpec::new(1);
        let noise = standard_bm(NoiseDomain::Rectangle {
            ax: 0.0,
            bx: 2.0 * PI,
            ay: 0.0,
            by: 2.0 * PI,
        });
        let sys = assemble_maxwell_2d(
            &mesh,
            &basis,
            FluxParams2D::new(0.5, 0.5).unwrap(),
            0.0,
            0.0,
            &noise,
        )
        .unwrap();
        let d = sys.p_dim();
        let mut p = vec![0.0; d];
        let mut q = vec![0.0; 2 * d];
        for c in 0..16 {
            p[c * 4] = 0.3;
            q[c * 4] = -1.1;
            q[d + c * 4] = 0.9;
        }
        let mut dp = vec![0.0; d];
        let mut dq = vec![0.0; 2 * d];
        sys.a.apply(&q, &mut dp);
        sys.b.apply(&p, &mut dq);
        assert!(dp.iter().chain(dq.iter()).all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn energy_drift_identity_2d() {
        let mesh = mesh_2pi(5, 3);
        let basis = BasisSpec::new(1);
        let noise = standard_bm(NoiseDomain::Rectangle {
            ax: 0.0,
            bx: 2.0 * PI,
            ay: 0.0,
            by: 2.0 * PI,
        });
        let sys = assemble_maxwell_2d(
            &mesh,
            &basis,
            FluxParams2D::new(0.5, 0.25).unwrap(),
            1.0,
            1.0,
            &noise,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let p = random_vec(sys.p_dim(), &mut rng);
            let q = random_vec(sys.q_dim(), &mut rng);
            let mut aq = vec![0.0; sys.p_dim()];
            let mut bp = vec![0.0; sys.q_dim()];
            sys.a.apply(&q, &mut aq);
            sys.b.apply(&p, &mut bp);
            let d = sys.p_dim();
            let v = 2.0
                * (mass_inner_2d(&p, &aq, &mesh, 1)
                    + mass_inner_2d(&q[..d], &bp[..d], &mesh, 1)
                    + mass_inner_2d(&q[d..], &bp[d..], &mesh, 1));
            let scale = energy_from_state_2d(&p, &q, &mesh, 1);
            assert!(v.abs() <= 1e-12 * scale.max(1.0), "drift {v}");
        }
    }

    #[test]
    fn discrete_energy_values_2d() {
        let mesh = mesh_2pi(6, 6);
        let z = FieldCoeffs2D::zeros(6, 6, 1);
        assert_eq!(discrete_energy_2d(&z, &z, &z, &mesh).unwrap(), 0.0);

        let mut e = FieldCoeffs2D::zeros(6, 6, 1);
        for j in 0..6 {
            for i in 0..6 {
                e.set(i, j, 0, 0, 1.0);
            }
        }
        let v = discrete_energy_2d(&e, &z, &z, &mesh).unwrap();
        assert!((v - 4.0 * PI * PI).abs() < 1e-12);

        // random field against tensor quadrature
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut e = FieldCoeffs2D::zeros(3, 2, 2);
        let mesh_s = tensor_mesh_2d(
            uniform_mesh_1d(0.0, 1.0, 3, true).unwrap(),
            uniform_mesh_1d(0.0, 2.0, 2, true).unwrap(),
        );
        for v in e.data.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let z = FieldCoeffs2D::zeros(3, 2, 2);
        let got = discrete_energy_2d(&e, &z, &z, &mesh_s).unwrap();
        let want = crate::field::l2_error_2d(&e, &mesh_s, |_, _| 0.0, 8).powi(2);
        assert!((got - want).abs() < 1e-12 * want.max(1.0));

        let bad = FieldCoeffs2D::zeros(5, 6, 1);
        assert!(discrete_energy_2d(&e, &bad, &z, &mesh_s).is_err());
    }

    #[test]
    fn k_2d_standard_bm_is_area() {
        let noise = standard_bm(NoiseDomain::Rectangle {
            ax: 0.0,
            bx: 2.0 * PI,
            ay: 0.0,
            by: 2.0 * PI,
        });
        for k in 0..=2 {
            let basis = BasisSpec::new(k);
            let mesh = mesh_2pi(7, 5);
            let kv = compute_k_2d(&noise, &mesh, &basis).unwrap();
            assert!((kv - 4.0 * PI * PI).abs() < 1e-10, "k={k}: {kv}");
        }
    }

    #[test]
    fn k_2d_bound_and_refinement() {
        let noise = sine_product_noise(6);
        let tq = noise.trace();
        let mut gaps = Vec::new();
        for k in 1..=2usize {
            let basis = BasisSpec::new(k);
            for &n in &[12usize, 24, 48] {
                let mesh = tensor_mesh_2d(
                    uniform_mesh_1d(0.0, 2.0 / 3.0, n, true).unwrap(),
                    uniform_mesh_1d(0.0, 0.5, n, true).unwrap(),
                );
                let kv = compute_k_2d(&noise, &mesh, &basis).unwrap();
                let bound = ((k + 1) * (k + 1)) as f64 * tq;
                assert!(kv <= bound + 1e-12, "k={k}, N={n}: {kv} > {bound}");
                if k == 1 {
                    gaps.push((kv - tq).abs());
                }
            }
        }
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "K gaps not monotone: {gaps:?}");
        }
    }
}
