//! L² and generalized Radau projections onto the DG space.
//!
//! The Radau projection 𝒫^α matches the k interior moments of each cell,
//! ∫_{I_j} (𝒫g − g) v dx = 0 for all v ∈ P^{k-1}, and pins the remaining
//! freedom through the interface condition
//!
//!   ({𝒫g} + α[𝒫g])_{j+1/2} = g(x_{j+1/2})  at every interface.
//!
//! With orthogonal Legendre modes the moment conditions fix coefficients
//! 0..k−1 to their L² values, and the interface conditions become a cyclic
//! bidiagonal system in the single top coefficient per cell. For α = ±1/2
//! that system decouples cell-locally; general α is solved by a closed
//! shooting pass run in whichever direction keeps the recursion contractive.
//!
//! The 2D operators are tensor products ℙ^{α,β} = 𝒫^α_x ⊗ 𝒫^β_y applied
//! dimension by dimension.

use crate::basis::{eval_legendre, gauss_rule, BasisSpec};
use crate::error::{Error, Result};
use crate::field::{FieldCoeffs, FieldCoeffs2D};
use crate::mesh::{Mesh1D, Mesh2D};

/// Quadrature points per cell for non-polynomial moment integrals.
const PROJ_QUAD_PTS: usize = 12;

/// Projection kind per direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectionSpec {
    /// Cell-local orthogonal projection.
    L2,
    /// Generalized Radau projection with nonzero interface weight α.
    Radau { alpha: f64 },
}

impl ProjectionSpec {
    pub fn radau(alpha: f64) -> Result<Self> {
        if alpha == 0.0 || !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArg(format!(
                "Radau projection needs nonzero α in [-1, 1], got {alpha}"
            )));
        }
        Ok(ProjectionSpec::Radau { alpha })
    }
}

/// Per-cell raw data the 1D projection consumes: moment integrals
/// r_j^l = ∫_{I_j} g φ_j^l dx for l = 0..k, and interface values
/// g(x_{j+1/2}) for j = 0..N−1 (periodic).
pub(crate) struct ProjectionData {
    pub moments: Vec<f64>,
    pub interface: Vec<f64>,
}

pub(crate) fn projection_data_1d<F: Fn(f64) -> f64>(
    g: &F,
    mesh: &Mesh1D,
    basis: &BasisSpec,
) -> ProjectionData {
    let k1 = basis.n_modes();
    let n = mesh.n_cells();
    let rule = gauss_rule(PROJ_QUAD_PTS.max(k1 + 2));
    let mut moments = vec![0.0; n * k1];
    for j in 0..n {
        let h = mesh.cell_width(j);
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let gv = g(mesh.to_physical(j, xi)) * w * h / 2.0;
            for l in 0..k1 {
                moments[j * k1 + l] += gv * eval_legendre(l, xi);
            }
        }
    }
    let interface = (0..n).map(|j| g(mesh.right_face(j))).collect();
    ProjectionData { moments, interface }
}

/// Solve the periodic cyclic bidiagonal system a c_j + b c_{j+1} = ρ_j.
///
/// The recursion is run forward when |a| ≤ |b| and backward otherwise so the
/// homogeneous multiplier stays contractive; the closure condition then
/// determines the starting value.
fn solve_cyclic_bidiagonal(a: f64, b: f64, rho: &[f64]) -> Result<Vec<f64>> {
    let n = rho.len();
    let mut c = vec![0.0; n];
    if b == 0.0 && a == 0.0 {
        return Err(Error::Singular("degenerate interface condition".into()));
    }
    if n == 1 {
        let denom = a + b;
        if denom.abs() < 1e-14 * (a.abs() + b.abs()) {
            return Err(Error::Singular(
                "single-cell interface condition is singular".into(),
            ));
        }
        c[0] = rho[0] / denom;
        return Ok(c);
    }
    if a.abs() <= b.abs() {
        // c_{j+1} = (ρ_j − a c_j)/b ; c_j = A_j + B_j c_0
        let mut acap = vec![0.0; n + 1];
        let mut bcap = vec![0.0; n + 1];
        acap[0] = 0.0;
        bcap[0] = 1.0;
        for j in 0..n {
            acap[j + 1] = (rho[j] - a * acap[j]) / b;
            bcap[j + 1] = -a / b * bcap[j];
        }
        let denom = 1.0 - bcap[n];
        if denom.abs() < 1e-12 {
            return Err(Error::Singular(format!(
                "periodic Radau system is singular (closure factor {})",
                bcap[n]
            )));
        }
        c[0] = acap[n] / denom;
        for j in 0..n - 1 {
            c[j + 1] = acap[j + 1] + bcap[j + 1] * c[0];
        }
    } else {
        // c_j = (ρ_j − b c_{j+1})/a, marching down from c_{n-1}
        let mut acap = vec![0.0; n + 1];
        let mut bcap = vec![0.0; n + 1];
        // represent c_j = A_j + B_j c_{n-1}; start at j = n−1
        acap[n - 1] = 0.0;
        bcap[n - 1] = 1.0;
        for j in (0..n - 1).rev() {
            acap[j] = (rho[j] - b * acap[j + 1]) / a;
            bcap[j] = -b / a * bcap[j + 1];
        }
        // closing equation couples cell n−1 to cell 0: a c_{n-1} + b c_0 = ρ_{n-1}
        let denom = a + b * bcap[0];
        if denom.abs() < 1e-12 {
            return Err(Error::Singular(
                "periodic Radau system is singular".into(),
            ));
        }
        let c_last = (rho[n - 1] - b * acap[0]) / denom;
        for j in 0..n - 1 {
            c[j] = acap[j] + bcap[j] * c_last;
        }
        c[n - 1] = c_last;
    }
    Ok(c)
}

/// 1D projection from precomputed moments and interface values.
pub(crate) fn project_1d_from_data(
    data: &ProjectionData,
    mesh: &Mesh1D,
    basis: &BasisSpec,
    spec: &ProjectionSpec,
) -> Result<FieldCoeffs> {
    let k = basis.degree();
    let k1 = k + 1;
    let n = mesh.n_cells();
    let mut f = FieldCoeffs::zeros(n, k);
    // moment conditions: modal coefficients are mass-inverted raw moments
    let upto = match spec {
        ProjectionSpec::L2 => k1,
        ProjectionSpec::Radau { .. } => k,
    };
    for j in 0..n {
        let h = mesh.cell_width(j);
        for l in 0..upto {
            f.set(j, l, data.moments[j * k1 + l] * (2 * l + 1) as f64 / h);
        }
    }
    let ProjectionSpec::Radau { alpha } = *spec else {
        return Ok(f);
    };
    if alpha == 0.0 {
        return Err(Error::InvalidArg("Radau projection needs α ≠ 0".into()));
    }
    // interface condition at x_{j+1/2}:
    //   (1/2−α) Σ_l c_j^l + (1/2+α) Σ_l (−1)^l c_{j+1}^l = g(x_{j+1/2})
    // with the l < k sums known, leaving a c_j^k + b c_{j+1}^k = ρ_j
    let a = 0.5 - alpha;
    let b = (0.5 + alpha) * if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut rho = vec![0.0; n];
    for j in 0..n {
        let jp = mesh.right_neighbor(j);
        let mut left_sum = 0.0; // trace of the known part from cell j
        let mut right_sum = 0.0; // trace of the known part from cell j+1
        for l in 0..k {
            left_sum += f.get(j, l);
            right_sum += f.get(jp, l) * if l % 2 == 0 { 1.0 } else { -1.0 };
        }
        rho[j] = data.interface[j] - (0.5 - alpha) * left_sum - (0.5 + alpha) * right_sum;
    }
    let top = solve_cyclic_bidiagonal(a, b, &rho)?;
    for (j, &c) in top.iter().enumerate() {
        f.set(j, k, c);
    }
    Ok(f)
}

/// Project a scalar function onto the 1D DG space.
pub fn project_1d<F: Fn(f64) -> f64>(
    g: F,
    mesh: &Mesh1D,
    basis: &BasisSpec,
    spec: &ProjectionSpec,
) -> Result<FieldCoeffs> {
    let data = projection_data_1d(&g, mesh, basis);
    project_1d_from_data(&data, mesh, basis, spec)
}

/// Re-project a DG field. Moments are taken from the coefficients exactly;
/// for a Radau target the interface data is the field's own α-weighted flux
/// trace ({f} + α[f]), which makes the operator idempotent on V_h.
pub fn project_field_1d(
    field: &FieldCoeffs,
    mesh: &Mesh1D,
    basis: &BasisSpec,
    spec: &ProjectionSpec,
) -> Result<FieldCoeffs> {
    if field.n_cells() != mesh.n_cells() || field.degree() != basis.degree() {
        return Err(Error::Dimension("field does not match mesh/basis".into()));
    }
    let k1 = basis.n_modes();
    let n = mesh.n_cells();
    let mut moments = vec![0.0; n * k1];
    for j in 0..n {
        let h = mesh.cell_width(j);
        for l in 0..k1 {
            moments[j * k1 + l] = field.get(j, l) * h / (2 * l + 1) as f64;
        }
    }
    let alpha = match spec {
        ProjectionSpec::L2 => 0.0,
        ProjectionSpec::Radau { alpha } => *alpha,
    };
    let interface = (0..n)
        .map(|j| {
            let vp = field.trace_left(mesh.right_neighbor(j));
            let vm = field.trace_right(j);
            0.5 * (vp + vm) + alpha * (vp - vm)
        })
        .collect();
    project_1d_from_data(&ProjectionData { moments, interface }, mesh, basis, spec)
}

/// Project a scalar function onto the 2D tensor DG space by applying the
/// x-direction projection along lines of constant y, then the y-direction
/// projection to each x-mode.
pub fn project_2d<F: Fn(f64, f64) -> f64>(
    g: F,
    mesh: &Mesh2D,
    basis: &BasisSpec,
    spec_x: &ProjectionSpec,
    spec_y: &ProjectionSpec,
) -> Result<FieldCoeffs2D> {
    let k = basis.degree();
    let k1 = k + 1;
    let nx = mesh.nx();
    let ny = mesh.ny();
    let rule = gauss_rule(PROJ_QUAD_PTS.max(k1 + 2));
    let nq = rule.len();

    // x-projections at every y-sample needed by the y-direction pass:
    // nq quadrature lines per y-cell plus one line per y-interface
    let mut quad_lines = vec![0.0; ny * nq * nx * k1];
    let mut face_lines = vec![0.0; ny * nx * k1];
    for jy in 0..ny {
        for (qy, &eta) in rule.nodes.iter().enumerate() {
            let y = mesh.y.to_physical(jy, eta);
            let fx = project_1d(|x| g(x, y), &mesh.x, basis, spec_x)?;
            quad_lines[(jy * nq + qy) * nx * k1..(jy * nq + qy + 1) * nx * k1]
                .copy_from_slice(&fx.data);
        }
        let y = mesh.y.right_face(jy);
        let fx = project_1d(|x| g(x, y), &mesh.x, basis, spec_x)?;
        face_lines[jy * nx * k1..(jy + 1) * nx * k1].copy_from_slice(&fx.data);
    }

    // y-projection of each x-dof line
    let mut out = FieldCoeffs2D::zeros(nx, ny, k);
    let mut moments = vec![0.0; ny * k1];
    let mut interface = vec![0.0; ny];
    for i in 0..nx {
        for a in 0..k1 {
            let col = i * k1 + a;
            for jy in 0..ny {
                let hy = mesh.y.cell_width(jy);
                for l in 0..k1 {
                    let mut acc = 0.0;
                    for (qy, (&eta, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                        acc += w * quad_lines[(jy * nq + qy) * nx * k1 + col] * eval_legendre(l, eta);
                    }
                    moments[jy * k1 + l] = acc * hy / 2.0;
                }
                interface[jy] = face_lines[jy * nx * k1 + col];
            }
            let data = ProjectionData {
                moments: moments.clone(),
                interface: interface.clone(),
            };
            let cy = project_1d_from_data(&data, &mesh.y, basis, spec_y)?;
            for jy in 0..ny {
                for b in 0..k1 {
                    out.set(i, jy, a, b, cy.get(jy, b));
                }
            }
        }
    }
    Ok(out)
}
