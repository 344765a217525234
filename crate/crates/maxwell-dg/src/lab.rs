//! Experiment drivers: convergence tables against the exact solutions,
//! averaged-energy growth with least-squares slopes, temporal strong-order
//! studies against the Taylor reference, and the colored-noise showcase.
//!
//! Table runs use a single Brownian path generated on the finest time grid
//! and aggregated to the coarser grids, so every resolution sees the same
//! realization. Monte Carlo studies distribute sample paths over a worker
//! pool; each path owns its seeded stream and results are reduced in fixed
//! path order, making outputs independent of the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::dg1d::{assemble_maxwell_1d, compute_k_1d, energy_from_state_1d};
use crate::dg2d::{
    assemble_maxwell_2d, compute_k_2d, energy_from_state_2d, FluxParams2D,
};
use crate::error::{Error, Result};
use crate::field::{l2_error_1d, l2_error_2d, FieldCoeffs, FieldCoeffs2D};
use crate::mesh::{tensor_mesh_2d, uniform_mesh_1d, Mesh1D, Mesh2D};
use crate::projections::{project_1d, project_2d, ProjectionSpec};
use crate::qwiener::{
    sine_noise_1d, sine_product_noise, standard_bm, NoiseDomain, NoiseIncrement, PathSampler,
    SpectralNoiseModel,
};
use crate::sympint::{
    aggregate_increments, integrate, integrate_recorded, step_in_place, PQState, StepperKind,
    Workspace,
};
use crate::system::DriftSystem;

/// Which model an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    OneD,
    TwoD,
}

/// Noise families the drivers know how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    StandardBm,
    Sine1d,
    SineProduct,
}

/// Stepper selection by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepperName {
    SymplecticEuler,
    Prk2,
    Taylor2,
}

impl From<StepperName> for StepperKind {
    fn from(s: StepperName) -> Self {
        match s {
            StepperName::SymplecticEuler => StepperKind::SymplecticEuler,
            StepperName::Prk2 => StepperKind::Prk2,
            StepperName::Taylor2 => StepperKind::Taylor2Ref,
        }
    }
}

/// Initial-data projection choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitProjection {
    /// The flux-matched generalized Radau projections.
    Radau,
    /// Plain L² projection of all fields.
    L2,
}

/// Flat experiment configuration; every driver reads the fields it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub k: usize,
    /// Flux parameter α (the x-direction α₁ in 2D).
    pub alpha: f64,
    /// y-direction flux parameter α₂ (2D only).
    pub alpha2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub noise: NoiseKind,
    /// Truncation for the sine families (modes per direction in 2D).
    pub noise_modes: u32,
    /// Mesh refinement sizes; single-resolution studies use the first.
    pub nx: Vec<usize>,
    /// y-cell counts; empty means "same as nx".
    pub ny: Vec<usize>,
    /// Explicit step count; overrides nt_ratio when set.
    pub nt: Option<usize>,
    /// Steps per x-cell: Nt = ratio · Nx.
    pub nt_ratio: Option<f64>,
    pub t_final: f64,
    pub stepper: StepperName,
    pub init_projection: InitProjection,
    pub samples: usize,
    pub seed: u64,
    /// Temporal-order study: number of τ levels (τ halves per level).
    pub tau_levels: usize,
    /// Temporal-order study: coarsest τ.
    pub tau_base: f64,
    /// Showcase noise amplitudes λ₁ = λ₂ = λ.
    pub lambdas: Vec<f64>,
    /// Showcase output grid.
    pub grid_nx: usize,
    pub grid_ny: usize,
    /// Cap on recorded energy samples per series.
    pub record_cap: usize,
    pub out_dir: String,
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::OneD,
            k: 1,
            alpha: 0.5,
            alpha2: 0.5,
            lambda1: 1.0,
            lambda2: 1.0,
            noise: NoiseKind::StandardBm,
            noise_modes: 50,
            nx: vec![20, 40, 80, 160],
            ny: Vec::new(),
            nt: None,
            nt_ratio: Some(30.0),
            t_final: 3.0,
            stepper: StepperName::Prk2,
            init_projection: InitProjection::Radau,
            samples: 1000,
            seed: 3,
            tau_levels: 5,
            tau_base: 0.0625,
            lambdas: vec![0.1, 0.2, 0.3, 0.5, 0.7, 1.0],
            grid_nx: 120,
            grid_ny: 90,
            record_cap: 4000,
            out_dir: "out".into(),
            threads: 0,
        }
    }
}

impl ExperimentConfig {
    fn steps_for(&self, nx: usize) -> Result<usize> {
        if let Some(nt) = self.nt {
            if nt == 0 {
                return Err(Error::Config("nt must be positive".into()));
            }
            return Ok(nt);
        }
        if let Some(r) = self.nt_ratio {
            let nt = (r * nx as f64).round() as usize;
            if nt == 0 {
                return Err(Error::Config("nt_ratio yields zero steps".into()));
            }
            return Ok(nt);
        }
        Err(Error::Config("either nt or nt_ratio must be set".into()))
    }

    fn ny_for(&self, idx: usize) -> usize {
        if self.ny.is_empty() {
            self.nx[idx]
        } else {
            self.ny[idx.min(self.ny.len() - 1)]
        }
    }

    fn noise_1d(&self, a: f64, b: f64) -> Result<SpectralNoiseModel> {
        match self.noise {
            NoiseKind::StandardBm => Ok(standard_bm(NoiseDomain::Interval { a, b })),
            NoiseKind::Sine1d => Ok(sine_noise_1d(a, b, self.noise_modes, |m| {
                (m as f64).powi(-3)
            })),
            NoiseKind::SineProduct => Err(Error::Config(
                "sine-product noise lives on a 2D rectangle".into(),
            )),
        }
    }

    fn noise_2d(&self, mesh: &Mesh2D) -> Result<SpectralNoiseModel> {
        match self.noise {
            NoiseKind::StandardBm => Ok(standard_bm(NoiseDomain::Rectangle {
                ax: mesh.x.a(),
                bx: mesh.x.b(),
                ay: mesh.y.a(),
                by: mesh.y.b(),
            })),
            NoiseKind::SineProduct => Ok(sine_product_noise(self.noise_modes)),
            NoiseKind::Sine1d => Err(Error::Config("sine-1d noise lives on an interval".into())),
        }
    }
}

/// Exact 1D solution driven by the scalar Brownian value B_t
/// (standard Brownian noise, λ₁ = λ₂ = 1).
pub fn exact_solution_1d(t: f64, x: f64, b_t: f64) -> (f64, f64) {
    let eta = (x - t).sin() + (x + t).cos() - b_t;
    let u = (x - t).sin() - (x + t).cos() + b_t;
    (eta, u)
}

/// Exact 2D solution (E, S, T) driven by the scalar Brownian value B_t.
pub fn exact_solution_2d(t: f64, x: f64, y: f64, b_t: f64) -> (f64, f64, f64) {
    let e = (x + t).sin() - (y + t).cos() - b_t;
    let s = (y + t).cos() + b_t;
    let t_field = (x + t).sin() + b_t;
    (e, s, t_field)
}

/// Ordinary least squares fit y ≈ slope·x + intercept.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArg(
            "slope fit needs at least two points".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArg("degenerate abscissae in slope fit".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// One row of a convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    /// L² errors per field (1D: u, η; 2D: E, S, T).
    pub errors: Vec<f64>,
    /// Observed orders vs the previous row (0 on the first row).
    pub orders: Vec<f64>,
}

fn fill_orders(rows: &mut [ConvergenceRow], h_of_row: &[f64]) {
    for r in 1..rows.len() {
        let ratio = (h_of_row[r - 1] / h_of_row[r]).ln();
        let orders: Vec<f64> = rows[r - 1]
            .errors
            .iter()
            .zip(&rows[r].errors)
            .map(|(&ec, &ef)| (ec / ef).ln() / ratio)
            .collect();
        rows[r].orders = orders;
    }
}

/// Brownian increments of one path on the finest table grid.
fn fine_path(cfg: &ExperimentConfig, n_modes: usize, nt_fine: usize, tau: f64) -> Vec<NoiseIncrement> {
    let mut sampler = PathSampler::new(cfg.seed, 0, n_modes);
    (0..nt_fine).map(|_| sampler.sample(tau, true)).collect()
}

/// 1D accuracy table against the exact solution; all resolutions share one
/// Brownian path (fine-generated, coarse-aggregated increments).
pub fn convergence_study_1d(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    let deterministic = cfg.lambda1 == 0.0 && cfg.lambda2 == 0.0;
    if !deterministic
        && (cfg.noise != NoiseKind::StandardBm || cfg.lambda1 != 1.0 || cfg.lambda2 != 1.0)
    {
        return Err(Error::Config(
            "the 1D exact solution needs standard Brownian noise with λ₁ = λ₂ = 1 (or 0)".into(),
        ));
    }
    if cfg.nx.is_empty() {
        return Err(Error::Config("empty mesh list".into()));
    }
    let basis = BasisSpec::new(cfg.k);
    let two_pi = 2.0 * std::f64::consts::PI;
    let nt_fine = cfg.steps_for(*cfg.nx.last().unwrap())?;
    let tau_fine = cfg.t_final / nt_fine as f64;
    let fine = fine_path(cfg, 1, nt_fine, tau_fine);
    let b_t: f64 = fine.iter().map(|i| i.db[0]).sum::<f64>() * if deterministic { 0.0 } else { 1.0 };

    let mut rows = Vec::new();
    let mut hs = Vec::new();
    for (r, &nx) in cfg.nx.iter().enumerate() {
        let nt = cfg.steps_for(nx)?;
        if nt_fine % nt != 0 {
            return Err(Error::Config(format!(
                "step count {nt} does not divide the finest count {nt_fine}"
            )));
        }
        let incs = aggregate_increments(&fine, nt_fine / nt)?;
        let mesh = uniform_mesh_1d(0.0, two_pi, nx, true)?;
        let noise = cfg.noise_1d(0.0, two_pi)?;
        let sys = assemble_maxwell_1d(&mesh, &basis, cfg.alpha, cfg.lambda1, cfg.lambda2, &noise)?;
        let (spec_eta, spec_u) = match cfg.init_projection {
            InitProjection::Radau => (
                ProjectionSpec::radau(-cfg.alpha)?,
                ProjectionSpec::radau(cfg.alpha)?,
            ),
            InitProjection::L2 => (ProjectionSpec::L2, ProjectionSpec::L2),
        };
        let eta0 = project_1d(|x| exact_solution_1d(0.0, x, 0.0).0, &mesh, &basis, &spec_eta)?;
        let u0 = project_1d(|x| exact_solution_1d(0.0, x, 0.0).1, &mesh, &basis, &spec_u)?;
        let state0 = PQState::new(eta0.data, u0.data);
        let state = integrate_recorded(&state0, &sys, cfg.stepper.into(), &incs)?;
        let t = cfg.t_final;
        let eta_h = FieldCoeffs::from_data(state.p, nx, cfg.k)?;
        let u_h = FieldCoeffs::from_data(state.q, nx, cfg.k)?;
        let err_u = l2_error_1d(&u_h, &mesh, |x| exact_solution_1d(t, x, b_t).1, cfg.k + 9);
        let err_eta = l2_error_1d(&eta_h, &mesh, |x| exact_solution_1d(t, x, b_t).0, cfg.k + 9);
        rows.push(ConvergenceRow {
            nx,
            ny: 1,
            nt,
            errors: vec![err_u, err_eta],
            orders: vec![0.0; 2],
        });
        hs.push(two_pi / nx as f64);
        let _ = r;
    }
    fill_orders(&mut rows, &hs);
    Ok(rows)
}

/// Initial projections of the 2D fields per the error analysis:
/// E ← ℙ^{−α₁,α₂}, S ← ℙ_y^{−α₂} (L² in x), T ← ℙ_x^{α₁} (L² in y).
fn project_initial_2d(
    cfg: &ExperimentConfig,
    mesh: &Mesh2D,
    basis: &BasisSpec,
    e0: impl Fn(f64, f64) -> f64,
    s0: impl Fn(f64, f64) -> f64,
    t0: impl Fn(f64, f64) -> f64,
) -> Result<(FieldCoeffs2D, FieldCoeffs2D, FieldCoeffs2D)> {
    match cfg.init_projection {
        InitProjection::Radau => {
            let e = project_2d(
                e0,
                mesh,
                basis,
                &ProjectionSpec::radau(-cfg.alpha)?,
                &ProjectionSpec::radau(cfg.alpha2)?,
            )?;
            let s = project_2d(
                s0,
                mesh,
                basis,
                &ProjectionSpec::L2,
                &ProjectionSpec::radau(-cfg.alpha2)?,
            )?;
            let t = project_2d(
                t0,
                mesh,
                basis,
                &ProjectionSpec::radau(cfg.alpha)?,
                &ProjectionSpec::L2,
            )?;
            Ok((e, s, t))
        }
        InitProjection::L2 => {
            let l2 = ProjectionSpec::L2;
            Ok((
                project_2d(e0, mesh, basis, &l2, &l2)?,
                project_2d(s0, mesh, basis, &l2, &l2)?,
                project_2d(t0, mesh, basis, &l2, &l2)?,
            ))
        }
    }
}

/// 2D accuracy table against the exact solution on [0, 2π]².
pub fn convergence_study_2d(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    let deterministic = cfg.lambda1 == 0.0 && cfg.lambda2 == 0.0;
    if !deterministic
        && (cfg.noise != NoiseKind::StandardBm || cfg.lambda1 != 1.0 || cfg.lambda2 != 1.0)
    {
        return Err(Error::Config(
            "the 2D exact solution needs standard Brownian noise with λ₁ = λ₂ = 1 (or 0)".into(),
        ));
    }
    if cfg.nx.is_empty() {
        return Err(Error::Config("empty mesh list".into()));
    }
    let basis = BasisSpec::new(cfg.k);
    let two_pi = 2.0 * std::f64::consts::PI;
    let nt_fine = cfg.steps_for(*cfg.nx.last().unwrap())?;
    let tau_fine = cfg.t_final / nt_fine as f64;
    let fine = fine_path(cfg, 1, nt_fine, tau_fine);
    let b_t: f64 = fine.iter().map(|i| i.db[0]).sum::<f64>() * if deterministic { 0.0 } else { 1.0 };

    let mut rows = Vec::new();
    let mut hs = Vec::new();
    for (r, &nx) in cfg.nx.iter().enumerate() {
        let ny = cfg.ny_for(r);
        let nt = cfg.steps_for(nx)?;
        if nt_fine % nt != 0 {
            return Err(Error::Config(format!(
                "step count {nt} does not divide the finest count {nt_fine}"
            )));
        }
        let incs = aggregate_increments(&fine, nt_fine / nt)?;
        let mesh = tensor_mesh_2d(
            uniform_mesh_1d(0.0, two_pi, nx, true)?,
            uniform_mesh_1d(0.0, two_pi, ny, true)?,
        );
        let noise = cfg.noise_2d(&mesh)?;
        let sys = assemble_maxwell_2d(
            &mesh,
            &basis,
            FluxParams2D::new(cfg.alpha, cfg.alpha2)?,
            cfg.lambda1,
            cfg.lambda2,
            &noise,
        )?;
        let (e0, s0, t0) = project_initial_2d(
            cfg,
            &mesh,
            &basis,
            |x, y| exact_solution_2d(0.0, x, y, 0.0).0,
            |x, y| exact_solution_2d(0.0, x, y, 0.0).1,
            |x, y| exact_solution_2d(0.0, x, y, 0.0).2,
        )?;
        let dof = e0.data.len();
        let mut q0 = s0.data.clone();
        q0.extend_from_slice(&t0.data);
        let state0 = PQState::new(e0.data, q0);
        let state = integrate_recorded(&state0, &sys, cfg.stepper.into(), &incs)?;
        let t = cfg.t_final;
        let e_h = FieldCoeffs2D::from_data(state.p, nx, ny, cfg.k)?;
        let s_h = FieldCoeffs2D::from_data(state.q[..dof].to_vec(), nx, ny, cfg.k)?;
        let t_h = FieldCoeffs2D::from_data(state.q[dof..].to_vec(), nx, ny, cfg.k)?;
        let nq = cfg.k + 7;
        let err_e = l2_error_2d(&e_h, &mesh, |x, y| exact_solution_2d(t, x, y, b_t).0, nq);
        let err_s = l2_error_2d(&s_h, &mesh, |x, y| exact_solution_2d(t, x, y, b_t).1, nq);
        let err_t = l2_error_2d(&t_h, &mesh, |x, y| exact_solution_2d(t, x, y, b_t).2, nq);
        rows.push(ConvergenceRow {
            nx,
            ny,
            nt,
            errors: vec![err_e, err_s, err_t],
            orders: vec![0.0; 3],
        });
        hs.push(two_pi / nx as f64);
    }
    fill_orders(&mut rows, &hs);
    Ok(rows)
}

/// Averaged discrete energy over sample paths with a least-squares slope.
#[derive(Debug, Clone, Serialize)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    pub mean_energy: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: usize,
    pub slope: f64,
    pub intercept: f64,
    /// (λ₁² + λ₂²)K in 1D, (λ₁² + 2λ₂²)K in 2D.
    pub theory_slope: f64,
}

fn reduce_energy_series(
    per_path: Vec<Vec<f64>>,
    times: Vec<f64>,
    theory_slope: f64,
) -> Result<EnergySeries> {
    let n = per_path.len();
    let len = times.len();
    let mut sum = vec![0.0; len];
    let mut sumsq = vec![0.0; len];
    // fixed reduction order: ascending path index
    for path in &per_path {
        for (i, &e) in path.iter().enumerate() {
            sum[i] += e;
            sumsq[i] += e * e;
        }
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / n as f64).collect();
    let stderr: Vec<f64> = sumsq
        .iter()
        .zip(&mean)
        .map(|(&sq, &m)| {
            if n > 1 {
                ((sq / n as f64 - m * m).max(0.0) / (n as f64 - 1.0)).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let (slope, intercept) = fit_slope(&times, &mean)?;
    Ok(EnergySeries {
        times,
        mean_energy: mean,
        stderr,
        n_samples: n,
        slope,
        intercept,
        theory_slope,
    })
}

fn record_stride(nt: usize, cap: usize) -> usize {
    nt.div_ceil(cap).max(1)
}

/// 1D averaged-energy growth; theoretical slope (λ₁² + λ₂²)K.
pub fn energy_growth_study_1d(cfg: &ExperimentConfig) -> Result<EnergySeries> {
    if cfg.samples == 0 {
        return Err(Error::Config("energy study needs at least one sample".into()));
    }
    let nx = *cfg.nx.first().ok_or_else(|| Error::Config("empty mesh list".into()))?;
    let nt = cfg.steps_for(nx)?;
    let tau = cfg.t_final / nt as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let basis = BasisSpec::new(cfg.k);
    let mesh = uniform_mesh_1d(0.0, two_pi, nx, true)?;
    let noise = cfg.noise_1d(0.0, two_pi)?;
    let sys = assemble_maxwell_1d(&mesh, &basis, cfg.alpha, cfg.lambda1, cfg.lambda2, &noise)?;
    let stepper: StepperKind = cfg.stepper.into();

    let (spec_eta, spec_u) = match cfg.init_projection {
        InitProjection::Radau => (
            ProjectionSpec::radau(-cfg.alpha)?,
            ProjectionSpec::radau(cfg.alpha)?,
        ),
        InitProjection::L2 => (ProjectionSpec::L2, ProjectionSpec::L2),
    };
    let eta0 = project_1d(|x| exact_solution_1d(0.0, x, 0.0).0, &mesh, &basis, &spec_eta)?;
    let u0 = project_1d(|x| exact_solution_1d(0.0, x, 0.0).1, &mesh, &basis, &spec_u)?;
    let state0 = PQState::new(eta0.data, u0.data);

    let stride = record_stride(nt, cfg.record_cap);
    let times: Vec<f64> = std::iter::once(0.0)
        .chain((1..=nt).filter(|s| s % stride == 0 || *s == nt).map(|s| s as f64 * tau))
        .collect();

    let per_path: Vec<Vec<f64>> = (0..cfg.samples)
        .into_par_iter()
        .map(|path| {
            let mut sampler = PathSampler::new(cfg.seed, path as u64, sys.n_modes());
            let mut series = Vec::with_capacity(times.len());
            integrate(&state0, &sys, tau, nt, stepper, &mut sampler, |step, st| {
                if step == 0 || step % stride == 0 || step == nt {
                    series.push(energy_from_state_1d(&st.p, &st.q, &mesh, cfg.k));
                }
            })
            .map(|_| series)
        })
        .collect::<Result<_>>()?;

    let k_const = compute_k_1d(&noise, &mesh, &basis);
    let theory = (cfg.lambda1 * cfg.lambda1 + cfg.lambda2 * cfg.lambda2) * k_const;
    reduce_energy_series(per_path, times, theory)
}

/// 2D averaged-energy growth on [0, 2π]²; theoretical slope (λ₁² + 2λ₂²)K.
pub fn energy_growth_study_2d(cfg: &ExperimentConfig) -> Result<EnergySeries> {
    if cfg.samples == 0 {
        return Err(Error::Config("energy study needs at least one sample".into()));
    }
    let nx = *cfg.nx.first().ok_or_else(|| Error::Config("empty mesh list".into()))?;
    let ny = cfg.ny_for(0);
    let nt = cfg.steps_for(nx)?;
    let tau = cfg.t_final / nt as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let basis = BasisSpec::new(cfg.k);
    let mesh = tensor_mesh_2d(
        uniform_mesh_1d(0.0, two_pi, nx, true)?,
        uniform_mesh_1d(0.0, two_pi, ny, true)?,
    );
    let noise = cfg.noise_2d(&mesh)?;
    let sys = assemble_maxwell_2d(
        &mesh,
        &basis,
        FluxParams2D::new(cfg.alpha, cfg.alpha2)?,
        cfg.lambda1,
        cfg.lambda2,
        &noise,
    )?;
    let stepper: StepperKind = cfg.stepper.into();

    let (e0, s0, t0) = project_initial_2d(
        cfg,
        &mesh,
        &basis,
        |x, y| exact_solution_2d(0.0, x, y, 0.0).0,
        |x, y| exact_solution_2d(0.0, x, y, 0.0).1,
        |x, y| exact_solution_2d(0.0, x, y, 0.0).2,
    )?;
    let mut q0 = s0.data.clone();
    q0.extend_from_slice(&t0.data);
    let state0 = PQState::new(e0.data, q0);

    let stride = record_stride(nt, cfg.record_cap);
    let times: Vec<f64> = std::iter::once(0.0)
        .chain((1..=nt).filter(|s| s % stride == 0 || *s == nt).map(|s| s as f64 * tau))
        .collect();

    let per_path: Vec<Vec<f64>> = (0..cfg.samples)
        .into_par_iter()
        .map(|path| {
            let mut sampler = PathSampler::new(cfg.seed, path as u64, sys.n_modes());
            let mut series = Vec::with_capacity(times.len());
            integrate(&state0, &sys, tau, nt, stepper, &mut sampler, |step, st| {
                if step == 0 || step % stride == 0 || step == nt {
                    series.push(energy_from_state_2d(&st.p, &st.q, &mesh, cfg.k));
                }
            })
            .map(|_| series)
        })
        .collect::<Result<_>>()?;

    let k_const = compute_k_2d(&noise, &mesh, &basis)?;
    let theory =
        (cfg.lambda1 * cfg.lambda1 + 2.0 * cfg.lambda2 * cfg.lambda2) * k_const;
    reduce_energy_series(per_path, times, theory)
}

/// Result of a temporal strong-order study.
#[derive(Debug, Clone, Serialize)]
pub struct TemporalOrder {
    pub taus: Vec<f64>,
    pub rms_errors: Vec<f64>,
    pub slope: f64,
}

/// Mean-square temporal order of the configured stepper on the 1D system,
/// measured against the Taylor reference at 8× finer steps over coupled
/// Brownian paths.
pub fn temporal_order_study(cfg: &ExperimentConfig) -> Result<TemporalOrder> {
    if cfg.samples < 2 {
        return Err(Error::Config(
            "temporal order study needs several sample paths".into(),
        ));
    }
    if cfg.tau_levels < 2 {
        return Err(Error::Config("need at least two τ levels".into()));
    }
    let nx = *cfg.nx.first().ok_or_else(|| Error::Config("empty mesh list".into()))?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let basis = BasisSpec::new(cfg.k);
    let mesh = uniform_mesh_1d(0.0, two_pi, nx, true)?;
    let noise = cfg.noise_1d(0.0, two_pi)?;
    let sys = assemble_maxwell_1d(&mesh, &basis, cfg.alpha, cfg.lambda1, cfg.lambda2, &noise)?;
    let stepper: StepperKind = cfg.stepper.into();

    let base_steps = (cfg.t_final / cfg.tau_base).round() as usize;
    if base_steps == 0 || (cfg.t_final - base_steps as f64 * cfg.tau_base).abs() > 1e-9 {
        return Err(Error::Config(
            "t_final must be an integer multiple of tau_base".into(),
        ));
    }
    // finest scheme τ is tau_base/2^{L-1}; the reference runs 8× finer still
    let fine_factor = 8 * (1 << (cfg.tau_levels - 1));
    let n_fine = base_steps * fine_factor;
    let delta = cfg.t_final / n_fine as f64;

    let eta0 = project_1d(|x| exact_solution_1d(0.0, x, 0.0).0, &mesh, &basis, &ProjectionSpec::L2)?;
    let u0 = project_1d(|x| exact_solution_1d(0.0, x, 0.0).1, &mesh, &basis, &ProjectionSpec::L2)?;
    let state0 = PQState::new(eta0.data, u0.data);

    let errs: Vec<Vec<f64>> = (0..cfg.samples)
        .into_par_iter()
        .map(|path| -> Result<Vec<f64>> {
            let mut sampler = PathSampler::new(cfg.seed, path as u64, sys.n_modes());
            let fine: Vec<NoiseIncrement> =
                (0..n_fine).map(|_| sampler.sample(delta, true)).collect();
            let mut per_level = Vec::with_capacity(cfg.tau_levels);
            for lvl in 0..cfg.tau_levels {
                let scheme_factor = fine_factor >> lvl; // τ_lvl / δ
                let scheme_incs = aggregate_increments(&fine, scheme_factor)?;
                let ref_incs = aggregate_increments(&fine, scheme_factor / 8)?;
                let a = integrate_recorded(&state0, &sys, stepper, &scheme_incs)?;
                let b = integrate_recorded(&state0, &sys, StepperKind::Taylor2Ref, &ref_incs)?;
                let dp: Vec<f64> = a.p.iter().zip(&b.p).map(|(x, y)| x - y).collect();
                let dq: Vec<f64> = a.q.iter().zip(&b.q).map(|(x, y)| x - y).collect();
                per_level.push(energy_from_state_1d(&dp, &dq, &mesh, cfg.k));
            }
            Ok(per_level)
        })
        .collect::<Result<_>>()?;

    let taus: Vec<f64> = (0..cfg.tau_levels)
        .map(|lvl| cfg.tau_base / (1 << lvl) as f64)
        .collect();
    let rms: Vec<f64> = (0..cfg.tau_levels)
        .map(|lvl| {
            (errs.iter().map(|e| e[lvl]).sum::<f64>() / cfg.samples as f64).sqrt()
        })
        .collect();
    let log_t: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let log_e: Vec<f64> = rms.iter().map(|e| e.ln()).collect();
    let (slope, _) = fit_slope(&log_t, &log_e)?;
    Ok(TemporalOrder {
        taus,
        rms_errors: rms,
        slope,
    })
}

/// Final-time field values on a uniform output grid for one noise size.
#[derive(Debug, Clone, Serialize)]
pub struct ShowcaseField {
    pub lambda: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major S_h(x_i, y_j) values, y-major rows.
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub energy_initial: f64,
    pub energy_final: f64,
}

/// Colored-noise showcase on [0, 2/3] × [0, 1/2]: truncated sine-product
/// noise, trig initial data, one run per λ with S and T sampled on a
/// uniform plotting grid at the final time.
pub fn showcase_2d_colored(cfg: &ExperimentConfig) -> Result<Vec<ShowcaseField>> {
    let nx = *cfg.nx.first().ok_or_else(|| Error::Config("empty mesh list".into()))?;
    let ny = cfg.ny_for(0);
    let nt = cfg.nt.ok_or_else(|| Error::Config("showcase needs an explicit nt".into()))?;
    let tau = cfg.t_final / nt as f64;
    let basis = BasisSpec::new(cfg.k);
    let mesh = tensor_mesh_2d(
        uniform_mesh_1d(0.0, 2.0 / 3.0, nx, true)?,
        uniform_mesh_1d(0.0, 0.5, ny, true)?,
    );
    let noise = sine_product_noise(cfg.noise_modes);
    let pi = std::f64::consts::PI;
    let e0f = |x: f64, y: f64| (3.0 * pi * x).sin() * (4.0 * pi * y).sin();
    let s0f = |x: f64, y: f64| -0.8 * (3.0 * pi * x).cos() * (4.0 * pi * y).cos();
    let t0f = |x: f64, y: f64| -0.6 * (3.0 * pi * x).sin() * (4.0 * pi * y).cos();
    let (e0, s0, t0) = project_initial_2d(cfg, &mesh, &basis, e0f, s0f, t0f)?;
    let mut q0 = s0.data.clone();
    q0.extend_from_slice(&t0.data);
    let state0 = PQState::new(e0.data, q0);
    let stepper: StepperKind = cfg.stepper.into();

    let xs: Vec<f64> = (0..cfg.grid_nx)
        .map(|i| (i as f64 + 0.5) * (2.0 / 3.0) / cfg.grid_nx as f64)
        .collect();
    let ys: Vec<f64> = (0..cfg.grid_ny)
        .map(|j| (j as f64 + 0.5) * 0.5 / cfg.grid_ny as f64)
        .collect();

    let mut out = Vec::with_capacity(cfg.lambdas.len());
    for &lambda in &cfg.lambdas {
        let sys = assemble_maxwell_2d(
            &mesh,
            &basis,
            FluxParams2D::new(cfg.alpha, cfg.alpha2)?,
            lambda,
            lambda,
            &noise,
        )?;
        let e_init = energy_from_state_2d(&state0.p, &state0.q, &mesh, cfg.k);
        let mut sampler = PathSampler::new(cfg.seed, 0, sys.n_modes());
        let mut ws = Workspace::for_system(&sys);
        let mut state = state0.clone();
        for _ in 0..nt {
            let inc = sampler.sample(tau, stepper.needs_j());
            step_in_place(&mut state, &sys, tau, &inc, stepper, &mut ws)?;
        }
        let e_fin = energy_from_state_2d(&state.p, &state.q, &mesh, cfg.k);
        let dof = state.p.len();
        let s_h = FieldCoeffs2D::from_data(state.q[..dof].to_vec(), nx, ny, cfg.k)?;
        let t_h = FieldCoeffs2D::from_data(state.q[dof..].to_vec(), nx, ny, cfg.k)?;
        let mut s_grid = Vec::with_capacity(xs.len() * ys.len());
        let mut t_grid = Vec::with_capacity(xs.len() * ys.len());
        for &y in &ys {
            for &x in &xs {
                s_grid.push(s_h.eval_at(&mesh, x, y));
                t_grid.push(t_h.eval_at(&mesh, x, y));
            }
        }
        out.push(ShowcaseField {
            lambda,
            xs: xs.clone(),
            ys: ys.clone(),
            s_grid,
            t_grid,
            energy_initial: e_init,
            energy_final: e_fin,
        });
    }
    Ok(out)
}
