//! Time integrators for dp = Aq dt + L dB, dq = Bp dt + N dB.
//!
//! Three explicit one-step maps over a step τ with increments (ΔB, J),
//! J = (1/τ)∫(B_s − B_t) ds:
//!
//! * symplectic Euler
//!     p' = p + τA q + L ΔB,   q' = q + τB p' + N ΔB
//! * two-stage partitioned Runge–Kutta (mean-square order 2 on this
//!   linear system)
//!     𝒬₁ = q + N(J + ΔB/√2)
//!     𝒫₁ = p + (τ/4) A𝒬₁ + L(J + ΔB/(2√3))
//!     𝒬₂ = q + (2τ/3) B𝒫₁ + N(J − ΔB/(3√2))
//!     𝒫₂ = p + τ(¼A𝒬₁ + ¾A𝒬₂) + L(J − ΔB/√3)
//!     p' = p + L ΔB + τ(¼A𝒬₁ + ¾A𝒬₂)
//!     q' = q + N ΔB + τ(⅔B𝒫₁ + ⅓B𝒫₂)
//! * the second-order Taylor one-step reference
//!     p' = p + τA q + ½τ²AB p + τA N J + L ΔB
//!     q' = q + τB p + ½τ²BA q + τB L J + N ΔB
//!
//! The coupled-path helpers aggregate fine-grid increments onto coarser
//! grids exactly (ΔB by summation, J through the prefix identity
//! J_coarse τ = Σ_i [(B_{t_i} − B_{t_0}) δ + J_i δ]), so strong-order
//! studies see the same Brownian path at every resolution.

use crate::error::{Error, Result};
use crate::qwiener::{NoiseIncrement, PathSampler};
use crate::system::DriftSystem;

/// Phase-space state of an assembled system.
#[derive(Debug, Clone, PartialEq)]
pub struct PQState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: f64,
}

impl PQState {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Self {
        Self { p, q, t: 0.0 }
    }
}

/// Available one-step maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepperKind {
    SymplecticEuler,
    Prk2,
    Taylor2Ref,
}

impl StepperKind {
    /// Whether the map consumes the time-integral increment J.
    pub fn needs_j(&self) -> bool {
        !matches!(self, StepperKind::SymplecticEuler)
    }
}

/// Scratch buffers reused across steps of one trajectory.
pub struct Workspace {
    wp: [Vec<f64>; 3],
    wq: [Vec<f64>; 3],
    vm: Vec<f64>,
}

impl Workspace {
    pub fn for_system(sys: &DriftSystem) -> Self {
        let p = sys.p_dim();
        let q = sys.q_dim();
        Self {
            wp: [vec![0.0; p], vec![0.0; p], vec![0.0; p]],
            wq: [vec![0.0; q], vec![0.0; q], vec![0.0; q]],
            vm: vec![0.0; sys.n_modes()],
        }
    }
}

#[inline]
fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn check_dims(state: &PQState, sys: &DriftSystem, inc: &NoiseIncrement) -> Result<()> {
    if state.p.len() != sys.p_dim() || state.q.len() != sys.q_dim() {
        return Err(Error::Dimension(format!(
            "state is ({}, {}) but system is ({}, {})",
            state.p.len(),
            state.q.len(),
            sys.p_dim(),
            sys.q_dim()
        )));
    }
    if inc.db.len() != sys.n_modes() {
        return Err(Error::Dimension(format!(
            "increment carries {} modes, system has {}",
            inc.db.len(),
            sys.n_modes()
        )));
    }
    Ok(())
}

/// Advance one step in place.
pub fn step_in_place(
    state: &mut PQState,
    sys: &DriftSystem,
    tau: f64,
    inc: &NoiseIncrement,
    kind: StepperKind,
    ws: &mut Workspace,
) -> Result<()> {
    check_dims(state, sys, inc)?;
    match kind {
        StepperKind::SymplecticEuler => {
            sys.a.apply(&state.q, &mut ws.wp[0]);
            axpy(&mut state.p, tau, &ws.wp[0]);
            sys.l.apply_add(&inc.db, &mut state.p);
            sys.b.apply(&state.p, &mut ws.wq[0]);
            axpy(&mut state.q, tau, &ws.wq[0]);
            sys.n.apply_add(&inc.db, &mut state.q);
        }
        StepperKind::Prk2 => {
            let j = inc.j()?;
            let [aq1, pstage, aq2] = &mut ws.wp;
            let [q_scratch, bp1, q2] = &mut ws.wq;
            let vm = &mut ws.vm;
            fn combine(vm: &mut [f64], j: &[f64], c: f64, db: &[f64]) {
                for ((v, &jj), &bb) in vm.iter_mut().zip(j).zip(db) {
                    *v = jj + c * bb;
                }
            }
            // stage 𝒬₁ and A𝒬₁
            combine(vm, j, 1.0 / 2.0f64.sqrt(), &inc.db);
            q_scratch.copy_from_slice(&state.q);
            sys.n.apply_add(vm, q_scratch);
            sys.a.apply(q_scratch, aq1);
            // stage 𝒫₁ and B𝒫₁
            combine(vm, j, 1.0 / (2.0 * 3.0f64.sqrt()), &inc.db);
            pstage.copy_from_slice(&state.p);
            axpy(pstage, tau / 4.0, aq1);
            sys.l.apply_add(vm, pstage);
            sys.b.apply(pstage, bp1);
            // stage 𝒬₂ and A𝒬₂
            combine(vm, j, -1.0 / (3.0 * 2.0f64.sqrt()), &inc.db);
            q2.copy_from_slice(&state.q);
            axpy(q2, 2.0 * tau / 3.0, bp1);
            sys.n.apply_add(vm, q2);
            sys.a.apply(q2, aq2);
            // stage 𝒫₂ and B𝒫₂ (𝒫₂ reuses the 𝒫₁ buffer, B𝒫₂ the 𝒬₁ one)
            combine(vm, j, -1.0 / 3.0f64.sqrt(), &inc.db);
            pstage.copy_from_slice(&state.p);
            axpy(pstage, tau / 4.0, aq1);
            axpy(pstage, 3.0 * tau / 4.0, aq2);
            sys.l.apply_add(vm, pstage);
            sys.b.apply(pstage, q_scratch);
            // updates
            sys.l.apply_add(&inc.db, &mut state.p);
            axpy(&mut state.p, tau / 4.0, aq1);
            axpy(&mut state.p, 3.0 * tau / 4.0, aq2);
            sys.n.apply_add(&inc.db, &mut state.q);
            axpy(&mut state.q, 2.0 * tau / 3.0, bp1);
            axpy(&mut state.q, tau / 3.0, q_scratch);
        }
        StepperKind::Taylor2Ref => {
            let j = inc.j()?;
            sys.b.apply(&state.p, &mut ws.wq[0]); // B p
            sys.a.apply(&state.q, &mut ws.wp[0]); // A q
            ws.wq[1].iter_mut().for_each(|v| *v = 0.0);
            sys.n.apply_add(j, &mut ws.wq[1]); // N J
            sys.a.apply(&ws.wq[1], &mut ws.wp[1]); // A N J
            sys.a.apply(&ws.wq[0], &mut ws.wp[2]); // A B p
            axpy(&mut state.p, tau, &ws.wp[0]);
            axpy(&mut state.p, 0.5 * tau * tau, &ws.wp[2]);
            axpy(&mut state.p, tau, &ws.wp[1]);
            sys.l.apply_add(&inc.db, &mut state.p);

            ws.wp[1].iter_mut().for_each(|v| *v = 0.0);
            sys.l.apply_add(j, &mut ws.wp[1]); // L J
            sys.b.apply(&ws.wp[1], &mut ws.wq[1]); // B L J
            sys.b.apply(&ws.wp[0], &mut ws.wq[2]); // B A q
            axpy(&mut state.q, tau, &ws.wq[0]);
            axpy(&mut state.q, 0.5 * tau * tau, &ws.wq[2]);
            axpy(&mut state.q, tau, &ws.wq[1]);
            sys.n.apply_add(&inc.db, &mut state.q);
        }
    }
    state.t += tau;
    Ok(())
}

/// One symplectic Euler step, p' = p + τAq + LΔB, q' = q + τBp' + NΔB.
pub fn step_symplectic_euler(
    state: &PQState,
    sys: &DriftSystem,
    tau: f64,
    inc: &NoiseIncrement,
) -> Result<PQState> {
    let mut s = state.clone();
    let mut ws = Workspace::for_system(sys);
    step_in_place(&mut s, sys, tau, inc, StepperKind::SymplecticEuler, &mut ws)?;
    Ok(s)
}

/// One two-stage PRK step; requires J.
pub fn step_prk2(
    state: &PQState,
    sys: &DriftSystem,
    tau: f64,
    inc: &NoiseIncrement,
) -> Result<PQState> {
    let mut s = state.clone();
    let mut ws = Workspace::for_system(sys);
    step_in_place(&mut s, sys, tau, inc, StepperKind::Prk2, &mut ws)?;
    Ok(s)
}

/// One second-order Taylor reference step; requires J.
pub fn step_taylor2_ref(
    state: &PQState,
    sys: &DriftSystem,
    tau: f64,
    inc: &NoiseIncrement,
) -> Result<PQState> {
    let mut s = state.clone();
    let mut ws = Workspace::for_system(sys);
    step_in_place(&mut s, sys, tau, inc, StepperKind::Taylor2Ref, &mut ws)?;
    Ok(s)
}

/// Integrate n steps with freshly sampled increments; the observer is called
/// with (step index, state) at the initial state and after every step.
pub fn integrate<F: FnMut(usize, &PQState)>(
    state0: &PQState,
    sys: &DriftSystem,
    tau: f64,
    n_steps: usize,
    kind: StepperKind,
    sampler: &mut PathSampler,
    mut observer: F,
) -> Result<PQState> {
    if sampler.n_modes() != sys.n_modes() {
        return Err(Error::Dimension(
            "sampler mode count does not match the system".into(),
        ));
    }
    let mut state = state0.clone();
    let mut ws = Workspace::for_system(sys);
    observer(0, &state);
    for step in 1..=n_steps {
        let inc = sampler.sample(tau, kind.needs_j());
        step_in_place(&mut state, sys, tau, &inc, kind, &mut ws)?;
        observer(step, &state);
    }
    Ok(state)
}

/// Integrate over a precomputed increment sequence (coupled-path studies).
pub fn integrate_recorded(
    state0: &PQState,
    sys: &DriftSystem,
    kind: StepperKind,
    incs: &[NoiseIncrement],
) -> Result<PQState> {
    let mut state = state0.clone();
    let mut ws = Workspace::for_system(sys);
    for inc in incs {
        step_in_place(&mut state, sys, inc.tau, inc, kind, &mut ws)?;
    }
    Ok(state)
}

/// Aggregate consecutive fine increments onto a grid coarser by `factor`.
///
/// ΔB is summed in ascending index order; J is recovered exactly from
/// J_coarse τ = Σ_i [(B_{t_i} − B_{t_0}) δ + J_i δ] over each group.
pub fn aggregate_increments(fine: &[NoiseIncrement], factor: usize) -> Result<Vec<NoiseIncrement>> {
    if factor == 0 || fine.len() % factor != 0 {
        return Err(Error::InvalidArg(format!(
            "cannot aggregate {} increments by a factor of {factor}",
            fine.len()
        )));
    }
    let n_modes = fine.first().map_or(0, |i| i.db.len());
    let delta = fine.first().map_or(0.0, |i| i.tau);
    let tau = delta * factor as f64;
    let mut out = Vec::with_capacity(fine.len() / factor);
    for group in fine.chunks_exact(factor) {
        let mut db = vec![0.0; n_modes];
        let mut jsum = vec![0.0; n_modes];
        for inc in group {
            let j = inc.j()?;
            for m in 0..n_modes {
                // (B_{t_i} − B_{t_0}) is the running prefix before this step
                jsum[m] += db[m] + j[m];
                db[m] += inc.db[m];
            }
        }
        for v in jsum.iter_mut() {
            *v /= factor as f64;
        }
        out.push(NoiseIncrement {
            tau,
            db,
            j: Some(jsum),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg1d::assemble_maxwell_1d;
    use crate::basis::BasisSpec;
    use crate::mesh::uniform_mesh_1d;
    use crate::projections::{project_1d, ProjectionSpec};
    use crate::qwiener::{standard_bm, NoiseDomain};
    use crate::system::{DriftSystem, Operator};
    use crate::qwiener::NoiseLoad;
    use std::f64::consts::PI;

    fn inc(tau: f64, db: f64, j: f64) -> NoiseIncrement {
        NoiseIncrement {
            tau,
            db: vec![db],
            j: Some(vec![j]),
        }
    }

    /// Extract the deterministic 2×2 one-step map of a scalar system.
    fn one_step_map(kind: StepperKind, a: f64, b: f64, tau: f64) -> [[f64; 2]; 2] {
        let sys = DriftSystem::scalar(a, b, 0.0, 0.0);
        let zero = inc(tau, 0.0, 0.0);
        let step = |p: f64, q: f64| -> (f64, f64) {
            let st = PQState::new(vec![p], vec![q]);
            let mut s = st.clone();
            let mut ws = Workspace::for_system(&sys);
            step_in_place(&mut s, &sys, tau, &zero, kind, &mut ws).unwrap();
            (s.p[0], s.q[0])
        };
        let (m11, m21) = step(1.0, 0.0);
        let (m12, m22) = step(0.0, 1.0);
        [[m11, m12], [m21, m22]]
    }

    #[test]
    fn pure_noise_systems_add_the_increment() {
        let sys = DriftSystem::scalar(0.0, 0.0, 1.0, 1.0);
        let st = PQState::new(vec![0.2], vec![-0.4]);
        let i = inc(0.1, 0.33, 0.05);
        for (kind, _) in [
            (StepperKind::SymplecticEuler, 0),
            (StepperKind::Prk2, 1),
            (StepperKind::Taylor2Ref, 2),
        ] {
            let mut s = st.clone();
            let mut ws = Workspace::for_system(&sys);
            step_in_place(&mut s, &sys, 0.1, &i, kind, &mut ws).unwrap();
            assert!((s.p[0] - (0.2 + 0.33)).abs() < 1e-15, "{kind:?}");
            assert!((s.q[0] - (-0.4 + 0.33)).abs() < 1e-15, "{kind:?}");
        }
    }

    #[test]
    fn zero_step_leaves_state_unchanged() {
        let sys = DriftSystem::scalar(1.0, -1.0, 0.0, 0.0);
        let st = PQState::new(vec![0.7], vec![0.1]);
        let s = step_prk2(&st, &sys, 0.0, &inc(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(s.p, st.p);
        assert_eq!(s.q, st.q);
    }

    #[test]
    fn missing_j_is_rejected() {
        let sys = DriftSystem::scalar(1.0, -1.0, 0.0, 0.0);
        let st = PQState::new(vec![0.7], vec![0.1]);
        let no_j = NoiseIncrement {
            tau: 0.1,
            db: vec![0.0],
            j: None,
        };
        assert!(step_prk2(&st, &sys, 0.1, &no_j).is_err());
        assert!(step_taylor2_ref(&st, &sys, 0.1, &no_j).is_err());
        assert!(step_symplectic_euler(&st, &sys, 0.1, &no_j).is_ok());
    }

    #[test]
    fn symplectic_euler_oscillator_map() {
        let tau = 0.3;
        let m = one_step_map(StepperKind::SymplecticEuler, 1.0, -1.0, tau);
        assert!((m[0][0] - 1.0).abs() < 1e-15);
        assert!((m[0][1] - tau).abs() < 1e-15);
        assert!((m[1][0] + tau).abs() < 1e-15);
        assert!((m[1][1] - (1.0 - tau * tau)).abs() < 1e-15);
    }

    #[test]
    fn deterministic_maps_preserve_phase_area() {
        // det = 1 is the planar form of Jᵀ Ω J = Ω
        for kind in [StepperKind::SymplecticEuler, StepperKind::Prk2] {
            for &tau in &[0.05, 0.1, 0.4] {
                let m = one_step_map(kind, 1.0, -1.0, tau);
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                assert!((det - 1.0).abs() < 1e-12, "{kind:?} τ={tau}: det {det}");
            }
        }
    }

    #[test]
    fn prk2_local_error_is_third_order() {
        // against the exact rotation of the oscillator p'' = −p
        let err = |tau: f64| -> f64 {
            let m = one_step_map(StepperKind::Prk2, 1.0, -1.0, tau);
            let (c, s) = (tau.cos(), tau.sin());
            let exact = [[c, s], [-s, c]];
            let mut e: f64 = 0.0;
            for r in 0..2 {
                for cc in 0..2 {
                    e = e.max((m[r][cc] - exact[r][cc]).abs());
                }
            }
            e
        };
        let r1 = err(0.1) / err(0.05);
        let r2 = err(0.05) / err(0.025);
        assert!((r1 - 8.0).abs() < 1.5, "ratio {r1}");
        assert!((r2 - 8.0).abs() < 1.0, "ratio {r2}");
    }

    #[test]
    fn taylor2_matches_second_order_expansion() {
        let tau = 0.02;
        let m = one_step_map(StepperKind::Taylor2Ref, 1.0, -1.0, tau);
        // I + τ M + τ²M²/2 for M = [[0, 1], [−1, 0]]
        let want = [
            [1.0 - 0.5 * tau * tau, tau],
            [-tau, 1.0 - 0.5 * tau * tau],
        ];
        for r in 0..2 {
            for c in 0..2 {
                assert!((m[r][c] - want[r][c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn prk2_vs_taylor2_one_step_moments() {
        // on a random linear system with full noise coupling the one-step
        // difference has mean O(τ³) and RMS O(τ^{5/2})
        use rand::Rng;
        use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = 3usize;
        let mut mat = |scale: f64| -> Vec<f64> {
            (0..d * d).map(|_| rng.gen_range(-scale..scale)).collect()
        };
        let sys = DriftSystem::new(
            Operator::dense(d, d, mat(1.0)).unwrap(),
            Operator::dense(d, d, mat(1.0)).unwrap(),
            NoiseLoad::Dense {
                g: mat(1.0),
                dof: d,
                n_modes: d,
            },
            NoiseLoad::Dense {
                g: mat(1.0),
                dof: d,
                n_modes: d,
            },
        )
        .unwrap();
        let p0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let st = PQState::new(p0, q0);

        let n_samples = 20_000;
        let taus = [0.08, 0.04, 0.02, 0.01];
        let mut means = Vec::new();
        let mut rmss = Vec::new();
        for &tau in &taus {
            let mut mean = vec![0.0; 2 * d];
            let mut rms = 0.0;
            let mut sampler = PathSampler::new(1234, 0, d);
            for _ in 0..n_samples {
                let i = sampler.sample(tau, true);
                let a = step_prk2(&st, &sys, tau, &i).unwrap();
                let b = step_taylor2_ref(&st, &sys, tau, &i).unwrap();
                let mut norm2 = 0.0;
                for (kk, (x, y)) in a.p.iter().zip(&b.p).chain(a.q.iter().zip(&b.q)).enumerate() {
                    let dv = x - y;
                    mean[kk] += dv;
                    norm2 += dv * dv;
                }
                rms += norm2;
            }
            let mn = mean.iter().map(|v| (v / n_samples as f64).powi(2)).sum::<f64>().sqrt();
            means.push(mn);
            rmss.push((rms / n_samples as f64).sqrt());
        }
        let mean_slope = (means[0] / means[3]).ln() / (taus[0] / taus[3]).ln();
        let rms_slope = (rmss[0] / rmss[3]).ln() / (taus[0] / taus[3]).ln();
        assert!(mean_slope >= 2.7, "mean slope {mean_slope}, means {means:?}");
        assert!(
            (rms_slope - 2.5).abs() < 0.3,
            "rms slope {rms_slope}, rms {rmss:?}"
        );
    }

    #[test]
    fn integrate_zero_steps_returns_initial_state() {
        let sys = DriftSystem::scalar(1.0, -1.0, 1.0, 1.0);
        let st = PQState::new(vec![0.5], vec![-0.2]);
        let mut sampler = PathSampler::new(3, 0, 1);
        let s = integrate(&st, &sys, 0.1, 0, StepperKind::Prk2, &mut sampler, |_, _| {}).unwrap();
        assert_eq!(s.p, st.p);
        assert_eq!(s.q, st.q);
    }

    #[test]
    fn integrate_is_deterministic_for_a_seed() {
        let mesh = uniform_mesh_1d(0.0, 2.0 * PI, 8, true).unwrap();
        let basis = BasisSpec::new(1);
        let noise = standard_bm(NoiseDomain::Interval { a: 0.0, b: 2.0 * PI });
        let sys = assemble_maxwell_1d(&mesh, &basis, 0.5, 1.0, 1.0, &noise).unwrap();
        let st = PQState::new(vec![0.1; sys.p_dim()], vec![-0.1; sys.q_dim()]);
        let run = || {
            let mut sampler = PathSampler::new(77, 5, 1);
            integrate(&st, &sys, 0.01, 50, StepperKind::Prk2, &mut sampler, |_, _| {}).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.p, b.p);
        assert_eq!(a.q, b.q);
    }

    #[test]
    fn drift_free_energy_is_preserved_to_tolerance() {
        // λ₁ = λ₂ = 0, PRK2 over [0, 3] with τ = 0.0075
        let n = 20;
        let mesh = uniform_mesh_1d(0.0, 2.0 * PI, n, true).unwrap();
        let basis = BasisSpec::new(1);
        let noise = standard_bm(NoiseDomain::Interval { a: 0.0, b: 2.0 * PI });
        let sys = assemble_maxwell_1d(&mesh, &basis, 0.5, 0.0, 0.0, &noise).unwrap();
        let eta0 = project_1d(|x: f64| x.sin() + x.cos(), &mesh, &basis, &ProjectionSpec::L2)
            .unwrap();
        let u0 = project_1d(|x: f64| x.sin() - x.cos(), &mesh, &basis, &ProjectionSpec::L2)
            .unwrap();
        let st = PQState::new(eta0.data, u0.data);
        let e0 = crate::dg1d::energy_from_state_1d(&st.p, &st.q, &mesh, 1);
        let mut sampler = PathSampler::new(1, 0, 1);
        let mut max_drift: f64 = 0.0;
        integrate(&st, &sys, 0.0075, 400, StepperKind::Prk2, &mut sampler, |_, s| {
            let e = crate::dg1d::energy_from_state_1d(&s.p, &s.q, &mesh, 1);
            max_drift = max_drift.max(((e - e0) / e0).abs());
        })
        .unwrap();
        assert!(max_drift <= 1e-4, "relative energy drift {max_drift}");
    }

    #[test]
    fn aggregation_is_exact_summation() {
        let mut sampler = PathSampler::new(9, 2, 2);
        let fine: Vec<NoiseIncrement> = (0..8).map(|_| sampler.sample(0.125, true)).collect();
        let coarse = aggregate_increments(&fine, 4).unwrap();
        assert_eq!(coarse.len(), 2);
        assert!((coarse[0].tau - 0.5).abs() < 1e-15);
        for m in 0..2 {
            let s: f64 = fine[..4].iter().map(|i| i.db[m]).sum();
            assert_eq!(coarse[0].db[m], s);
        }
        // factor 1 is the identity on ΔB and J
        let same = aggregate_increments(&fine, 1).unwrap();
        for (a, b) in same.iter().zip(&fine) {
            assert_eq!(a.db, b.db);
            let (ja, jb) = (a.j.as_ref().unwrap(), b.j.as_ref().unwrap());
            for (x, y) in ja.iter().zip(jb) {
                assert!((x - y).abs() < 1e-15);
            }
        }
        assert!(aggregate_increments(&fine, 3).is_err());
    }

    #[test]
    fn aggregated_j_has_the_right_moments() {
        // J over the coarse step must satisfy E J² = τ/3 and E ΔB·J = τ/2
        let n = 60_000;
        let factor = 8;
        let delta = 0.01;
        let tau = delta * factor as f64;
        let mut sampler = PathSampler::new(31, 0, 1);
        let (mut s_jj, mut s_bj) = (0.0, 0.0);
        for _ in 0..n {
            let fine: Vec<NoiseIncrement> =
                (0..factor).map(|_| sampler.sample(delta, true)).collect();
            let c = &aggregate_increments(&fine, factor).unwrap()[0];
            let j = c.j.as_ref().unwrap()[0];
            s_jj += j * j;
            s_bj += c.db[0] * j;
        }
        let nf = n as f64;
        let tol_jj = 3.0 * (2.0f64).sqrt() * (tau / 3.0) / nf.sqrt();
        let tol_bj = 3.0 * (tau * tau * 7.0 / 12.0).sqrt() / nf.sqrt();
        assert!((s_jj / nf - tau / 3.0).abs() < tol_jj);
        assert!((s_bj / nf - tau / 2.0).abs() < tol_bj);
    }
}
