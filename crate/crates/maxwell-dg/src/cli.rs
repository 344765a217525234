//! Command-line front end: experiment dispatch, JSON config handling, and
//! CSV emission.
//!
//! Every command starts from its recipe defaults, merges an optional JSON
//! config file on top, and finally applies explicit flags. Output files
//! begin with `#` comment lines carrying the fully resolved configuration
//! and seed; floating-point values are printed with 17 significant digits,
//! so identical invocations produce byte-identical files.

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::field::FieldCoeffs;
use crate::lab::{
    convergence_study_1d, convergence_study_2d, energy_growth_study_1d, energy_growth_study_2d,
    showcase_2d_colored, temporal_order_study, ConvergenceRow, EnergySeries, ExperimentConfig,
    ModelKind, NoiseKind, StepperName,
};
use crate::mesh::uniform_mesh_1d;
use crate::msp1d::{close_constraints, conservation_residual, lemma1_gap, InterfaceTraces, MspStructure};
use crate::qwiener::PathSampler;

#[derive(Parser)]
#[command(
    name = "maxwell-dg",
    version,
    about = "DG solvers for stochastic Maxwell equations with additive noise",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 1D accuracy table against the exact solution (single Brownian path).
    #[command(name = "convergence-1d")]
    Convergence1d(RunArgs),
    /// 2D accuracy table against the exact solution (single Brownian path).
    #[command(name = "convergence-2d")]
    Convergence2d(RunArgs),
    /// Averaged 1D energy growth with a least-squares slope.
    #[command(name = "energy-1d")]
    Energy1d(RunArgs),
    /// Averaged 2D energy growth with a least-squares slope.
    #[command(name = "energy-2d")]
    Energy2d(RunArgs),
    /// Mean-square temporal order against the Taylor reference.
    #[command(name = "temporal-order")]
    TemporalOrder(RunArgs),
    /// Multi-symplectic conservation residuals on random closed states.
    #[command(name = "msp-check")]
    MspCheck(MspArgs),
    /// Colored-noise 2D showcase; emits field grids per noise size.
    #[command(name = "showcase-2d")]
    Showcase2d(RunArgs),
    /// Moment checks of the joint (ΔB, J) increment sampler.
    #[command(name = "noise-moments")]
    NoiseMoments(MomentArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config file; explicit flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Polynomial degree of the DG space.
    #[arg(long)]
    k: Option<usize>,
    /// Flux parameter α (α₁ in 2D).
    #[arg(long)]
    alpha: Option<f64>,
    /// y-direction flux parameter α₂.
    #[arg(long)]
    alpha2: Option<f64>,
    /// Noise sizes as "λ1,λ2" or a single value for both.
    #[arg(long, value_delimiter = ',', num_args = 1..=2)]
    lambda: Option<Vec<f64>>,
    /// Cell counts, e.g. --nx 20,40,80,160.
    #[arg(long, value_delimiter = ',')]
    nx: Option<Vec<usize>>,
    /// y cell counts (defaults to nx).
    #[arg(long, value_delimiter = ',')]
    ny: Option<Vec<usize>>,
    /// Explicit number of time steps.
    #[arg(long)]
    nt: Option<usize>,
    /// Time steps per x-cell (Nt = ratio · Nx).
    #[arg(long)]
    nt_ratio: Option<f64>,
    /// Final time T.
    #[arg(long)]
    t_final: Option<f64>,
    /// Stepper: symplectic-euler | prk2 | taylor2.
    #[arg(long)]
    stepper: Option<String>,
    /// Noise family: standard-bm | sine-1d | sine-product.
    #[arg(long)]
    noise: Option<String>,
    /// Truncation of the sine families.
    #[arg(long)]
    noise_modes: Option<u32>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Base seed; path i draws from stream (seed, i).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of τ levels in the temporal-order study.
    #[arg(long)]
    tau_levels: Option<usize>,
    /// Coarsest τ in the temporal-order study.
    #[arg(long)]
    tau_base: Option<f64>,
    /// Showcase noise sizes, e.g. --lambdas 0.1,0.5,1.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Showcase output grid as COLSxROWS, e.g. 120x90.
    #[arg(long)]
    grid: Option<String>,
    /// Output directory for CSV files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = hardware parallelism); the MAXWELL_DG_THREADS
    /// environment variable overrides the default.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct MspArgs {
    /// Flux parameter α = n − m.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Number of random closed states / trace draws.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Mesh cells.
    #[arg(long, default_value_t = 16)]
    cells: usize,
    /// Polynomial degree.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fail (exit 3) if any residual exceeds this relative tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Clone)]
struct MomentArgs {
    #[arg(long, default_value_t = 0.01)]
    tau: f64,
    #[arg(long, default_value_t = 1_000_000)]
    draws: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// 17 significant digits; round-trips f64 exactly.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn merge_config(base: ExperimentConfig, path: Option<&Path>) -> Result<ExperimentConfig> {
    let Some(path) = path else { return Ok(base) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let file_val: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let serde_json::Value::Object(file_map) = file_val else {
        return Err(Error::Config(format!(
            "{}: config must be a JSON object",
            path.display()
        )));
    };
    let mut base_val = serde_json::to_value(&base).expect("config serializes");
    let obj = base_val.as_object_mut().unwrap();
    for (k, v) in file_map {
        if !obj.contains_key(&k) {
            return Err(Error::Config(format!(
                "{}: unknown config field `{k}`",
                path.display()
            )));
        }
        obj.insert(k, v);
    }
    serde_json::from_value(base_val)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn parse_stepper(s: &str) -> Result<StepperName> {
    match s {
        "symplectic-euler" => Ok(StepperName::SymplecticEuler),
        "prk2" => Ok(StepperName::Prk2),
        "taylor2" => Ok(StepperName::Taylor2),
        other => Err(Error::Config(format!("unknown stepper `{other}`"))),
    }
}

fn parse_noise(s: &str) -> Result<NoiseKind> {
    match s {
        "standard-bm" => Ok(NoiseKind::StandardBm),
        "sine-1d" => Ok(NoiseKind::Sine1d),
        "sine-product" => Ok(NoiseKind::SineProduct),
        other => Err(Error::Config(format!("unknown noise family `{other}`"))),
    }
}

impl RunArgs {
    fn resolve(&self, recipe: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut cfg = merge_config(recipe, self.config.as_deref())?;
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(a) = self.alpha2 {
            cfg.alpha2 = a;
        }
        if let Some(l) = &self.lambda {
            cfg.lambda1 = l[0];
            cfg.lambda2 = *l.get(1).unwrap_or(&l[0]);
        }
        if let Some(nx) = &self.nx {
            cfg.nx = nx.clone();
        }
        if let Some(ny) = &self.ny {
            cfg.ny = ny.clone();
        }
        if let Some(nt) = self.nt {
            cfg.nt = Some(nt);
            cfg.nt_ratio = None;
        }
        if let Some(r) = self.nt_ratio {
            cfg.nt_ratio = Some(r);
            cfg.nt = None;
        }
        if let Some(t) = self.t_final {
            cfg.t_final = t;
        }
        if let Some(s) = &self.stepper {
            cfg.stepper = parse_stepper(s)?;
        }
        if let Some(n) = &self.noise {
            cfg.noise = parse_noise(n)?;
        }
        if let Some(m) = self.noise_modes {
            cfg.noise_modes = m;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(l) = self.tau_levels {
            cfg.tau_levels = l;
        }
        if let Some(t) = self.tau_base {
            cfg.tau_base = t;
        }
        if let Some(ls) = &self.lambdas {
            cfg.lambdas = ls.clone();
        }
        if let Some(g) = &self.grid {
            let (a, b) = g
                .split_once(['x', 'X'])
                .ok_or_else(|| Error::Config(format!("grid must look like 120x90, got `{g}`")))?;
            cfg.grid_nx = a
                .parse()
                .map_err(|_| Error::Config(format!("bad grid columns `{a}`")))?;
            cfg.grid_ny = b
                .parse()
                .map_err(|_| Error::Config(format!("bad grid rows `{b}`")))?;
        }
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.display().to_string();
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        Ok(cfg)
    }
}

fn thread_count(cfg_threads: usize) -> usize {
    if cfg_threads > 0 {
        return cfg_threads;
    }
    if let Ok(v) = std::env::var("MAXWELL_DG_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(f)
}

fn config_header(command: &str, cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    format!("# command={command}\n# config={json}\n# seed={}\n", cfg.seed)
}

fn write_file(dir: &str, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = Path::new(dir).join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn convergence_csv(command: &str, cfg: &ExperimentConfig, rows: &[ConvergenceRow], fields: &[&str]) -> String {
    let mut s = config_header(command, cfg);
    s.push_str("nx,ny,nt");
    for f in fields {
        let _ = write!(s, ",err_{f}");
    }
    for f in fields {
        let _ = write!(s, ",order_{f}");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{},{},{}", r.nx, r.ny, r.nt);
        for e in &r.errors {
            let _ = write!(s, ",{}", fmt_f64(*e));
        }
        for o in &r.orders {
            let _ = write!(s, ",{}", fmt_f64(*o));
        }
        s.push('\n');
    }
    s
}

fn energy_csv(command: &str, cfg: &ExperimentConfig, series: &EnergySeries) -> String {
    let mut s = config_header(command, cfg);
    let _ = write!(
        s,
        "# slope={} intercept={} theory_slope={} n_samples={}\n",
        fmt_f64(series.slope),
        fmt_f64(series.intercept),
        fmt_f64(series.theory_slope),
        series.n_samples
    );
    s.push_str("t,mean_energy,stderr\n");
    for ((t, m), e) in series
        .times
        .iter()
        .zip(&series.mean_energy)
        .zip(&series.stderr)
    {
        let _ = writeln!(s, "{},{},{}", fmt_f64(*t), fmt_f64(*m), fmt_f64(*e));
    }
    s
}

fn run_convergence(cmd: &str, args: &RunArgs, model: ModelKind) -> Result<String> {
    let recipe = match model {
        ModelKind::OneD => ExperimentConfig::default(),
        ModelKind::TwoD => ExperimentConfig {
            model: ModelKind::TwoD,
            nt_ratio: Some(10.0),
            t_final: 1.0,
            ..Default::default()
        },
    };
    let cfg = args.resolve(recipe)?;
    let threads = thread_count(cfg.threads);
    let (rows, fields): (Vec<ConvergenceRow>, &[&str]) = match model {
        ModelKind::OneD => (
            in_pool(threads, || convergence_study_1d(&cfg))?,
            &["u", "eta"],
        ),
        ModelKind::TwoD => (
            in_pool(threads, || convergence_study_2d(&cfg))?,
            &["E", "S", "T"],
        ),
    };
    let csv = convergence_csv(cmd, &cfg, &rows, fields);
    let name = match model {
        ModelKind::OneD => "convergence_1d.csv",
        ModelKind::TwoD => "convergence_2d.csv",
    };
    let path = write_file(&cfg.out_dir, name, &csv)?;
    let last = rows.last().expect("nonempty table");
    let orders: Vec<String> = fields
        .iter()
        .zip(&last.orders)
        .map(|(f, o)| format!("{f}={o:.3}"))
        .collect();
    Ok(format!(
        "{cmd}: {} rows, finest orders {} -> {}",
        rows.len(),
        orders.join(" "),
        path.display()
    ))
}

fn run_energy(cmd: &str, args: &RunArgs, model: ModelKind) -> Result<String> {
    let recipe = match model {
        ModelKind::OneD => ExperimentConfig {
            nx: vec![80],
            nt: Some(400),
            nt_ratio: None,
            t_final: 3.0,
            samples: 1000,
            ..Default::default()
        },
        ModelKind::TwoD => ExperimentConfig {
            model: ModelKind::TwoD,
            nx: vec![80],
            nt: Some(400),
            nt_ratio: None,
            t_final: 1.0,
            samples: 500,
            ..Default::default()
        },
    };
    let cfg = args.resolve(recipe)?;
    let threads = thread_count(cfg.threads);
    let series = match model {
        ModelKind::OneD => in_pool(threads, || energy_growth_study_1d(&cfg))?,
        ModelKind::TwoD => in_pool(threads, || energy_growth_study_2d(&cfg))?,
    };
    let name = match model {
        ModelKind::OneD => "energy_1d.csv",
        ModelKind::TwoD => "energy_2d.csv",
    };
    let path = write_file(&cfg.out_dir, name, &energy_csv(cmd, &cfg, &series))?;
    Ok(format!(
        "{cmd}: slope={:.6} theory={:.6} samples={} -> {}",
        series.slope,
        series.theory_slope,
        series.n_samples,
        path.display()
    ))
}

fn run_temporal_order(args: &RunArgs) -> Result<String> {
    let recipe = ExperimentConfig {
        nx: vec![16],
        noise: NoiseKind::Sine1d,
        noise_modes: 4,
        t_final: 1.0,
        tau_base: 1.0 / 16.0,
        tau_levels: 5,
        samples: 100,
        ..Default::default()
    };
    let cfg = args.resolve(recipe)?;
    let threads = thread_count(cfg.threads);
    let res = in_pool(threads, || temporal_order_study(&cfg))?;
    let mut csv = config_header("temporal-order", &cfg);
    let _ = writeln!(csv, "# slope={}", fmt_f64(res.slope));
    csv.push_str("tau,rms_error\n");
    for (t, e) in res.taus.iter().zip(&res.rms_errors) {
        let _ = writeln!(csv, "{},{}", fmt_f64(*t), fmt_f64(*e));
    }
    let path = write_file(&cfg.out_dir, "temporal_order.csv", &csv)?;
    Ok(format!(
        "temporal-order: slope={:.4} ({:?}) over {} levels -> {}",
        res.slope,
        cfg.stepper,
        res.taus.len(),
        path.display()
    ))
}

fn run_showcase(args: &RunArgs) -> Result<String> {
    let recipe = ExperimentConfig {
        model: ModelKind::TwoD,
        nx: vec![80],
        ny: vec![60],
        nt: Some(1200),
        nt_ratio: None,
        t_final: 1.0,
        noise: NoiseKind::SineProduct,
        noise_modes: 50,
        ..Default::default()
    };
    let cfg = args.resolve(recipe)?;
    let threads = thread_count(cfg.threads);
    let fields = in_pool(threads, || showcase_2d_colored(&cfg))?;
    let mut names = Vec::new();
    for f in &fields {
        for (tag, grid) in [("s", &f.s_grid), ("t", &f.t_grid)] {
            let mut csv = config_header("showcase-2d", &cfg);
            let _ = writeln!(
                csv,
                "# lambda={} energy_initial={} energy_final={}",
                fmt_f64(f.lambda),
                fmt_f64(f.energy_initial),
                fmt_f64(f.energy_final)
            );
            csv.push_str("x,y,value\n");
            for (j, &y) in f.ys.iter().enumerate() {
                for (i, &x) in f.xs.iter().enumerate() {
                    let _ = writeln!(
                        csv,
                        "{},{},{}",
                        fmt_f64(x),
                        fmt_f64(y),
                        fmt_f64(grid[j * f.xs.len() + i])
                    );
                }
            }
            let name = format!("showcase_{tag}_lambda_{}.csv", f.lambda);
            write_file(&cfg.out_dir, &name, &csv)?;
            names.push(name);
        }
    }
    Ok(format!(
        "showcase-2d: {} noise sizes, grids {}x{} -> {}/showcase_*.csv",
        fields.len(),
        cfg.grid_nx,
        cfg.grid_ny,
        cfg.out_dir
    ))
}

fn run_msp_check(args: &MspArgs) -> Result<String> {
    let mesh = uniform_mesh_1d(0.0, 2.0 * std::f64::consts::PI, args.cells, true)?;
    let basis = BasisSpec::new(args.k);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut max_gap: f64 = 0.0;
    let mut max_res: f64 = 0.0;
    for _ in 0..args.trials {
        // random split with the prescribed α = n − m
        let m = rng.gen_range(-1.0..1.0);
        let st = MspStructure::new(m, m + args.alpha)?;
        let random_field = |rng: &mut ChaCha8Rng| {
            let mut f = FieldCoeffs::zeros(args.cells, args.k);
            for v in f.data.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            f
        };
        let us = close_constraints(
            random_field(&mut rng),
            random_field(&mut rng),
            random_field(&mut rng),
            random_field(&mut rng),
            &st,
            &mesh,
            &basis,
        )?;
        let vs = close_constraints(
            random_field(&mut rng),
            random_field(&mut rng),
            random_field(&mut rng),
            random_field(&mut rng),
            &st,
            &mesh,
            &basis,
        )?;
        let tr_u: InterfaceTraces =
            std::array::from_fn(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let tr_v: InterfaceTraces =
            std::array::from_fn(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (gl, gr) = lemma1_gap(&tr_u, &tr_v, &st);
        max_gap = max_gap.max(gl.abs()).max(gr.abs());
        let res = conservation_residual(&us, &vs, &st, &mesh, &basis)?;
        let scale = (us.u.l2_norm_sq(&mesh) * vs.u.l2_norm_sq(&mesh))
            .sqrt()
            .max(1.0);
        for r in res {
            max_res = max_res.max(r.abs() / scale);
        }
    }
    if max_gap > args.tol || max_res > args.tol {
        return Err(Error::Numerical(format!(
            "msp-check failed: max lemma gap {max_gap:.3e}, max residual {max_res:.3e} above {:.1e}",
            args.tol
        )));
    }
    Ok(format!(
        "msp-check: max lemma gap {max_gap:.3e}, max conservation residual {max_res:.3e} over {} trials (alpha={})",
        args.trials, args.alpha
    ))
}

fn run_noise_moments(args: &MomentArgs) -> Result<String> {
    let tau = args.tau;
    if !(tau > 0.0) {
        return Err(Error::Config("tau must be positive".into()));
    }
    let n = args.draws;
    let mut sampler = PathSampler::new(args.seed, 0, 1);
    let (mut s_bb, mut s_jj, mut s_bj) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let inc = sampler.sample(tau, true);
        let b = inc.db[0];
        let j = inc.j.as_ref().expect("sampled with J")[0];
        s_bb += b * b;
        s_jj += j * j;
        s_bj += b * j;
    }
    let nf = n as f64;
    let rows = [
        ("E[dB^2]", s_bb / nf, tau, (2.0f64).sqrt() * tau),
        ("E[J^2]", s_jj / nf, tau / 3.0, (2.0f64).sqrt() * tau / 3.0),
        (
            "E[dB*J]",
            s_bj / nf,
            tau / 2.0,
            (tau * tau / 3.0 + tau * tau / 4.0).sqrt(),
        ),
    ];
    let mut csv = format!("# command=noise-moments\n# tau={} draws={} seed={}\n", fmt_f64(tau), n, args.seed);
    csv.push_str("moment,empirical,theory,z_score\n");
    let mut parts = Vec::new();
    for (name, emp, theory, sd) in rows {
        let z = (emp - theory) / (sd / nf.sqrt());
        let _ = writeln!(
            csv,
            "{name},{},{},{}",
            fmt_f64(emp),
            fmt_f64(theory),
            fmt_f64(z)
        );
        parts.push(format!("{name}={emp:.6e} (theory {theory:.6e}, z={z:.2})"));
    }
    if let Some(dir) = &args.out_dir {
        write_file(&dir.display().to_string(), "noise_moments.csv", &csv)?;
    }
    Ok(format!("noise-moments: {}", parts.join(", ")))
}

fn dispatch(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Convergence1d(a) => run_convergence("convergence-1d", a, ModelKind::OneD),
        Command::Convergence2d(a) => run_convergence("convergence-2d", a, ModelKind::TwoD),
        Command::Energy1d(a) => run_energy("energy-1d", a, ModelKind::OneD),
        Command::Energy2d(a) => run_energy("energy-2d", a, ModelKind::TwoD),
        Command::TemporalOrder(a) => run_temporal_order(a),
        Command::MspCheck(a) => run_msp_check(a),
        Command::Showcase2d(a) => run_showcase(a),
        Command::NoiseMoments(a) => run_noise_moments(a),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArg(_) | Error::Dimension(_) | Error::Io(_) => 1,
        Error::Numerical(_) | Error::Singular(_) => 3,
    }
}

/// Parse argv, run the selected command, print its one-line summary, and
/// return the process exit status.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap reports its own usage/help text; exit 2 on misuse, 0 on --help
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_17_digits() {
        let s = fmt_f64(std::f64::consts::PI);
        assert!(s.starts_with("3.1415926535897931"), "{s}");
        let x = 0.12345678901234567;
        let parsed: f64 = fmt_f64(x).parse().unwrap();
        assert_eq!(parsed, x);
    }

    #[test]
    fn config_merge_rejects_unknown_fields() {
        let dir = std::env::temp_dir().join("mdg_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"no_such_field": 1}"#).unwrap();
        let err = merge_config(ExperimentConfig::default(), Some(&path)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let good = dir.join("good.json");
        std::fs::write(&good, r#"{"k": 2, "seed": 99}"#).unwrap();
        let cfg = merge_config(ExperimentConfig::default(), Some(&good)).unwrap();
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.alpha, 0.5);
    }

    #[test]
    fn stepper_and_noise_parsing() {
        assert!(parse_stepper("prk2").is_ok());
        assert!(parse_stepper("rk4").is_err());
        assert!(parse_noise("sine-product").is_ok());
        assert!(parse_noise("white").is_err());
    }
}
