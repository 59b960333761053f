//! Experiment drivers behind the subcommands.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use airsea_swr::analysis::{xi0_linear, xi0_quadratic, xi_sweep, FrequencySweep, XiFamily};
use airsea_swr::solver::{compute_equilibrium, PicardOptions};
use airsea_swr::swr::{empirical_xi, ConvergenceReport, InterfaceTraces, SwrConfig, SwrOutcome, Taper};
use airsea_swr::{FrictionLaw, GridSpec, LawKind, PhysicalParams, Scenario, Side, TimeSpec};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{num, opt_num, write_csv, write_json};

pub type AppResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

pub const THREADS_ENV: &str = "SWR_AIRSEA_THREADS";

/// Worker count from `SWR_AIRSEA_THREADS`, defaulting to one.
pub fn threads_from_env() -> AppResult<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`").into()),
        },
    }
}

/// Runs `job` over `items` on up to `threads` workers, keeping input order.
pub fn parallel_map<T, R, F>(items: &[T], threads: usize, job: F) -> AppResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> AppResult<R> + Sync,
{
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<AppResult<R>>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = job(item);
                slots.lock().expect("result slots")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots")
        .into_iter()
        .map(|r| r.expect("every item processed"))
        .collect()
}

/// `stem.ext` for a single theta, `stem_theta<theta>.ext` otherwise.
pub fn output_name(stem: &str, ext: &str, theta: f64, many: bool) -> String {
    if many {
        format!("{stem}_theta{}.{ext}", num(theta))
    } else {
        format!("{stem}.{ext}")
    }
}

pub fn check_thetas(thetas: &[f64]) -> AppResult<()> {
    if thetas.is_empty() {
        return Err("theta list is empty".into());
    }
    if let Some(t) = thetas.iter().find(|t| !t.is_finite()) {
        return Err(format!("theta must be finite, got {t}").into());
    }
    Ok(())
}

fn scenario(cfg: &ExperimentConfig) -> AppResult<Scenario> {
    Ok(Scenario::new(cfg.params, cfg.grid, cfg.time)?)
}

pub struct EquilibriumSummary {
    pub alpha_e: f64,
    pub rows: usize,
    pub path: PathBuf,
}

pub fn equilibrium(cfg: &ExperimentConfig, out_dir: &Path) -> AppResult<EquilibriumSummary> {
    let s = scenario(cfg)?;
    let eq = &s.equilibrium;
    let mut rows = Vec::with_capacity(cfg.grid.n_o + cfg.grid.n_a);
    for m in (0..cfg.grid.n_o).rev() {
        let u = eq.ocean.u[m];
        rows.push(vec!["ocean".into(), num(cfg.grid.center(Side::Ocean, m)), num(u.re), num(u.im)]);
    }
    for m in 0..cfg.grid.n_a {
        let u = eq.atmosphere.u[m];
        rows.push(vec!["atmosphere".into(), num(cfg.grid.center(Side::Atmosphere, m)), num(u.re), num(u.im)]);
    }
    let path = out_dir.join("equilibrium.csv");
    let n = rows.len();
    write_csv(&path, &["domain", "z", "u", "v"], rows)?;
    Ok(EquilibriumSummary {
        alpha_e: eq.alpha_e,
        rows: n,
        path,
    })
}

pub struct SweepSummary {
    pub rows: usize,
    pub skipped: usize,
    pub alpha_c: f64,
    pub path: PathBuf,
}

/// Linear coefficient for the analysis: the configured one or `alpha^e`.
fn analysis_alpha(cfg: &ExperimentConfig) -> AppResult<f64> {
    match cfg.alpha_c {
        Some(a) => Ok(a),
        None => {
            let law = FrictionLaw::Quadratic { c_d: cfg.params.c_d };
            Ok(compute_equilibrium(&cfg.params, &cfg.grid, &law, &PicardOptions::default())?.alpha_e)
        }
    }
}

pub fn xi_sweep_cmd(cfg: &ExperimentConfig, thetas: &[f64], sweep: &FrequencySweep, out_dir: &Path) -> AppResult<SweepSummary> {
    check_thetas(thetas)?;
    let alpha_c = analysis_alpha(cfg)?;
    let (eps, nu_a, nu_o) = (cfg.params.epsilon(), cfg.params.nu_a, cfg.params.nu_o);
    let shifts = sweep.shifts();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for &theta in thetas {
        let family = XiFamily::new(cfg.params, cfg.grid, theta, alpha_c)?;
        let table = xi_sweep(&family, &shifts, Some(&cfg.time))?;
        skipped += table.skipped;
        let xi0 = xi0_linear(theta, eps, nu_a, nu_o).ok();
        let xi0q = xi0_quadratic(theta, eps, nu_a, nu_o).ok();
        for r in table.rows {
            rows.push(vec![
                num(theta),
                num(r.omega),
                num(r.xi_linear),
                num(r.xi_dnwr),
                opt_num(xi0),
                opt_num(xi0q),
            ]);
        }
    }
    let path = out_dir.join("xi_sweep.csv");
    let n = rows.len();
    write_csv(
        &path,
        &["theta", "omega", "xi_linear", "xi_dnwr", "xi0_linear", "xi0_quadratic"],
        rows,
    )?;
    Ok(SweepSummary {
        rows: n,
        skipped,
        alpha_c,
        path,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub theta: f64,
    pub friction: LawKind,
    /// Low-frequency factor of the configured law; absent for `theta = 0`.
    pub xi0_predicted: Option<f64>,
    pub diverged: bool,
    pub converged: bool,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub noise_amplitude: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub alpha_e: f64,
    pub alpha_c: Option<f64>,
    pub reference: &'static str,
    pub reference_norm: f64,
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub time: TimeSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralOptions {
    /// Iteration `k` whose error trace is compared with iterate `k - 1`.
    pub iteration: usize,
    pub taper: Taper,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            iteration: 2,
            taper: Taper::Hann,
        }
    }
}

pub struct RunSummary {
    pub theta: f64,
    pub metadata: RunMetadata,
    pub errors_path: PathBuf,
    pub spectral_path: Option<PathBuf>,
}

fn predicted_xi0(kind: LawKind, theta: f64, params: &PhysicalParams) -> Option<f64> {
    let (eps, nu_a, nu_o) = (params.epsilon(), params.nu_a, params.nu_o);
    match kind {
        LawKind::Linear => xi0_linear(theta, eps, nu_a, nu_o).ok(),
        LawKind::Quadratic | LawKind::Linearized => xi0_quadratic(theta, eps, nu_a, nu_o).ok(),
    }
}

fn metadata(cfg: &ExperimentConfig, s: &Scenario, kind: LawKind, report: &ConvergenceReport, wall_seconds: f64) -> RunMetadata {
    RunMetadata {
        seed: report.seed,
        theta: report.theta,
        friction: kind,
        xi0_predicted: predicted_xi0(kind, report.theta, &cfg.params),
        diverged: report.diverged,
        converged: report.converged,
        iterations: report.iterations(),
        wall_seconds,
        noise_amplitude: report.noise_amplitude,
        tol: cfg.swr.tol,
        max_iters: cfg.swr.max_iters,
        alpha_e: s.equilibrium.alpha_e,
        alpha_c: (kind == LawKind::Linear).then(|| cfg.alpha_c.unwrap_or(s.equilibrium.alpha_e)),
        reference: "monolithic",
        reference_norm: report.reference_norm,
        params: cfg.params,
        grid: cfg.grid,
        time: cfg.time,
    }
}

fn error_rows(report: &ConvergenceReport) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                num(r.err_atm),
                num(r.err_oce),
                num(r.err_total),
                opt_num(r.ratio),
            ]
        })
        .collect()
}

fn spectral_rows(
    cfg: &ExperimentConfig,
    out: &SwrOutcome,
    reference: &InterfaceTraces,
    alpha_c: f64,
    opts: SpectralOptions,
) -> AppResult<Option<Vec<Vec<String>>>> {
    let k = opts.iteration;
    if k == 0 || k >= out.history.len() {
        return Ok(None);
    }
    let prev = out.history[k - 1].minus(reference);
    let cur = out.history[k].minus(reference);
    let family = XiFamily::new(cfg.params, cfg.grid, out.report.theta, alpha_c)?;
    let mut rows = Vec::new();
    for r in empirical_xi(&prev.atmosphere, &cur.atmosphere, cfg.time.dt, opts.taper)? {
        let predicted = family.xi_at_shift(r.omega + cfg.params.f).ok();
        rows.push(vec![num(r.omega), num(r.ratio), opt_num(predicted)]);
    }
    Ok(Some(rows))
}

pub fn swr_run(
    cfg: &ExperimentConfig,
    thetas: &[f64],
    spectral: SpectralOptions,
    threads: usize,
    out_dir: &Path,
) -> AppResult<Vec<RunSummary>> {
    check_thetas(thetas)?;
    let s = scenario(cfg)?;
    let law = s.law(cfg.friction, cfg.alpha_c)?;
    let reference = s.monolithic(&law)?;
    let ref_traces = InterfaceTraces::from_trajectories(&reference);
    let many = thetas.len() > 1;
    parallel_map(thetas, threads, |&theta| {
        let start = Instant::now();
        let config = SwrConfig { theta, ..cfg.swr };
        let out = s.run(&law, &config, Some(&reference))?;
        let wall = start.elapsed().as_secs_f64();
        let meta = metadata(cfg, &s, cfg.friction, &out.report, wall);

        let errors_path = out_dir.join(output_name("errors", "csv", theta, many));
        write_csv(
            &errors_path,
            &["iteration", "err_atm", "err_oce", "err_total", "ratio"],
            error_rows(&out.report),
        )?;
        write_json(&out_dir.join(output_name("errors", "json", theta, many)), &meta)?;

        let mut spectral_path = None;
        if let FrictionLaw::LinearConstant { alpha_c } = law {
            if let Some(rows) = spectral_rows(cfg, &out, &ref_traces, alpha_c, spectral)? {
                let p = out_dir.join(output_name("empirical_xi", "csv", theta, many));
                write_csv(&p, &["omega", "ratio", "predicted_xi"], rows)?;
                spectral_path = Some(p);
            }
        }
        Ok(RunSummary {
            theta,
            metadata: meta,
            errors_path,
            spectral_path,
        })
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareMetadata {
    pub seed: u64,
    pub theta: f64,
    pub noise_amplitude: f64,
    pub nonlinear: RunMetadata,
    pub linearized: RunMetadata,
}

pub struct CompareSummary {
    pub theta: f64,
    pub metadata: CompareMetadata,
    pub path: PathBuf,
}

pub fn compare(cfg: &ExperimentConfig, thetas: &[f64], threads: usize, out_dir: &Path) -> AppResult<Vec<CompareSummary>> {
    check_thetas(thetas)?;
    let s = scenario(cfg)?;
    let nl = s.law(LawKind::Quadratic, None)?;
    let lin = s.law(LawKind::Linearized, None)?;
    let ref_nl = s.monolithic(&nl)?;
    let ref_lin = s.monolithic(&lin)?;
    let many = thetas.len() > 1;
    parallel_map(thetas, threads, |&theta| {
        let config = SwrConfig { theta, ..cfg.swr };
        let timed = |law: &FrictionLaw, reference| -> AppResult<(ConvergenceReport, f64)> {
            let start = Instant::now();
            let out = s.run(law, &config, Some(reference))?;
            Ok((out.report, start.elapsed().as_secs_f64()))
        };
        let (a, ta) = timed(&nl, &ref_nl)?;
        let (b, tb) = timed(&lin, &ref_lin)?;
        let n = a.rows.len().max(b.rows.len());
        let rows = (0..n).map(|i| {
            vec![
                (i + 1).to_string(),
                opt_num(a.rows.get(i).map(|r| r.err_total)),
                opt_num(b.rows.get(i).map(|r| r.err_total)),
            ]
        });
        let path = out_dir.join(output_name("compare", "csv", theta, many));
        write_csv(&path, &["iteration", "err_nl", "err_lin"], rows)?;
        let meta = CompareMetadata {
            seed: config.seed,
            theta,
            noise_amplitude: config.noise_amplitude,
            nonlinear: metadata(cfg, &s, LawKind::Quadratic, &a, ta),
            linearized: metadata(cfg, &s, LawKind::Linearized, &b, tb),
        };
        write_json(&out_dir.join(output_name("compare", "json", theta, many)), &meta)?;
        Ok(CompareSummary {
            theta,
            metadata: meta,
            path,
        })
    })
}
