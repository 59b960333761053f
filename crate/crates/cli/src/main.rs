use std::path::PathBuf;
use std::process::ExitCode;

use airsea_swr::analysis::FrequencySweep;
use airsea_swr::swr::Taper;
use airsea_swr::LawKind;
use airsea_swr_cli::commands::{self, AppResult, SpectralOptions};
use airsea_swr_cli::config::ExperimentConfig;
use airsea_swr_cli::output::num;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Schwarz waveform relaxation experiments for a coupled ocean-atmosphere column.
#[derive(Parser, Debug)]
#[command(name = "airsea-swr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving the output files (created if missing).
    #[arg(long, default_value = ".", global = true)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct Overrides {
    /// Comma-separated relaxation parameters; defaults to the configured theta.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    theta: Option<Vec<f64>>,
    /// First-guess noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// First-guess noise amplitude (m/s).
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stationary coupled state: writes equilibrium.csv and prints alpha^e.
    Equilibrium {
        #[command(flatten)]
        common: Common,
    },
    /// Convergence factors over a log-spaced grid of omega + f: writes xi_sweep.csv.
    XiSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated relaxation parameters.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
        theta: Vec<f64>,
        /// Smallest omega + f (1/s).
        #[arg(long, default_value_t = 1e-10)]
        omega_min: f64,
        /// Largest omega + f (1/s).
        #[arg(long, default_value_t = 1e2)]
        omega_max: f64,
        #[arg(long, default_value_t = 200)]
        omega_points: usize,
    },
    /// Iterative coupling run against the monolithic solution: writes errors.csv and errors.json.
    SwrRun {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum)]
        friction: Option<Friction>,
        /// Iteration whose interface error spectrum is compared with the previous one.
        #[arg(long, default_value_t = 2)]
        xi_iteration: usize,
        /// Window applied before the transform.
        #[arg(long, value_enum, default_value = "hann")]
        taper: TaperArg,
    },
    /// Quadratic and linearized laws side by side: writes compare.csv and compare.json.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Friction {
    Linear,
    Quadratic,
    Linearized,
}

impl From<Friction> for LawKind {
    fn from(f: Friction) -> Self {
        match f {
            Friction::Linear => LawKind::Linear,
            Friction::Quadratic => LawKind::Quadratic,
            Friction::Linearized => LawKind::Linearized,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaperArg {
    Hann,
    Rectangular,
}

fn load(common: &Common) -> AppResult<ExperimentConfig> {
    let cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    std::fs::create_dir_all(&common.out_dir).map_err(|e| format!("cannot create {}: {e}", common.out_dir.display()))?;
    Ok(cfg)
}

fn apply(cfg: &mut ExperimentConfig, o: &Overrides) -> AppResult<Vec<f64>> {
    if let Some(seed) = o.seed {
        cfg.swr.seed = seed;
    }
    if let Some(iters) = o.iters {
        cfg.swr.max_iters = iters;
    }
    if let Some(noise) = o.noise {
        cfg.swr.noise_amplitude = noise;
    }
    cfg.swr.validate()?;
    let thetas = o.theta.clone().unwrap_or_else(|| vec![cfg.swr.theta]);
    commands::check_thetas(&thetas)?;
    Ok(thetas)
}

fn run(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Equilibrium { common } => {
            let cfg = load(&common)?;
            let s = commands::equilibrium(&cfg, &common.out_dir)?;
            println!("alpha_e = {}", num(s.alpha_e));
            println!("wrote {} ({} rows)", s.path.display(), s.rows);
        }
        Command::XiSweep {
            common,
            theta,
            omega_min,
            omega_max,
            omega_points,
        } => {
            let cfg = load(&common)?;
            let sweep = FrequencySweep::new(omega_min, omega_max, omega_points)?;
            let s = commands::xi_sweep_cmd(&cfg, &theta, &sweep, &common.out_dir)?;
            println!("alpha_c = {}", num(s.alpha_c));
            println!("wrote {} ({} rows, {} degenerate frequencies skipped)", s.path.display(), s.rows, s.skipped);
        }
        Command::SwrRun {
            common,
            overrides,
            friction,
            xi_iteration,
            taper,
        } => {
            let mut cfg = load(&common)?;
            if let Some(f) = friction {
                cfg.friction = f.into();
            }
            let thetas = apply(&mut cfg, &overrides)?;
            let spectral = SpectralOptions {
                iteration: xi_iteration,
                taper: match taper {
                    TaperArg::Hann => Taper::Hann,
                    TaperArg::Rectangular => Taper::Rectangular,
                },
            };
            let threads = commands::threads_from_env()?;
            for s in commands::swr_run(&cfg, &thetas, spectral, threads, &common.out_dir)? {
                let m = &s.metadata;
                let last = m.iterations;
                println!(
                    "{} theta={}: {} iterations, converged={}, diverged={}, {:.2}s -> {}",
                    m.friction,
                    num(s.theta),
                    last,
                    m.converged,
                    m.diverged,
                    m.wall_seconds,
                    s.errors_path.display()
                );
                if let Some(p) = s.spectral_path {
                    println!("wrote {}", p.display());
                }
            }
        }
        Command::Compare { common, overrides } => {
            let mut cfg = load(&common)?;
            let thetas = apply(&mut cfg, &overrides)?;
            let threads = commands::threads_from_env()?;
            for s in commands::compare(&cfg, &thetas, threads, &common.out_dir)? {
                let m = &s.metadata;
                println!(
                    "theta={}: nonlinear {} iterations, linearized {} iterations -> {}",
                    num(s.theta),
                    m.nonlinear.iterations,
                    m.linearized.iterations,
                    s.path.display()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
