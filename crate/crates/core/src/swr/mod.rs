//! Schwarz waveform relaxation with the bulk transmission condition.
//!
//! Iteration `k` solves the atmosphere over the whole window with
//!
//! ```text
//! nu_a phi_a^k(0) = alpha^{k-1} (theta U_a^k + (1 - theta) U_a^{k-1} - U_o^{k-1})
//! ```
//!
//! at the interface cells, then the ocean with the flux
//! `nu_o phi_o^k(0) = (rho_a / rho_o) nu_a phi_a^k(0)`. For the linearized
//! quadratic law the same step uses the linearized operator on deviations
//! from the stationary state.

mod noise;
mod spectral;

pub use noise::{WhiteNoise, ATMOSPHERE_STREAM, OCEAN_STREAM};
pub use spectral::{empirical_xi, EmpiricalXi, Taper};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::friction::FrictionLaw;
use crate::model::{GridSpec, PhysicalParams, Side, TimeSpec, C64};
use crate::solver::{solve_subdomain_window, CoupledTrajectory, InterfaceCondition, SubdomainState, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwrConfig {
    pub theta: f64,
    pub max_iters: usize,
    /// Relative stopping threshold: on `err_total / |U^ref|` when a reference
    /// is given, otherwise on the max-norm interface-trace change divided by
    /// the largest trace value.
    pub tol: f64,
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl Default for SwrConfig {
    fn default() -> Self {
        SwrConfig {
            theta: 1.0,
            max_iters: 50,
            tol: 1e-14,
            noise_amplitude: 1.0,
            seed: 0,
        }
    }
}

impl SwrConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be >= 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid("tol", "must be finite and > 0"));
        }
        if !(self.noise_amplitude.is_finite() && self.noise_amplitude >= 0.0) {
            return Err(invalid("noise_amplitude", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Interface-cell values `U_a(h_a/2, t^n)` and `U_o(-h_o/2, t^n)` for
/// levels `1..=n_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceTraces {
    pub atmosphere: Vec<C64>,
    pub ocean: Vec<C64>,
}

impl InterfaceTraces {
    pub fn constant(u_a: C64, u_o: C64, n_t: usize) -> Self {
        InterfaceTraces {
            atmosphere: vec![u_a; n_t],
            ocean: vec![u_o; n_t],
        }
    }

    pub fn from_trajectories(traj: &CoupledTrajectory) -> Self {
        InterfaceTraces {
            atmosphere: traj.atmosphere.interface_trace(),
            ocean: traj.ocean.interface_trace(),
        }
    }

    pub fn len(&self) -> usize {
        self.atmosphere.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atmosphere.is_empty()
    }

    pub fn side(&self, side: Side) -> &[C64] {
        match side {
            Side::Atmosphere => &self.atmosphere,
            Side::Ocean => &self.ocean,
        }
    }

    /// Largest pointwise difference over both traces.
    pub fn max_change(&self, other: &InterfaceTraces) -> f64 {
        self.atmosphere
            .iter()
            .zip(&other.atmosphere)
            .chain(self.ocean.iter().zip(&other.ocean))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.atmosphere.iter().chain(&self.ocean).map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise difference `self - other`.
    pub fn minus(&self, other: &InterfaceTraces) -> InterfaceTraces {
        let sub = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        InterfaceTraces {
            atmosphere: sub(&self.atmosphere, &other.atmosphere),
            ocean: sub(&self.ocean, &other.ocean),
        }
    }
}

/// First guess of the previous-iterate traces: `base` plus uniform complex
/// noise in `[-a, a]^2`, see [`WhiteNoise`].
pub fn make_initial_guess(base: &InterfaceTraces, noise_amplitude: f64, seed: u64) -> InterfaceTraces {
    let mut na = WhiteNoise::new(seed, ATMOSPHERE_STREAM, noise_amplitude);
    let mut no = WhiteNoise::new(seed, OCEAN_STREAM, noise_amplitude);
    InterfaceTraces {
        atmosphere: base.atmosphere.iter().map(|u| u + na.sample()).collect(),
        ocean: base.ocean.iter().map(|u| u + no.sample()).collect(),
    }
}

/// Weights `(w_a, w_o)` of the previous iterate in the explicit Robin data
/// `w_a U_a^{k-1} + w_o U_o^{k-1}` for the constant and quadratic laws.
pub fn explicit_weights(theta: f64) -> (f64, f64) {
    (1.0 - theta, -1.0)
}

/// Atmosphere interface condition for iteration `k` from the iterate `k - 1`.
pub fn robin_condition(friction: &FrictionLaw, theta: f64, previous: &InterfaceTraces) -> InterfaceCondition {
    let (w_a, w_o) = explicit_weights(theta);
    let pairs = previous.atmosphere.iter().zip(&previous.ocean);
    let (alpha, data): (Vec<f64>, Vec<C64>) = match *friction {
        FrictionLaw::LinearConstant { alpha_c } => pairs.map(|(a, o)| (alpha_c, w_a * a + w_o * o)).unzip(),
        FrictionLaw::Quadratic { c_d } => pairs.map(|(a, o)| (c_d * (a - o).norm(), w_a * a + w_o * o)).unzip(),
        FrictionLaw::LinearizedQuadratic(lp) => {
            let rot = lp.rotation();
            pairs
                .map(|(a, o)| {
                    let da = a - lp.u_a;
                    let d_o = o - lp.u_o;
                    // alpha^e (theta dU_a^k + rest) + F^e, with F^e = alpha^e dU^e
                    let rest = (1.5 - theta) * da - 1.5 * d_o + 0.5 * rot * (da - d_o).conj();
                    (lp.alpha_e, rest + lp.jump() - theta * lp.u_a)
                })
                .unzip()
        }
    };
    InterfaceCondition::RobinBulk { theta, alpha, data }
}

/// `sqrt(sum_n sum_m |u - v|^2 h dt)` over levels `1..=n_t`.
pub fn space_time_error(u: &Trajectory, reference: &Trajectory, h: f64, dt: f64) -> f64 {
    let s: f64 = u.states[1..]
        .iter()
        .zip(&reference.states[1..])
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()))
        .sum();
    (s * h * dt).sqrt()
}

pub fn space_time_norm(u: &Trajectory, h: f64, dt: f64) -> f64 {
    let s: f64 = u.states[1..].iter().flat_map(|a| a.iter().map(|x| x.norm_sqr())).sum();
    (s * h * dt).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub k: usize,
    pub err_atm: f64,
    pub err_oce: f64,
    pub err_total: f64,
    /// `err_total(k) / err_total(k - 1)`, absent for `k = 1`.
    pub ratio: Option<f64>,
    /// Max-norm change of the interface traces against iterate `k - 1`.
    pub interface_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    /// Supplied by the caller (normally the monolithic solve).
    Provided,
    /// Final iterate of a converged run with the same configuration.
    ConvergedSwr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<IterationRow>,
    pub friction: String,
    pub theta: f64,
    pub seed: u64,
    pub noise_amplitude: f64,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub reference: ReferenceKind,
    /// Space-time norm of the reference over both subdomains.
    pub reference_norm: f64,
    pub converged: bool,
    pub diverged: bool,
}

impl ConvergenceReport {
    pub fn iterations(&self) -> usize {
        self.rows.len()
    }

    /// First iteration with `err_total <= threshold * reference_norm`.
    pub fn iterations_to_relative(&self, threshold: f64) -> Option<usize> {
        self.iterations_to(threshold * self.reference_norm)
    }

    /// First iteration with `err_total <= threshold`.
    pub fn iterations_to(&self, threshold: f64) -> Option<usize> {
        self.rows.iter().find(|r| r.err_total <= threshold).map(|r| r.k)
    }
}

#[derive(Debug, Clone)]
pub struct SwrOutcome {
    pub report: ConvergenceReport,
    /// Last iterate.
    pub solution: CoupledTrajectory,
    /// Interface traces; entry 0 is the noisy first guess, entry `k` iterate `k`.
    pub history: Vec<InterfaceTraces>,
}

struct Iterate {
    trajectory: CoupledTrajectory,
    traces: InterfaceTraces,
}

/// One Schwarz iteration: atmosphere with the bulk Robin condition, then the
/// ocean with the density-scaled flux.
pub fn swr_iteration(
    params: &PhysicalParams,
    grid: &GridSpec,
    time: &TimeSpec,
    friction: &FrictionLaw,
    theta: f64,
    initial: (&SubdomainState, &SubdomainState),
    previous: &InterfaceTraces,
) -> Result<CoupledTrajectory> {
    let cond = robin_condition(friction, theta, previous);
    let atmosphere = solve_subdomain_window(initial.0, &cond, params, grid, time)?;
    let eps = params.epsilon();
    let ocean_flux: Vec<C64> = atmosphere.interface_flux.iter().map(|f| eps * f).collect();
    let ocean = solve_subdomain_window(initial.1, &InterfaceCondition::PrescribedFlux(ocean_flux), params, grid, time)?;

    for (fa, fo) in atmosphere.interface_flux.iter().zip(&ocean.interface_flux) {
        let (lhs, rhs) = (params.rho_o * fo, params.rho_a * fa);
        assert!(
            (lhs - rhs).norm() <= 8.0 * f64::EPSILON * rhs.norm(),
            "flux continuity violated: {lhs} vs {rhs}"
        );
    }
    Ok(CoupledTrajectory { atmosphere, ocean })
}

fn iterate<F>(
    params: &PhysicalParams,
    grid: &GridSpec,
    time: &TimeSpec,
    friction: &FrictionLaw,
    config: &SwrConfig,
    initial: (&SubdomainState, &SubdomainState),
    mut after: F,
) -> Result<(Iterate, Vec<InterfaceTraces>)>
where
    F: FnMut(usize, &Iterate, f64) -> Result<bool>,
{
    let base = InterfaceTraces::constant(initial.0.interface_value(), initial.1.interface_value(), time.n_t);
    let mut history = vec![make_initial_guess(&base, config.noise_amplitude, config.seed)];
    let mut last = None;
    for k in 1..=config.max_iters {
        let previous = history.last().expect("history starts with the first guess");
        let trajectory = swr_iteration(params, grid, time, friction, config.theta, initial, previous)?;
        let traces = InterfaceTraces::from_trajectories(&trajectory);
        if !traces.atmosphere.iter().chain(&traces.ocean).all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("interface traces at iteration {k}")));
        }
        let change = traces.max_change(previous);
        let it = Iterate { trajectory, traces };
        let stop = after(k, &it, change)?;
        history.push(it.traces.clone());
        last = Some(it);
        if stop {
            break;
        }
    }
    Ok((last.expect("max_iters >= 1"), history))
}

/// Runs the Schwarz iteration from a noisy first guess around the interface
/// values of `initial`.
///
/// With a `reference`, errors are measured against it and the run stops once
/// `err_total <= tol * |U^ref|`. Without one, the run first iterates until the
/// relative interface-trace change is at most `tol`, then repeats the
/// identical iteration measuring errors against that final iterate.
pub fn run_swr(
    params: &PhysicalParams,
    grid: &GridSpec,
    time: &TimeSpec,
    friction: &FrictionLaw,
    config: &SwrConfig,
    initial: (&SubdomainState, &SubdomainState),
    reference: Option<&CoupledTrajectory>,
) -> Result<SwrOutcome> {
    config.validate()?;
    params.validate()?;
    initial.0.check(grid)?;
    initial.1.check(grid)?;
    if initial.0.side != Side::Atmosphere || initial.1.side != Side::Ocean {
        return Err(invalid("initial", "expected (atmosphere, ocean) states"));
    }

    let (reference_owned, kind, max_iters, converged_pass1) = match reference {
        Some(r) => {
            for side in [Side::Atmosphere, Side::Ocean] {
                let t = r.side(side);
                if t.states.len() != time.n_t + 1 {
                    return Err(Error::LengthMismatch {
                        expected: time.n_t + 1,
                        found: t.states.len(),
                    });
                }
            }
            (None, ReferenceKind::Provided, config.max_iters, false)
        }
        None => {
            let mut done = false;
            let (last, history) = iterate(params, grid, time, friction, config, initial, |_, it, change| {
                done = change <= config.tol * it.traces.max_abs();
                Ok(done)
            })?;
            (Some(last.trajectory), ReferenceKind::ConvergedSwr, history.len() - 1, done)
        }
    };
    let reference = reference.or(reference_owned.as_ref()).expect("reference available");

    let (h_a, h_o, dt) = (grid.h_a, grid.h_o, time.dt);
    let mut rows: Vec<IterationRow> = Vec::new();
    let mut converged = converged_pass1;
    let reference_norm = space_time_norm(&reference.atmosphere, h_a, dt).hypot(space_time_norm(&reference.ocean, h_o, dt));
    let cfg = SwrConfig { max_iters, ..*config };
    let (last, history) = iterate(params, grid, time, friction, &cfg, initial, |k, it, change| {
        let err_atm = space_time_error(&it.trajectory.atmosphere, &reference.atmosphere, h_a, dt);
        let err_oce = space_time_error(&it.trajectory.ocean, &reference.ocean, h_o, dt);
        let err_total = err_atm.hypot(err_oce);
        if !err_total.is_finite() {
            return Err(Error::NonFinite(format!("error norm at iteration {k}")));
        }
        let ratio = rows.last().map(|r: &IterationRow| err_total / r.err_total);
        rows.push(IterationRow {
            k,
            err_atm,
            err_oce,
            err_total,
            ratio,
            interface_change: change,
        });
        if kind == ReferenceKind::Provided && err_total <= config.tol * reference_norm {
            converged = true;
            return Ok(true);
        }
        Ok(false)
    })?;

    let diverged = !converged && rows.len() > 1 && rows.last().unwrap().err_total > rows[0].err_total;
    Ok(SwrOutcome {
        report: ConvergenceReport {
            rows,
            friction: friction.name().to_string(),
            theta: config.theta,
            seed: config.seed,
            noise_amplitude: config.noise_amplitude,
            grid: *grid,
            time: *time,
            reference: kind,
            reference_norm,
            converged,
            diverged,
        },
        solution: last.trajectory,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{compute_equilibrium, solve_monolithic, PicardOptions};

    #[test]
    fn zero_noise_first_guess_is_base() {
        let base = InterfaceTraces::constant(C64::new(9.0, -1.0), C64::new(0.1, 0.02), 20);
        assert_eq!(make_initial_guess(&base, 0.0, 3), base);
        let a = make_initial_guess(&base, 1.0, 42);
        let b = make_initial_guess(&base, 1.0, 42);
        assert_eq!(a, b);
        assert_ne!(a, make_initial_guess(&base, 1.0, 43));
    }

    #[test]
    fn theta_one_drops_previous_atmosphere() {
        let (w_a, w_o) = explicit_weights(1.0);
        assert_eq!(w_a, 0.0);
        assert_eq!(w_o, -1.0);
        let prev = InterfaceTraces {
            atmosphere: vec![C64::new(123.0, 4.0); 3],
            ocean: vec![C64::new(0.5, 0.0); 3],
        };
        match robin_condition(&FrictionLaw::LinearConstant { alpha_c: 2e-3 }, 1.0, &prev) {
            InterfaceCondition::RobinBulk { data, alpha, .. } => {
                assert!(data.iter().all(|d| *d == C64::new(-0.5, 0.0)));
                assert!(alpha.iter().all(|a| *a == 2e-3));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn linearized_condition_at_equilibrium_reproduces_flux() {
        let lp = crate::friction::LinearizationPoint::new(C64::new(8.0, 2.0), C64::new(0.1, 0.0), 1.2e-3).unwrap();
        let prev = InterfaceTraces::constant(lp.u_a, lp.u_o, 4);
        let cond = robin_condition(&FrictionLaw::LinearizedQuadratic(lp), 1.3, &prev);
        let lvl = cond.at(1);
        match lvl {
            crate::solver::LevelCondition::Robin { theta, alpha, data } => {
                let flux = alpha * (theta * lp.u_a + data);
                assert!((flux - lp.flux()).norm() < 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn fixed_point_at_reference() {
        let params = PhysicalParams::reference();
        let grid = GridSpec::new(20.0, 2.0, 20, 50).unwrap();
        let time = TimeSpec::new(60.0, 100).unwrap();
        let picard = PicardOptions::default();
        let quad = FrictionLaw::Quadratic { c_d: params.c_d };
        let eq = compute_equilibrium(&params, &grid, &quad, &picard).unwrap();
        let lin = FrictionLaw::LinearizedQuadratic(eq.linearization_point());
        let cfg = SwrConfig {
            noise_amplitude: 0.0,
            tol: 1e-11,
            ..Default::default()
        };
        for law in [FrictionLaw::linear(eq.alpha_e).unwrap(), quad, lin] {
            for theta in [0.0, 0.5, 1.0, 1.5] {
                let reference = solve_monolithic(&params, &grid, &time, &law, (&eq.atmosphere, &eq.ocean), &picard).unwrap();
                let cfg = SwrConfig { theta, ..cfg };
                let out = run_swr(&params, &grid, &time, &law, &cfg, (&eq.atmosphere, &eq.ocean), Some(&reference)).unwrap();
                assert_eq!(out.report.rows.len(), 1, "{} theta={theta}", law.name());
                let rel = out.report.rows[0].err_total / out.report.reference_norm;
                assert!(rel <= 1e-11, "{rel}");
                assert!(out.report.converged);
            }
        }
    }
}
