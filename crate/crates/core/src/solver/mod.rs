//! Backward-Euler finite-difference solvers for the rotating diffusion
//! problem on each side of the interface.
//!
//! Each cell obeys
//!
//! ```text
//! (1/dt + i f) U_m^{n+1} - (nu phi_{top} - nu phi_{bottom}) / h = g + U_m^n / dt
//! ```
//!
//! with `phi` the centered difference across a face. The outer face carries
//! the Dirichlet value through the ghost reflection `U_ghost = 2 U^inf - U_{n-1}`;
//! the interface face flux `nu_j phi_j(0)` comes from an [`InterfaceCondition`].

mod monolithic;
pub mod tridiag;

pub use monolithic::{
    compute_equilibrium, solve_monolithic, stationary_residual, CoupledTrajectory, Equilibrium, PicardOptions,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{GridSpec, PhysicalParams, Side, TimeSpec, C64};

/// Cell-center velocities of one subdomain; index 0 touches the interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdomainState {
    pub side: Side,
    pub u: Vec<C64>,
}

impl SubdomainState {
    pub fn new(side: Side, u: Vec<C64>, grid: &GridSpec) -> Result<Self> {
        let s = SubdomainState { side, u };
        s.check(grid)?;
        Ok(s)
    }

    pub fn zeros(side: Side, grid: &GridSpec) -> Self {
        SubdomainState {
            side,
            u: vec![C64::new(0.0, 0.0); grid.n(side)],
        }
    }

    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        let n = grid.n(self.side);
        if self.u.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: self.u.len(),
            });
        }
        if !self.u.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("{} state", self.side.name())));
        }
        Ok(())
    }

    /// Value in the cell adjacent to the interface, `U_j(±h_j/2)`.
    pub fn interface_value(&self) -> C64 {
        self.u[0]
    }
}

/// Time history of one subdomain over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub side: Side,
    /// Levels `0..=n_t`; level 0 is the initial condition.
    pub states: Vec<Vec<C64>>,
    /// `nu_j phi_j(0, t^n)` for levels `1..=n_t` (entry `n - 1`).
    pub interface_flux: Vec<C64>,
}

impl Trajectory {
    pub fn n_steps(&self) -> usize {
        self.interface_flux.len()
    }

    /// Interface-cell values at levels `1..=n_t`.
    pub fn interface_trace(&self) -> Vec<C64> {
        self.states[1..].iter().map(|u| u[0]).collect()
    }

    pub fn final_state(&self) -> SubdomainState {
        SubdomainState {
            side: self.side,
            u: self.states.last().expect("trajectory has level 0").clone(),
        }
    }
}

/// Interface condition applied at a single time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelCondition {
    /// `nu_j phi_j(0) = flux`
    Flux(C64),
    /// `nu_a phi_a(0) = alpha (theta U_a(h_a/2) + data)`
    Robin { theta: f64, alpha: f64, data: C64 },
}

/// Interface condition over a time window, one entry per level `1..=n_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum InterfaceCondition {
    PrescribedFlux(Vec<C64>),
    RobinBulk { theta: f64, alpha: Vec<f64>, data: Vec<C64> },
}

impl InterfaceCondition {
    pub fn len(&self) -> usize {
        match self {
            InterfaceCondition::PrescribedFlux(t) => t.len(),
            InterfaceCondition::RobinBulk { data, .. } => data.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self, side: Side, n_t: usize) -> Result<()> {
        if let InterfaceCondition::RobinBulk { theta, alpha, data } = self {
            if side != Side::Atmosphere {
                return Err(invalid("interface condition", "the bulk Robin condition applies to the atmosphere"));
            }
            if alpha.len() != data.len() {
                return Err(Error::LengthMismatch {
                    expected: data.len(),
                    found: alpha.len(),
                });
            }
            if !theta.is_finite() {
                return Err(invalid("theta", "must be finite"));
            }
            if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
                return Err(invalid("alpha", format!("must be finite and >= 0, got {a}")));
            }
        }
        if self.len() != n_t {
            return Err(Error::LengthMismatch {
                expected: n_t,
                found: self.len(),
            });
        }
        Ok(())
    }

    /// Condition at level `n` (1-based).
    pub fn at(&self, n: usize) -> LevelCondition {
        match self {
            InterfaceCondition::PrescribedFlux(t) => LevelCondition::Flux(t[n - 1]),
            InterfaceCondition::RobinBulk { theta, alpha, data } => LevelCondition::Robin {
                theta: *theta,
                alpha: alpha[n - 1],
                data: data[n - 1],
            },
        }
    }
}

/// Tridiagonal system `sigma U - D(U) = rhs` for one column, interface row first.
pub(crate) struct Column {
    pub lower: Vec<C64>,
    pub diag: Vec<C64>,
    pub upper: Vec<C64>,
    pub rhs: Vec<C64>,
}

impl Column {
    /// Assembles everything except the interface-face flux. `previous` is
    /// `Some((U^n, dt))` for a time step and `None` for the stationary problem.
    pub fn assemble(side: Side, params: &PhysicalParams, grid: &GridSpec, previous: Option<(&[C64], f64)>) -> Self {
        let n = grid.n(side);
        let h = grid.h(side);
        let kappa = params.nu(side) / (h * h);
        let g = params.forcing(side);
        let rotation = C64::new(0.0, params.f);
        let sigma = match previous {
            Some((_, dt)) => rotation + 1.0 / dt,
            None => rotation,
        };
        let k = C64::from(kappa);
        let mut lower = vec![-k; n];
        let mut upper = vec![-k; n];
        let mut diag = vec![sigma + 2.0 * kappa; n];
        let mut rhs = vec![g; n];
        lower[0] = C64::new(0.0, 0.0);
        upper[n - 1] = C64::new(0.0, 0.0);
        diag[0] = sigma + kappa;
        diag[n - 1] = sigma + 3.0 * kappa;
        rhs[n - 1] += 2.0 * kappa * params.u_inf(side);
        if let Some((u, dt)) = previous {
            for (r, v) in rhs.iter_mut().zip(u) {
                *r += v / dt;
            }
        }
        Column { lower, diag, upper, rhs }
    }

    /// Adds the interface flux `F = a U_0 + b` to the first row.
    ///
    /// The atmosphere loses `F / h_a` through its lower face and the ocean
    /// gains `F / h_o` through its upper face.
    pub fn add_interface_flux(&mut self, side: Side, h: f64, a: f64, b: C64) {
        match side {
            Side::Atmosphere => {
                self.diag[0] += a / h;
                self.rhs[0] -= b / h;
            }
            Side::Ocean => {
                self.diag[0] -= a / h;
                self.rhs[0] += b / h;
            }
        }
    }

    pub fn solve(mut self) -> Result<Vec<C64>> {
        tridiag::solve_in_place(&self.lower, &mut self.diag, &self.upper, &mut self.rhs)?;
        Ok(self.rhs)
    }
}

fn level_flux(cond: LevelCondition, u0: C64) -> C64 {
    match cond {
        LevelCondition::Flux(f) => f,
        LevelCondition::Robin { theta, alpha, data } => alpha * (theta * u0 + data),
    }
}

fn step_with_flux(
    state: &SubdomainState,
    cond: LevelCondition,
    params: &PhysicalParams,
    grid: &GridSpec,
    dt: f64,
) -> Result<(Vec<C64>, C64)> {
    let side = state.side;
    let h = grid.h(side);
    let mut col = Column::assemble(side, params, grid, Some((&state.u, dt)));
    match cond {
        LevelCondition::Flux(flux) => col.add_interface_flux(side, h, 0.0, flux),
        LevelCondition::Robin { theta, alpha, data } => {
            if side != Side::Atmosphere {
                return Err(invalid("interface condition", "the bulk Robin condition applies to the atmosphere"));
            }
            col.add_interface_flux(side, h, alpha * theta, alpha * data);
        }
    }
    let u = col.solve()?;
    if !u.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite(format!("{} step", side.name())));
    }
    let flux = level_flux(cond, u[0]);
    Ok((u, flux))
}

/// Advances one subdomain by one backward-Euler step.
pub fn step_subdomain(
    state: &SubdomainState,
    cond: LevelCondition,
    params: &PhysicalParams,
    grid: &GridSpec,
    dt: f64,
) -> Result<SubdomainState> {
    state.check(grid)?;
    let (u, _) = step_with_flux(state, cond, params, grid, dt)?;
    Ok(SubdomainState { side: state.side, u })
}

/// Runs one subdomain over the whole window under `cond`.
pub fn solve_subdomain_window(
    initial: &SubdomainState,
    cond: &InterfaceCondition,
    params: &PhysicalParams,
    grid: &GridSpec,
    time: &TimeSpec,
) -> Result<Trajectory> {
    initial.check(grid)?;
    cond.validate(initial.side, time.n_t)?;
    let mut states = Vec::with_capacity(time.n_t + 1);
    let mut interface_flux = Vec::with_capacity(time.n_t);
    states.push(initial.u.clone());
    let mut current = initial.clone();
    for n in 1..=time.n_t {
        let (u, flux) = step_with_flux(&current, cond.at(n), params, grid, time.dt)?;
        interface_flux.push(flux);
        current.u.clone_from(&u);
        states.push(u);
    }
    Ok(Trajectory {
        side: initial.side,
        states,
        interface_flux,
    })
}

/// Discrete L2 norm `sqrt(sum_m |u_m|^2 h)` of a profile.
pub fn l2_norm(u: &[C64], h: f64) -> f64 {
    (u.iter().map(|v| v.norm_sqr()).sum::<f64>() * h).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> GridSpec {
        GridSpec::new(20.0, 2.0, 12, 30).unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let params = PhysicalParams::new(
            1e-4,
            1.0,
            3e-3,
            1.0,
            1000.0,
            1e-3,
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        )
        .unwrap();
        let grid = small_grid();
        for side in [Side::Atmosphere, Side::Ocean] {
            let s = SubdomainState::zeros(side, &grid);
            let out = step_subdomain(&s, LevelCondition::Flux(C64::new(0.0, 0.0)), &params, &grid, 60.0).unwrap();
            assert!(out.u.iter().all(|v| *v == C64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn two_cell_step_matches_cramer() {
        // f = 0, real data: hand-assembled 2x2 system
        //   (1/dt + k + a/h) U0 - k U1 = g + u0/dt - b/h
        //   -k U0 + (1/dt + 3k) U1     = g + u1/dt + 2 k Uinf
        let (nu, h, dt) = (0.7, 3.0, 5.0);
        let (g, uinf) = (0.02, 4.0);
        let (alpha, theta, data) = (0.3, 0.8, -1.25);
        let params = PhysicalParams::new(
            0.0,
            nu,
            1.0,
            1.0,
            1.0,
            1.0,
            C64::from(uinf),
            C64::from(0.0),
            C64::from(g),
            C64::from(0.0),
        )
        .unwrap();
        let grid = GridSpec::new(h, 1.0, 2, 2).unwrap();
        let state = SubdomainState::new(Side::Atmosphere, vec![C64::from(1.5), C64::from(2.5)], &grid).unwrap();
        let cond = LevelCondition::Robin {
            theta,
            alpha,
            data: C64::from(data),
        };
        let out = step_subdomain(&state, cond, &params, &grid, dt).unwrap();

        let k = nu / (h * h);
        let a11 = 1.0 / dt + k + alpha * theta / h;
        let a12 = -k;
        let a21 = -k;
        let a22 = 1.0 / dt + 3.0 * k;
        let b1 = g + 1.5 / dt - alpha * data / h;
        let b2 = g + 2.5 / dt + 2.0 * k * uinf;
        let det = a11 * a22 - a12 * a21;
        let x0 = (b1 * a22 - a12 * b2) / det;
        let x1 = (a11 * b2 - a21 * b1) / det;
        assert!((out.u[0].re - x0).abs() < 1e-14 && out.u[0].im == 0.0);
        assert!((out.u[1].re - x1).abs() < 1e-14 && out.u[1].im == 0.0);
    }

    #[test]
    fn robin_flux_is_recorded_exactly() {
        let params = PhysicalParams::reference();
        let grid = small_grid();
        let time = TimeSpec::new(60.0, 7).unwrap();
        let init = SubdomainState::new(Side::Atmosphere, vec![params.u_inf_a; grid.n_a], &grid).unwrap();
        let alpha: Vec<f64> = (0..7).map(|i| 1e-3 * (1.0 + i as f64)).collect();
        let data: Vec<C64> = (0..7).map(|i| C64::new(-0.1 * i as f64, 0.2)).collect();
        let cond = InterfaceCondition::RobinBulk {
            theta: 0.7,
            alpha: alpha.clone(),
            data: data.clone(),
        };
        let traj = solve_subdomain_window(&init, &cond, &params, &grid, &time).unwrap();
        assert_eq!(traj.states.len(), 8);
        assert_eq!(traj.states[0], init.u);
        for n in 0..7 {
            let expected = alpha[n] * (0.7 * traj.states[n + 1][0] + data[n]);
            assert_eq!(traj.interface_flux[n], expected);
        }

        // a one-step window is a single step
        let one = TimeSpec::new(60.0, 1).unwrap();
        let cond1 = InterfaceCondition::RobinBulk {
            theta: 0.7,
            alpha: vec![alpha[0]],
            data: vec![data[0]],
        };
        let t1 = solve_subdomain_window(&init, &cond1, &params, &grid, &one).unwrap();
        let s1 = step_subdomain(&init, cond1.at(1), &params, &grid, 60.0).unwrap();
        assert_eq!(t1.states[1], s1.u);
    }

    #[test]
    fn condition_lengths_checked() {
        let params = PhysicalParams::reference();
        let grid = small_grid();
        let time = TimeSpec::new(60.0, 3).unwrap();
        let init = SubdomainState::zeros(Side::Ocean, &grid);
        let cond = InterfaceCondition::PrescribedFlux(vec![C64::from(0.0); 2]);
        assert!(matches!(
            solve_subdomain_window(&init, &cond, &params, &grid, &time),
            Err(Error::LengthMismatch { expected: 3, found: 2 })
        ));
        let robin = InterfaceCondition::RobinBulk {
            theta: 1.0,
            alpha: vec![1.0; 3],
            data: vec![C64::from(0.0); 3],
        };
        assert!(solve_subdomain_window(&init, &robin, &params, &grid, &time).is_err());
    }

    #[test]
    fn homogeneous_problem_is_dissipative() {
        let params = PhysicalParams::new(
            1e-4,
            1.0,
            3e-3,
            1.0,
            1000.0,
            1e-3,
            C64::from(0.0),
            C64::from(0.0),
            C64::from(0.0),
            C64::from(0.0),
        )
        .unwrap();
        for (dt, h) in [(1.0, 0.5), (60.0, 2.0), (600.0, 20.0), (3600.0, 5.0)] {
            let grid = GridSpec::new(h, h, 25, 25).unwrap();
            for side in [Side::Atmosphere, Side::Ocean] {
                let u: Vec<C64> = (0..25).map(|m| C64::new((m as f64 * 0.7).sin(), (m as f64).cos())).collect();
                let mut s = SubdomainState::new(side, u, &grid).unwrap();
                let mut norm = l2_norm(&s.u, h);
                for _ in 0..50 {
                    s = step_subdomain(&s, LevelCondition::Flux(C64::from(0.0)), &params, &grid, dt).unwrap();
                    let next = l2_norm(&s.u, h);
                    assert!(next <= norm * (1.0 + 1e-14), "dt={dt} h={h}");
                    norm = next;
                }
            }
        }
    }
}
