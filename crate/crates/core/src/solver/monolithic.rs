//! Coupled solves over both subdomains at once: the reference solution of the
//! transient problem and its stationary state.
//!
//! Ordering the ocean cells from the bottom up and the atmosphere cells from
//! the interface up keeps the coupled system tridiagonal; the bulk flux only
//! links the two interface cells.

use serde::{Deserialize, Serialize};

use super::{tridiag, Column, SubdomainState, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::friction::{FrictionLaw, LinearizationPoint};
use crate::model::{GridSpec, PhysicalParams, Side, TimeSpec, C64};

const ZERO_JUMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Relative stopping threshold on the friction update.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            tol: 1e-12,
            max_iters: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTrajectory {
    pub atmosphere: Trajectory,
    pub ocean: Trajectory,
}

impl CoupledTrajectory {
    pub fn side(&self, side: Side) -> &Trajectory {
        match side {
            Side::Atmosphere => &self.atmosphere,
            Side::Ocean => &self.ocean,
        }
    }
}

/// Stationary coupled state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub atmosphere: SubdomainState,
    pub ocean: SubdomainState,
    /// `C_D |U_a^e(h_a/2) - U_o^e(-h_o/2)|`
    pub alpha_e: f64,
    /// `nu_a phi_a^e(0)` as imposed by the friction law used in the solve.
    pub flux: C64,
}

impl Equilibrium {
    pub fn linearization_point(&self) -> LinearizationPoint {
        LinearizationPoint {
            u_a: self.atmosphere.u[0],
            u_o: self.ocean.u[0],
            alpha_e: self.alpha_e,
        }
    }
}

/// One linear coupled solve with interface flux `F = a (U_a0 - U_o0) + b`.
fn coupled_linear_solve(
    params: &PhysicalParams,
    grid: &GridSpec,
    previous: Option<(&[C64], &[C64], f64)>,
    a: f64,
    b: C64,
) -> Result<(Vec<C64>, Vec<C64>, C64)> {
    let (prev_a, prev_o) = match previous {
        Some((ua, uo, dt)) => (Some((ua, dt)), Some((uo, dt))),
        None => (None, None),
    };
    let mut atm = Column::assemble(Side::Atmosphere, params, grid, prev_a);
    let mut oce = Column::assemble(Side::Ocean, params, grid, prev_o);
    let eps = params.epsilon();
    atm.add_interface_flux(Side::Atmosphere, grid.h_a, a, b);
    // ocean flux is eps * F; its diagonal part comes from -U_o0 in the jump
    oce.add_interface_flux(Side::Ocean, grid.h_o, -eps * a, eps * b);

    let (no, na) = (grid.n_o, grid.n_a);
    let n = no + na;
    let mut lower = vec![C64::new(0.0, 0.0); n];
    let mut upper = vec![C64::new(0.0, 0.0); n];
    let mut diag = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for m in (0..no).rev() {
        let i = no - 1 - m;
        diag.push(oce.diag[m]);
        rhs.push(oce.rhs[m]);
        // towards the bottom is cell m + 1
        lower[i] = oce.upper[m];
        upper[i] = oce.lower[m];
    }
    for m in 0..na {
        let i = no + m;
        diag.push(atm.diag[m]);
        rhs.push(atm.rhs[m]);
        lower[i] = atm.lower[m];
        upper[i] = atm.upper[m];
    }
    upper[no - 1] = C64::from(-eps * a / grid.h_o);
    lower[no] = C64::from(-a / grid.h_a);

    tridiag::solve_in_place(&lower, &mut diag, &upper, &mut rhs)?;
    if !rhs.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("coupled solve".into()));
    }
    let ocean: Vec<C64> = rhs[..no].iter().rev().copied().collect();
    let atmosphere = rhs[no..].to_vec();
    let flux = a * (atmosphere[0] - ocean[0]) + b;
    Ok((atmosphere, ocean, flux))
}

struct CoupledSolution {
    atmosphere: Vec<C64>,
    ocean: Vec<C64>,
    flux: C64,
    /// Friction velocity of the last linear solve (Picard state).
    alpha: f64,
    jump: C64,
}

/// Resolves the friction law at one level by Picard iteration.
fn coupled_solve(
    params: &PhysicalParams,
    grid: &GridSpec,
    previous: Option<(&[C64], &[C64], f64)>,
    friction: &FrictionLaw,
    alpha_guess: f64,
    jump_guess: C64,
    picard: &PicardOptions,
) -> Result<CoupledSolution> {
    match *friction {
        FrictionLaw::LinearConstant { alpha_c } => {
            let (atmosphere, ocean, flux) = coupled_linear_solve(params, grid, previous, alpha_c, C64::from(0.0))?;
            let jump = atmosphere[0] - ocean[0];
            Ok(CoupledSolution {
                atmosphere,
                ocean,
                flux,
                alpha: alpha_c,
                jump,
            })
        }
        FrictionLaw::Quadratic { c_d } => {
            let mut alpha = alpha_guess;
            let mut residual = f64::INFINITY;
            for _ in 0..picard.max_iters {
                let (atmosphere, ocean, flux) = coupled_linear_solve(params, grid, previous, alpha, C64::from(0.0))?;
                let jump = atmosphere[0] - ocean[0];
                let updated = c_d * jump.norm();
                residual = (updated - alpha).abs();
                // a vanishing jump is a fixed point only up to roundoff
                let degenerate = jump.norm() < ZERO_JUMP && alpha <= c_d * ZERO_JUMP;
                if residual <= picard.tol * alpha.max(1e-30) || degenerate {
                    return Ok(CoupledSolution {
                        atmosphere,
                        ocean,
                        flux,
                        alpha,
                        jump,
                    });
                }
                alpha = updated;
            }
            Err(Error::PicardNotConverged {
                iterations: picard.max_iters,
                residual,
            })
        }
        FrictionLaw::LinearizedQuadratic(lp) => {
            // F = F^e + alpha^e (3/2 d + 1/2 rot conj(d)), d = jump - jump^e;
            // the conjugate part is lagged.
            let a = 1.5 * lp.alpha_e;
            let mut jump = jump_guess;
            let mut residual = f64::INFINITY;
            for _ in 0..picard.max_iters {
                let d = jump - lp.jump();
                let b = lp.flux() - a * lp.jump() + 0.5 * lp.alpha_e * lp.rotation() * d.conj();
                let (atmosphere, ocean, flux) = coupled_linear_solve(params, grid, previous, a, b)?;
                let new_jump = atmosphere[0] - ocean[0];
                residual = (new_jump - jump).norm();
                if residual <= picard.tol * jump.norm().max(1e-30) {
                    return Ok(CoupledSolution {
                        atmosphere,
                        ocean,
                        flux,
                        alpha: lp.alpha_e,
                        jump: new_jump,
                    });
                }
                jump = new_jump;
            }
            Err(Error::PicardNotConverged {
                iterations: picard.max_iters,
                residual,
            })
        }
    }
}

/// Transient coupled solve of the bulk-coupled problem without iteration
/// between subdomains. Serves as the reference for the Schwarz iterates.
pub fn solve_monolithic(
    params: &PhysicalParams,
    grid: &GridSpec,
    time: &TimeSpec,
    friction: &FrictionLaw,
    initial: (&SubdomainState, &SubdomainState),
    picard: &PicardOptions,
) -> Result<CoupledTrajectory> {
    let (init_a, init_o) = initial;
    if init_a.side != Side::Atmosphere || init_o.side != Side::Ocean {
        return Err(invalid("initial", "expected (atmosphere, ocean) states"));
    }
    init_a.check(grid)?;
    init_o.check(grid)?;
    let eps = params.epsilon();

    let mut states_a = Vec::with_capacity(time.n_t + 1);
    let mut states_o = Vec::with_capacity(time.n_t + 1);
    let mut flux_a = Vec::with_capacity(time.n_t);
    let mut flux_o = Vec::with_capacity(time.n_t);
    states_a.push(init_a.u.clone());
    states_o.push(init_o.u.clone());

    let mut jump = init_a.u[0] - init_o.u[0];
    let mut alpha = match friction {
        FrictionLaw::Quadratic { c_d } => c_d * jump.norm(),
        FrictionLaw::LinearConstant { alpha_c } => *alpha_c,
        FrictionLaw::LinearizedQuadratic(lp) => lp.alpha_e,
    };
    for _ in 0..time.n_t {
        let prev = (
            states_a.last().unwrap().as_slice(),
            states_o.last().unwrap().as_slice(),
            time.dt,
        );
        let sol = coupled_solve(params, grid, Some(prev), friction, alpha, jump, picard)?;
        alpha = sol.alpha;
        jump = sol.jump;
        flux_a.push(sol.flux);
        flux_o.push(eps * sol.flux);
        states_a.push(sol.atmosphere);
        states_o.push(sol.ocean);
    }
    Ok(CoupledTrajectory {
        atmosphere: Trajectory {
            side: Side::Atmosphere,
            states: states_a,
            interface_flux: flux_a,
        },
        ocean: Trajectory {
            side: Side::Ocean,
            states: states_o,
            interface_flux: flux_o,
        },
    })
}

/// Stationary solution `i f U - D(U) = g` with the bulk interface condition.
pub fn compute_equilibrium(
    params: &PhysicalParams,
    grid: &GridSpec,
    friction: &FrictionLaw,
    picard: &PicardOptions,
) -> Result<Equilibrium> {
    let far_jump = params.u_inf_a - params.u_inf_o;
    let alpha_guess = match friction {
        FrictionLaw::Quadratic { c_d } => c_d * far_jump.norm(),
        FrictionLaw::LinearConstant { alpha_c } => *alpha_c,
        FrictionLaw::LinearizedQuadratic(lp) => lp.alpha_e,
    };
    let sol = coupled_solve(params, grid, None, friction, alpha_guess, far_jump, picard)?;
    let lp = LinearizationPoint::new(sol.atmosphere[0], sol.ocean[0], params.c_d)?;
    Ok(Equilibrium {
        atmosphere: SubdomainState {
            side: Side::Atmosphere,
            u: sol.atmosphere,
        },
        ocean: SubdomainState {
            side: Side::Ocean,
            u: sol.ocean,
        },
        alpha_e: lp.alpha_e,
        flux: sol.flux,
    })
}

/// Max-norm residual of the stationary scheme at `(u_a, u_o)` with interface
/// flux `flux` (atmosphere side; the ocean receives `eps * flux`).
pub fn stationary_residual(params: &PhysicalParams, grid: &GridSpec, u_a: &[C64], u_o: &[C64], flux: C64) -> f64 {
    let mut worst: f64 = 0.0;
    for (side, u, f) in [
        (Side::Atmosphere, u_a, flux),
        (Side::Ocean, u_o, params.epsilon() * flux),
    ] {
        let mut col = Column::assemble(side, params, grid, None);
        col.add_interface_flux(side, grid.h(side), 0.0, f);
        let n = u.len();
        for m in 0..n {
            let mut lhs = col.diag[m] * u[m];
            if m > 0 {
                lhs += col.lower[m] * u[m - 1];
            }
            if m + 1 < n {
                lhs += col.upper[m] * u[m + 1];
            }
            worst = worst.max((lhs - col.rhs[m]).norm());
        }
    }
    worst
}
