//! Convergence factors of the bulk-coupled Schwarz waveform relaxation on
//! semi-infinite subdomains.
//!
//! Everything here depends on frequency only through the shift `omega + f`,
//! so the sweep helpers work on log-spaced shifts.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{GridSpec, PhysicalParams, SpectralPoint, TimeSpec, C64, DEFAULT_FREQUENCY_FLOOR};

/// A convergence-factor query without its frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiFamily {
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub theta: f64,
    /// Constant friction velocity `alpha_c` (m s⁻¹), `rho_a` factored out.
    pub alpha_c: f64,
    pub floor: f64,
}

impl XiFamily {
    pub fn new(params: PhysicalParams, grid: GridSpec, theta: f64, alpha_c: f64) -> Result<Self> {
        if !(alpha_c.is_finite() && alpha_c > 0.0) {
            return Err(invalid("alpha_c", format!("must be finite and > 0, got {alpha_c}")));
        }
        if !theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        Ok(XiFamily {
            params,
            grid,
            theta,
            alpha_c,
            floor: DEFAULT_FREQUENCY_FLOOR,
        })
    }

    pub fn at(self, omega: f64) -> XiQuery {
        XiQuery { family: self, omega }
    }

    /// Linear-friction factor at `omega + f = shift`.
    pub fn xi_at_shift(&self, shift: f64) -> Result<f64> {
        let sp = SpectralPoint::from_shift(shift, &self.params, &self.grid, self.floor)?;
        xi_from_point(self, &sp)
    }

    pub fn xi0(&self) -> Result<f64> {
        xi0_linear(self.theta, self.params.epsilon(), self.params.nu_a, self.params.nu_o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiQuery {
    pub family: XiFamily,
    pub omega: f64,
}

/// `|B_k / B_{k-1}|` for constant friction:
///
/// ```text
///        | (1 - theta) + eps (h_a lambda_o) / (h_o lambda_a) |
///   xi = | ------------------------------------------------- |
///        |   nu_a chi_a / (alpha_c h_a lambda_a) - theta     |
/// ```
pub fn xi_linear(q: &XiQuery) -> Result<f64> {
    let sp = SpectralPoint::new(q.omega, &q.family.params, &q.family.grid, q.family.floor)?;
    xi_from_point(&q.family, &sp)
}

fn xi_from_point(fam: &XiFamily, sp: &SpectralPoint) -> Result<f64> {
    let p = &fam.params;
    let g = &fam.grid;
    let eps = p.epsilon();
    let num = C64::from(1.0 - fam.theta) + eps * (g.h_a * sp.lambda_o) / (g.h_o * sp.lambda_a);
    let den = p.nu_a * sp.chi_a / (fam.alpha_c * g.h_a * sp.lambda_a) - fam.theta;
    let modulus = den.norm();
    if modulus < 1e-300 {
        return Err(Error::DegenerateDenominator { modulus });
    }
    let xi = num.norm() / modulus;
    if !xi.is_finite() {
        return Err(Error::NonFinite(format!("xi at omega = {}", sp.omega)));
    }
    Ok(xi)
}

fn require_nonzero_theta(theta: f64) -> Result<()> {
    if theta == 0.0 {
        Err(Error::ThetaZero)
    } else {
        Ok(())
    }
}

/// Low-frequency limit `(1/theta) |1 - theta + eps sqrt(nu_a/nu_o)|`.
pub fn xi0_linear(theta: f64, eps: f64, nu_a: f64, nu_o: f64) -> Result<f64> {
    require_nonzero_theta(theta)?;
    Ok((1.0 - theta + eps * (nu_a / nu_o).sqrt()).abs() / theta.abs())
}

/// Low-frequency limit for the linearized quadratic friction,
/// `(1/theta) |3/2 - theta + (3/2) eps sqrt(nu_a/nu_o)|`.
pub fn xi0_quadratic(theta: f64, eps: f64, nu_a: f64, nu_o: f64) -> Result<f64> {
    require_nonzero_theta(theta)?;
    Ok((1.5 - theta + 1.5 * eps * (nu_a / nu_o).sqrt()).abs() / theta.abs())
}

pub fn theta_opt_linear(eps: f64, nu_a: f64, nu_o: f64) -> f64 {
    1.0 + eps * (nu_a / nu_o).sqrt()
}

pub fn theta_opt_quadratic(eps: f64, nu_a: f64, nu_o: f64) -> f64 {
    1.5 + 1.5 * eps * (nu_a / nu_o).sqrt()
}

/// Dirichlet-Neumann factor `|1 - theta (1 - eps h_a lambda_o / (lambda_a h_o))|`.
pub fn xi_dnwr(omega: f64, theta_dnwr: f64, params: &PhysicalParams, grid: &GridSpec) -> Result<f64> {
    let sp = SpectralPoint::new(omega, params, grid, DEFAULT_FREQUENCY_FLOOR)?;
    Ok(dnwr_from_point(theta_dnwr, params, grid, &sp))
}

pub fn xi_dnwr_at_shift(shift: f64, theta_dnwr: f64, params: &PhysicalParams, grid: &GridSpec) -> Result<f64> {
    let sp = SpectralPoint::from_shift(shift, params, grid, DEFAULT_FREQUENCY_FLOOR)?;
    Ok(dnwr_from_point(theta_dnwr, params, grid, &sp))
}

fn dnwr_from_point(theta: f64, params: &PhysicalParams, grid: &GridSpec, sp: &SpectralPoint) -> f64 {
    let r = params.epsilon() * grid.h_a * sp.lambda_o / (sp.lambda_a * grid.h_o);
    (1.0 - theta * (1.0 - r)).norm()
}

/// Log-spaced grid in `omega + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySweep {
    pub min_shift: f64,
    pub max_shift: f64,
    pub points: usize,
}

impl Default for FrequencySweep {
    fn default() -> Self {
        FrequencySweep {
            min_shift: 1e-10,
            max_shift: 1e2,
            points: 200,
        }
    }
}

impl FrequencySweep {
    pub fn new(min_shift: f64, max_shift: f64, points: usize) -> Result<Self> {
        if !(min_shift.is_finite() && min_shift > 0.0) {
            return Err(invalid("omega_min", "must be finite and > 0"));
        }
        if !(max_shift.is_finite() && max_shift >= min_shift) {
            return Err(invalid("omega_max", "must be finite and >= omega_min"));
        }
        if points == 0 {
            return Err(invalid("omega_points", "need at least one point"));
        }
        Ok(FrequencySweep {
            min_shift,
            max_shift,
            points,
        })
    }

    pub fn shifts(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min_shift];
        }
        let (a, b) = (self.min_shift.log10(), self.max_shift.log10());
        let step = (b - a) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == self.points - 1 {
                    self.max_shift
                } else {
                    10f64.powf(a + step * i as f64)
                }
            })
            .collect()
    }
}

/// Maximum of the linear factor over a grid of shifts `omega + f`.
/// Returns `(sup, argmax omega)`.
pub fn sup_xi(family: &XiFamily, shifts: &[f64]) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &s in shifts {
        let xi = family.xi_at_shift(s)?;
        if best.is_none_or(|(b, _)| xi > b) {
            best = Some((xi, s));
        }
    }
    let (sup, shift) = best.ok_or(Error::Empty("omega grid"))?;
    Ok((sup, shift - family.params.f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiSweepRow {
    pub omega: f64,
    pub shift: f64,
    pub xi_linear: f64,
    pub xi_dnwr: f64,
    pub xi0: f64,
    /// `|omega| > pi / dt`: not representable on the experiment's time grid.
    pub beyond_nyquist: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XiSweep {
    pub rows: Vec<XiSweepRow>,
    pub skipped: usize,
}

/// Tabulates the linear and DNWR factors (both with relaxation `theta`).
/// Degenerate shifts are skipped and counted.
pub fn xi_sweep(family: &XiFamily, shifts: &[f64], time: Option<&TimeSpec>) -> Result<XiSweep> {
    let xi0 = family.xi0().unwrap_or(f64::INFINITY);
    let mut rows = Vec::with_capacity(shifts.len());
    let mut skipped = 0;
    for &s in shifts {
        let xi = match family.xi_at_shift(s) {
            Ok(v) => v,
            Err(Error::DegenerateFrequency { .. }) | Err(Error::DegenerateDenominator { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let dn = xi_dnwr_at_shift(s, family.theta, &family.params, &family.grid)?;
        let omega = s - family.params.f;
        rows.push(XiSweepRow {
            omega,
            shift: s,
            xi_linear: xi,
            xi_dnwr: dn,
            xi0,
            beyond_nyquist: time.is_some_and(|t| omega.abs() > t.nyquist()),
        });
    }
    Ok(XiSweep { rows, skipped })
}
