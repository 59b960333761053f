//! Physical and numerical parameters of the coupled column model, plus the
//! spectral symbols of the semi-discrete diffusion scheme.
//!
//! Velocities are complex, `U = u + i v`. All quantities are SI.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

/// Default lower bound on `|omega + f|` accepted by the spectral routines.
pub const DEFAULT_FREQUENCY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Atmosphere,
    Ocean,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Atmosphere => "atmosphere",
            Side::Ocean => "ocean",
        }
    }
}

/// Fluid constants of the two-layer rotating diffusion problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Coriolis frequency (s⁻¹).
    pub f: f64,
    pub nu_a: f64,
    pub nu_o: f64,
    pub rho_a: f64,
    pub rho_o: f64,
    /// Drag coefficient of the bulk formula.
    pub c_d: f64,
    pub u_inf_a: C64,
    pub u_inf_o: C64,
    pub g_a: C64,
    pub g_o: C64,
}

impl PhysicalParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: f64,
        nu_a: f64,
        nu_o: f64,
        rho_a: f64,
        rho_o: f64,
        c_d: f64,
        u_inf_a: C64,
        u_inf_o: C64,
        g_a: C64,
        g_o: C64,
    ) -> Result<Self> {
        let p = PhysicalParams {
            f,
            nu_a,
            nu_o,
            rho_a,
            rho_o,
            c_d,
            u_inf_a,
            u_inf_o,
            g_a,
            g_o,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with geostrophic forcing `g_j = i f U_j^inf`.
    #[allow(clippy::too_many_arguments)]
    pub fn geostrophic(
        f: f64,
        nu_a: f64,
        nu_o: f64,
        rho_a: f64,
        rho_o: f64,
        c_d: f64,
        u_inf_a: C64,
        u_inf_o: C64,
    ) -> Result<Self> {
        let g_a = C64::i() * f * u_inf_a;
        let g_o = C64::i() * f * u_inf_o;
        Self::new(f, nu_a, nu_o, rho_a, rho_o, c_d, u_inf_a, u_inf_o, g_a, g_o)
    }

    /// The realistic mid-latitude configuration: `C_D = 1.2e-3`,
    /// `f = 1e-4`, `nu_a = 1`, `nu_o = 3e-3`, `U_a = 10`, `U_o = 0.1`,
    /// `rho_a / rho_o = 1e-3`.
    pub fn reference() -> Self {
        Self::geostrophic(
            1e-4,
            1.0,
            3e-3,
            1.0,
            1000.0,
            1.2e-3,
            C64::new(10.0, 0.0),
            C64::new(0.1, 0.0),
        )
        .expect("reference parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nu_a", self.nu_a),
            ("nu_o", self.nu_o),
            ("rho_a", self.rho_a),
            ("rho_o", self.rho_o),
            ("c_d", self.c_d),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !self.f.is_finite() {
            return Err(invalid("f", "must be finite"));
        }
        let complex = [
            ("u_inf_a", self.u_inf_a),
            ("u_inf_o", self.u_inf_o),
            ("g_a", self.g_a),
            ("g_o", self.g_o),
        ];
        for (name, v) in complex {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Density ratio `rho_a / rho_o`.
    pub fn epsilon(&self) -> f64 {
        self.rho_a / self.rho_o
    }

    pub fn is_geostrophic(&self) -> bool {
        self.g_a == C64::i() * self.f * self.u_inf_a && self.g_o == C64::i() * self.f * self.u_inf_o
    }

    pub fn nu(&self, side: Side) -> f64 {
        match side {
            Side::Atmosphere => self.nu_a,
            Side::Ocean => self.nu_o,
        }
    }

    pub fn rho(&self, side: Side) -> f64 {
        match side {
            Side::Atmosphere => self.rho_a,
            Side::Ocean => self.rho_o,
        }
    }

    pub fn u_inf(&self, side: Side) -> C64 {
        match side {
            Side::Atmosphere => self.u_inf_a,
            Side::Ocean => self.u_inf_o,
        }
    }

    pub fn forcing(&self, side: Side) -> C64 {
        match side {
            Side::Atmosphere => self.g_a,
            Side::Ocean => self.g_o,
        }
    }
}

/// Uniform cell-centered meshes on both sides of the interface `z = 0`.
///
/// Cell `m` of the atmosphere is centered at `h_a/2 + m h_a`, cell `m` of the
/// ocean at `-h_o/2 - m h_o`; index 0 is always the cell touching the
/// interface, so the surface-layer edges sit at `±h_j/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub h_a: f64,
    pub h_o: f64,
    pub n_a: usize,
    pub n_o: usize,
}

impl GridSpec {
    pub fn new(h_a: f64, h_o: f64, n_a: usize, n_o: usize) -> Result<Self> {
        for (name, h) in [("h_a", h_a), ("h_o", h_o)] {
            if !(h.is_finite() && h > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {h}")));
            }
        }
        for (name, n) in [("n_a", n_a), ("n_o", n_o)] {
            if n < 2 {
                return Err(invalid(name, format!("need at least 2 cells, got {n}")));
            }
        }
        Ok(GridSpec { h_a, h_o, n_a, n_o })
    }

    /// 100 cells of 20 m in the air, 1000 cells of 2 m in the water.
    pub fn reference() -> Self {
        GridSpec {
            h_a: 20.0,
            h_o: 2.0,
            n_a: 100,
            n_o: 1000,
        }
    }

    pub fn h(&self, side: Side) -> f64 {
        match side {
            Side::Atmosphere => self.h_a,
            Side::Ocean => self.h_o,
        }
    }

    pub fn n(&self, side: Side) -> usize {
        match side {
            Side::Atmosphere => self.n_a,
            Side::Ocean => self.n_o,
        }
    }

    /// Signed height of the center of cell `m`.
    pub fn center(&self, side: Side, m: usize) -> f64 {
        match side {
            Side::Atmosphere => self.h_a * (0.5 + m as f64),
            Side::Ocean => -self.h_o * (0.5 + m as f64),
        }
    }

    pub fn centers(&self, side: Side) -> Vec<f64> {
        (0..self.n(side)).map(|m| self.center(side, m)).collect()
    }

    /// Position of the outer Dirichlet face (`H_a > 0`, `H_o < 0`).
    pub fn extent(&self, side: Side) -> f64 {
        match side {
            Side::Atmosphere => self.n_a as f64 * self.h_a,
            Side::Ocean => -(self.n_o as f64) * self.h_o,
        }
    }

    /// Surface-layer edge `delta_j = ±h_j / 2`.
    pub fn surface_layer_edge(&self, side: Side) -> f64 {
        self.center(side, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub dt: f64,
    pub n_t: usize,
}

impl TimeSpec {
    pub fn new(dt: f64, n_t: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        if n_t == 0 {
            return Err(invalid("n_t", "need at least one time step"));
        }
        Ok(TimeSpec { dt, n_t })
    }

    /// One day of 60 s steps.
    pub fn reference() -> Self {
        TimeSpec {
            dt: 60.0,
            n_t: 1440,
        }
    }

    pub fn window(&self) -> f64 {
        self.dt * self.n_t as f64
    }

    /// Highest frequency resolved by the time grid, `pi / dt`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dt
    }
}

/// Symbol `chi = i (omega + f) h^2 / nu` of the semi-discrete scheme.
pub fn chi(omega: f64, h: f64, nu: f64, f: f64) -> C64 {
    chi_shifted(omega + f, h, nu)
}

/// Same as [`chi`], parametrized by the shifted frequency `omega + f`.
pub fn chi_shifted(shift: f64, h: f64, nu: f64) -> C64 {
    C64::new(0.0, shift * h * h / nu)
}

/// Root `lambda = (chi - sqrt(chi) sqrt(chi + 4)) / 2` selecting the mode
/// `(lambda + 1)^m` that decays away from the interface.
///
/// The two radicals are evaluated separately on the principal branch and
/// combined as `-2 chi / (chi + sqrt(chi) sqrt(chi + 4))`, which avoids
/// cancellation for large `|chi|`.
///
/// # Panics
///
/// Panics if the selected root violates `|lambda + 1| <= 1`.
pub fn lambda_root(chi: C64) -> C64 {
    // Double root r = 1 at the inertial frequency.
    if chi == C64::new(0.0, 0.0) {
        return chi;
    }
    let lambda = -2.0 * chi / (chi + chi.sqrt() * (chi + 4.0).sqrt());
    let r = decay_factor(chi).norm();
    assert!(
        r <= 1.0 + 1e-12,
        "lambda_root selected a growing mode: |lambda + 1| = {r} for chi = {chi}"
    );
    lambda
}

/// `r = lambda + 1`, the smaller root of `r^2 - (2 + chi) r + 1 = 0`, as
/// `2 / ((2 + chi) + sqrt(chi) sqrt(chi + 4))`.
pub fn decay_factor(chi: C64) -> C64 {
    2.0 / ((2.0 + chi) + chi.sqrt() * (chi + 4.0).sqrt())
}

/// Per-frequency spectral quantities for both subdomains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub omega: f64,
    pub chi_a: C64,
    pub chi_o: C64,
    pub lambda_a: C64,
    pub lambda_o: C64,
}

impl SpectralPoint {
    pub fn new(omega: f64, params: &PhysicalParams, grid: &GridSpec, floor: f64) -> Result<Self> {
        Self::from_shift(omega + params.f, params, grid, floor).map(|mut p| {
            p.omega = omega;
            p
        })
    }

    /// Builds the point at `omega + f = shift`, avoiding the round trip
    /// through `omega` for shifts much smaller than `f`.
    pub fn from_shift(shift: f64, params: &PhysicalParams, grid: &GridSpec, floor: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::NonFinite(format!("frequency shift {shift}")));
        }
        if shift.abs() < floor {
            return Err(Error::DegenerateFrequency { shift, floor });
        }
        let chi_a = chi_shifted(shift, grid.h_a, params.nu_a);
        let chi_o = chi_shifted(shift, grid.h_o, params.nu_o);
        Ok(SpectralPoint {
            omega: shift - params.f,
            chi_a,
            chi_o,
            lambda_a: lambda_root(chi_a),
            lambda_o: lambda_root(chi_o),
        })
    }
}
