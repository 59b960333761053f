//! Friction laws for the bulk interface flux `nu_a phi_a(0) = alpha (U_a - U_o)`,
//! evaluated between the two cells adjacent to the interface.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::C64;

/// Interface values of a stationary state and the friction velocity there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizationPoint {
    /// `U_a^e(h_a/2)`
    pub u_a: C64,
    /// `U_o^e(-h_o/2)`
    pub u_o: C64,
    /// `C_D |U_a^e - U_o^e|`
    pub alpha_e: f64,
}

impl LinearizationPoint {
    pub fn new(u_a: C64, u_o: C64, c_d: f64) -> Result<Self> {
        let jump = (u_a - u_o).norm();
        if jump.is_nan() || jump < 1e-12 {
            return Err(Error::ZeroJump { jump });
        }
        Ok(LinearizationPoint {
            u_a,
            u_o,
            alpha_e: c_d * jump,
        })
    }

    pub fn jump(&self) -> C64 {
        self.u_a - self.u_o
    }

    /// Phase factor `dU^e / conj(dU^e)` of the conjugate term.
    pub fn rotation(&self) -> C64 {
        let j = self.jump();
        j / j.conj()
    }

    /// Stationary interface flux `alpha^e (U_a^e - U_o^e)`.
    pub fn flux(&self) -> C64 {
        self.alpha_e * self.jump()
    }

    /// Flux of the bulk formula linearized around this point, for interface
    /// values `(u_a, u_o)`.
    pub fn linearized_flux(&self, u_a: C64, u_o: C64) -> C64 {
        let d = (u_a - u_o) - self.jump();
        self.flux() + self.alpha_e * (1.5 * d + 0.5 * self.rotation() * d.conj())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FrictionLaw {
    /// Constant friction velocity `alpha_c` (m s⁻¹).
    LinearConstant { alpha_c: f64 },
    /// `alpha = C_D |U_a - U_o|`.
    Quadratic { c_d: f64 },
    /// Quadratic law linearized around a stationary state.
    LinearizedQuadratic(LinearizationPoint),
}

impl FrictionLaw {
    pub fn linear(alpha_c: f64) -> Result<Self> {
        if !(alpha_c.is_finite() && alpha_c > 0.0) {
            return Err(invalid("alpha_c", format!("must be finite and > 0, got {alpha_c}")));
        }
        Ok(FrictionLaw::LinearConstant { alpha_c })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FrictionLaw::LinearConstant { .. } => "linear",
            FrictionLaw::Quadratic { .. } => "quadratic",
            FrictionLaw::LinearizedQuadratic(_) => "linearized",
        }
    }

    /// Interface flux `nu_a phi_a(0)` for interface values `(u_a, u_o)`.
    pub fn flux(&self, u_a: C64, u_o: C64) -> C64 {
        match *self {
            FrictionLaw::LinearConstant { alpha_c } => alpha_c * (u_a - u_o),
            FrictionLaw::Quadratic { c_d } => c_d * (u_a - u_o).norm() * (u_a - u_o),
            FrictionLaw::LinearizedQuadratic(lp) => lp.linearized_flux(u_a, u_o),
        }
    }
}
