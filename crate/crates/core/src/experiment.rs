//! Standard experiment pipeline: stationary state, monolithic reference and
//! Schwarz runs started from the stationary state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::friction::FrictionLaw;
use crate::model::{GridSpec, PhysicalParams, TimeSpec};
use crate::solver::{compute_equilibrium, solve_monolithic, CoupledTrajectory, Equilibrium, PicardOptions};
use crate::swr::{run_swr, SwrConfig, SwrOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Linear,
    Quadratic,
    Linearized,
}

impl LawKind {
    pub fn name(self) -> &'static str {
        match self {
            LawKind::Linear => "linear",
            LawKind::Quadratic => "quadratic",
            LawKind::Linearized => "linearized",
        }
    }
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(LawKind::Linear),
            "quadratic" => Ok(LawKind::Quadratic),
            "linearized" => Ok(LawKind::Linearized),
            other => Err(invalid(
                "friction",
                format!("unknown law `{other}` (expected linear, quadratic or linearized)"),
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub picard: PicardOptions,
    /// Stationary state of the quadratic law.
    pub equilibrium: Equilibrium,
}

impl Scenario {
    pub fn new(params: PhysicalParams, grid: GridSpec, time: TimeSpec) -> Result<Self> {
        params.validate()?;
        let picard = PicardOptions::default();
        let equilibrium = compute_equilibrium(&params, &grid, &FrictionLaw::Quadratic { c_d: params.c_d }, &picard)?;
        Ok(Scenario {
            params,
            grid,
            time,
            picard,
            equilibrium,
        })
    }

    pub fn reference() -> Result<Self> {
        Scenario::new(PhysicalParams::reference(), GridSpec::reference(), TimeSpec::reference())
    }

    /// Friction law of the given kind; the constant coefficient defaults to
    /// `alpha^e`.
    pub fn law(&self, kind: LawKind, alpha_c: Option<f64>) -> Result<FrictionLaw> {
        match kind {
            LawKind::Linear => FrictionLaw::linear(alpha_c.unwrap_or(self.equilibrium.alpha_e)),
            LawKind::Quadratic => Ok(FrictionLaw::Quadratic { c_d: self.params.c_d }),
            LawKind::Linearized => Ok(FrictionLaw::LinearizedQuadratic(self.equilibrium.linearization_point())),
        }
    }

    /// Monolithic solution over the window from the stationary state.
    pub fn monolithic(&self, law: &FrictionLaw) -> Result<CoupledTrajectory> {
        let eq = &self.equilibrium;
        solve_monolithic(&self.params, &self.grid, &self.time, law, (&eq.atmosphere, &eq.ocean), &self.picard)
    }

    /// Schwarz run from the stationary state, measured against `reference`
    /// or, when absent, against its own converged iterate.
    pub fn run(&self, law: &FrictionLaw, config: &SwrConfig, reference: Option<&CoupledTrajectory>) -> Result<SwrOutcome> {
        let eq = &self.equilibrium;
        run_swr(
            &self.params,
            &self.grid,
            &self.time,
            law,
            config,
            (&eq.atmosphere, &eq.ocean),
            reference,
        )
    }
}
