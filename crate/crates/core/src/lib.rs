//! Schwarz waveform relaxation for a single-column ocean-atmosphere model
//! coupled through a bulk (quadratic friction) interface condition.
//!
//! The crate provides the finite-difference column solvers, the iterative
//! coupling driver with three friction laws, and the semi-discrete
//! convergence-factor analysis used to pick the relaxation parameter.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod friction;
pub mod model;
pub mod solver;
pub mod swr;

pub use error::{Error, Result};
pub use experiment::{LawKind, Scenario};
pub use friction::{FrictionLaw, LinearizationPoint};
pub use model::{GridSpec, PhysicalParams, Side, SpectralPoint, TimeSpec, C64};
