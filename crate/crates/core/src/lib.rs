//! Asymptotic-preserving DG-IMEX solver for linear kinetic transport in the
//! diffusive scaling `ε f_t + v f_x = (⟨f⟩ − f)/ε`, written in micro-macro
//! form `f = ρ + ε g` on a periodic interval.
//!
//! Spatial discretization is modal discontinuous Galerkin with Legendre
//! modes; time stepping is first-order IMEX with the `1/ε²` terms implicit.
//! The crate also carries the `ε → 0` limiting LDG heat scheme and the
//! experiment drivers behind the `apdg` command-line tool.

pub mod basis;
pub mod error;
pub mod fields;
pub mod harness;
pub mod io;
pub mod limit;
pub mod operators;
pub mod scheme;
pub mod velocity;

pub use basis::{inverse_constants, InverseConstants, LegendreBasis};
pub use error::{Error, Result};
pub use fields::{DGField, KineticField, Mesh1D, ProjectionKind, Side};
pub use limit::{init_limit, step_limit, LimitState};
pub use operators::{FluxChoice, TraceChoice};
pub use scheme::{
    advance, dt_stab, init_state, stability_constants, stability_constants_c0, step_imex1,
    MomentSource, SchemeConfig, StabilityConstants, State,
};
pub use velocity::{Moments, VelocityModel, VelocitySpace};
