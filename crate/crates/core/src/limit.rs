//! The `ε → 0` limit of the kinetic scheme: an explicit LDG discretization
//! of `ρ_t = ∂_x(⟨v²⟩ ∂_x ρ)` written as `ρ_t + ∂_x q = 0`, `q = −⟨v²⟩ ∂_x ρ`.

use crate::fields::{project, DGField, Mesh1D, ProjectionKind};
use crate::operators::{apply_ah_moment, apply_dh, FluxChoice};

#[derive(Debug, Clone, PartialEq)]
pub struct LimitState {
    pub rho: DGField,
    /// Flux variable, the limit of `⟨v g⟩`.
    pub q: DGField,
    pub step: usize,
    pub time: f64,
}

pub fn init_limit(
    rho0: impl Fn(f64) -> f64,
    q0: impl Fn(f64) -> f64,
    mesh: Mesh1D,
    degree: usize,
) -> LimitState {
    LimitState {
        rho: project(rho0, mesh, degree, ProjectionKind::L2),
        q: project(q0, mesh, degree, ProjectionKind::L2),
        step: 0,
        time: 0.0,
    }
}

/// `ρ^{n+1} = ρ^n − Δt A(q^n)`, then `q^{n+1} = ⟨v²⟩ d_h(ρ^{n+1})`.
pub fn step_limit(state: &LimitState, dt: f64, flux: FluxChoice, m2: f64) -> LimitState {
    assert!(m2 > 0.0, "second velocity moment must be positive");
    let mut rho = state.rho.clone();
    rho.axpy(-dt, &apply_ah_moment(&state.q, flux));
    let mut q = apply_dh(&rho, flux);
    q.scale(m2);
    let step = state.step + 1;
    LimitState {
        rho,
        q,
        step,
        time: step as f64 * dt,
    }
}
