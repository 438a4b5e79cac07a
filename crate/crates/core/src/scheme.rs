//! First-order IMEX time stepping of the micro-macro system
//!
//! ```text
//! ρ_t + ∂_x⟨vg⟩ = 0
//! g_t + (1/ε)(I − Π)(v ∂_x g) + (1/ε²) v ∂_x ρ = −g/ε²
//! ```
//!
//! with the `1/ε²` terms implicit, plus the time-step bound that guarantees
//! decay of the discrete energy `‖ρ^{n+1}‖² + ε²|||g^n|||²`.

use crate::basis::{inverse_constants, InverseConstants};
use crate::error::{Error, Result};
use crate::fields::{DGField, KineticField, Mesh1D};
use crate::operators::{apply_ah_moment, apply_bh, apply_dh, FluxChoice};
use crate::velocity::{Moments, VelocityModel, VelocitySpace};

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub mesh: Mesh1D,
    pub degree: usize,
    pub space: VelocitySpace,
    /// Knudsen number; zero selects the limiting update.
    pub eps: f64,
    pub dt: f64,
    pub flux: FluxChoice,
    /// Keep the `b_{h,v}` transport term; dropping it is only meaningful
    /// for the telegraph model.
    pub include_bh: bool,
}

impl SchemeConfig {
    pub fn new(mesh: Mesh1D, degree: usize, space: VelocitySpace, eps: f64, dt: f64) -> Self {
        Self {
            mesh,
            degree,
            space,
            eps,
            dt,
            flux: FluxChoice::ALTERNATING_LR,
            include_bh: true,
        }
    }

    pub fn with_flux(mut self, flux: FluxChoice) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_bh(mut self, include_bh: bool) -> Self {
        self.include_bh = include_bh;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps.is_finite() || self.eps < 0.0 {
            return Err(Error::Config(format!("eps must be >= 0, got {}", self.eps)));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        Ok(())
    }
}

/// `(ρ_h^n, g_h^n)` plus the lagged `|||g^{n−1}|||` needed by the energy.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: DGField,
    pub g: KineticField,
    pub step: usize,
    pub time: f64,
    pub prev_g_norm: Option<f64>,
}

impl State {
    /// `‖ρ^n‖² + ε²|||g^{n−1}|||²`; undefined before the first step.
    pub fn energy(&self, eps: f64) -> Option<f64> {
        self.prev_g_norm
            .map(|gn| self.rho.norm_sq() + eps * eps * gn * gn)
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.g.is_finite()
    }
}

/// L² projection of the initial data.
pub fn init_state(
    rho0: impl Fn(f64) -> f64,
    g0: impl Fn(f64, f64) -> f64,
    config: &SchemeConfig,
) -> State {
    use crate::fields::{project, ProjectionKind};
    State {
        rho: project(rho0, config.mesh, config.degree, ProjectionKind::L2),
        g: KineticField::project(g0, config.mesh, config.degree, &config.space),
        step: 0,
        time: 0.0,
        prev_g_norm: None,
    }
}

/// One DG-IMEX1 step: explicit update of `ρ`, then the block-diagonal
/// implicit solve for `g` multiplied through by `ε²`,
///
/// `g^{n+1} = [(ε²/Δt) g^n − ε b_h(g^n) + v d_h(ρ^{n+1})] / (ε²/Δt + 1)`.
pub fn step_imex1(state: &State, config: &SchemeConfig) -> State {
    let space = &config.space;
    let eps = config.eps;
    let dt = config.dt;

    let q = state.g.flux_moment(space);
    let mut rho = state.rho.clone();
    rho.axpy(-dt, &apply_ah_moment(&q, config.flux));

    let d = apply_dh(&rho, config.flux);
    let b = config.include_bh.then(|| apply_bh(&state.g, space));

    let relax = eps * eps / dt;
    let denom = relax + 1.0;
    let mut g = state.g.clone();
    for (node, &v) in space.nodes().iter().enumerate() {
        let out = g.node_mut(node).coeffs_mut();
        let dc = d.coeffs();
        match &b {
            Some(b) => {
                let bc = b.node(node).coeffs();
                for ((o, &bv), &dv) in out.iter_mut().zip(bc).zip(dc) {
                    *o = (relax * *o - eps * bv + v * dv) / denom;
                }
            }
            None => {
                for (o, &dv) in out.iter_mut().zip(dc) {
                    *o = (relax * *o + v * dv) / denom;
                }
            }
        }
    }

    let step = state.step + 1;
    State {
        rho,
        g,
        step,
        time: step as f64 * dt,
        prev_g_norm: Some(state.g.norm_triple(space)),
    }
}

/// `steps` applications of [`step_imex1`].
pub fn advance(state: &State, config: &SchemeConfig, steps: usize) -> State {
    let mut s = state.clone();
    for _ in 0..steps {
        s = step_imex1(&s, config);
    }
    s
}

/// Quantities the stability and decay results constrain.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// `‖ρ^{n+1}‖² + ε²|||g^n|||²`.
    pub energy: f64,
    /// `⟨g_h^{n+1}⟩`.
    pub mean_g: DGField,
    pub mean_g_norm: f64,
}

pub fn diagnostics(prev: &State, state: &State, config: &SchemeConfig) -> Diagnostics {
    let eps = config.eps;
    let gn = prev.g.norm_triple(&config.space);
    let mean_g = state.g.bracket(&config.space);
    Diagnostics {
        energy: state.rho.norm_sq() + eps * eps * gn * gn,
        mean_g_norm: mean_g.norm(),
        mean_g,
    }
}

/// Where the velocity moments in the stability constants come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentSource {
    /// Moments of the implemented velocity nodes.
    #[default]
    Nodes,
    /// Moments of the continuous measure (`‖v‖_∞ = 1`, `⟨|v|⟩ = 1/2` for slab).
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    pub inverse: InverseConstants,
    pub moments: Moments,
    /// `(‖v‖_∞² + ⟨v²⟩) Ĉ_inv`
    pub alpha1: f64,
    /// `2(‖v‖_∞ + ⟨|v|⟩) C_inv`
    pub alpha2: f64,
    /// `2‖v‖_∞ C_inv`
    pub alpha3: f64,
    pub dt_stab: f64,
}

/// Stability constants and `Δt_stab` for the given discretization.
pub fn stability_constants(
    space: &VelocitySpace,
    degree: usize,
    h: f64,
    eps: f64,
    include_bh: bool,
    source: MomentSource,
) -> Result<StabilityConstants> {
    stability_constants_c0(space, degree, h, eps, include_bh, source, 0.0)
}

/// As [`stability_constants`], with the bound tightened by `c0 ∈ [0, 1)`:
/// the step for which the energy decays at rate at least `c0`.
pub fn stability_constants_c0(
    space: &VelocitySpace,
    degree: usize,
    h: f64,
    eps: f64,
    include_bh: bool,
    source: MomentSource,
    c0: f64,
) -> Result<StabilityConstants> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Config(format!("cell width must be positive, got {h}")));
    }
    if !(0.0..1.0).contains(&c0) {
        return Err(Error::Config(format!("c0 must lie in [0, 1), got {c0}")));
    }
    let inverse = inverse_constants(degree);
    let moments = match source {
        MomentSource::Nodes => space.moments(),
        MomentSource::Continuum => space.continuum_moments(),
    };
    let (c_inv, c_hat) = (inverse.trace, inverse.derivative);
    let alpha1 = (moments.v_max * moments.v_max + moments.m2) * c_hat;
    let alpha2 = 2.0 * (moments.v_max + moments.m1abs) * c_inv;
    let alpha3 = 2.0 * moments.v_max * c_inv;
    let damp = 1.0 - c0;

    let dt_stab = if include_bh {
        if degree >= 1 && alpha1 > 0.0 {
            let switch = eps.min(damp * alpha2 * h / alpha1);
            h / (alpha1 + alpha2 * alpha3) * (damp * h + switch * alpha3)
        } else {
            2.0 * h / (alpha2 * alpha3) * (damp * h + alpha3 * eps)
        }
    } else {
        if space.model() != VelocityModel::Telegraph {
            return Err(Error::Config(
                "no stability bound is available for the slab model without b_h".into(),
            ));
        }
        if degree >= 1 {
            damp * h * h / (c_hat + 4.0 * c_inv * c_inv)
        } else {
            damp * h * h / (2.0 * c_inv * c_inv)
        }
    };

    Ok(StabilityConstants {
        inverse,
        moments,
        alpha1,
        alpha2,
        alpha3,
        dt_stab,
    })
}

/// `Δt_stab` for a scheme configuration (its own `dt` is ignored).
pub fn dt_stab(config: &SchemeConfig, source: MomentSource) -> Result<StabilityConstants> {
    stability_constants(
        &config.space,
        config.degree,
        config.mesh.h(),
        config.eps,
        config.include_bh,
        source,
    )
}
