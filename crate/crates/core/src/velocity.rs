//! Velocity-space models and the velocity average `⟨·⟩`.

use std::fmt;
use std::str::FromStr;

use crate::basis::GaussRule;
use crate::error::{Error, Result};

/// Which kinetic model the velocity space discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VelocityModel {
    /// Two discrete velocities `±1` with equal weights (telegraph equation).
    Telegraph,
    /// Continuous `v ∈ [-1, 1]` with `dμ = dv/2`, discretized by Gauss ordinates.
    Slab,
}

impl fmt::Display for VelocityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VelocityModel::Telegraph => "telegraph",
            VelocityModel::Slab => "slab",
        })
    }
}

impl FromStr for VelocityModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "telegraph" => Ok(VelocityModel::Telegraph),
            "slab" => Ok(VelocityModel::Slab),
            other => Err(Error::Config(format!("unknown velocity model `{other}`"))),
        }
    }
}

/// `(‖v‖_∞, ⟨v²⟩, ⟨|v|⟩)`, the inputs of the stability constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub v_max: f64,
    pub m2: f64,
    pub m1abs: f64,
}

/// Nodes and probability weights of a discretized velocity measure.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySpace {
    model: VelocityModel,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl VelocitySpace {
    pub fn telegraph() -> Self {
        Self {
            model: VelocityModel::Telegraph,
            nodes: vec![-1.0, 1.0],
            weights: vec![0.5, 0.5],
        }
    }

    /// Gauss–Legendre ordinates on [-1, 1] with halved weights.
    pub fn slab(nv: usize) -> Result<Self> {
        if nv == 0 || nv % 2 == 1 {
            return Err(Error::Config(format!(
                "slab ordinate count must be even and positive, got {nv}"
            )));
        }
        let rule = GaussRule::new(nv);
        let half = nv / 2;
        let mut nodes = rule.nodes;
        let mut weights: Vec<f64> = rule.weights.iter().map(|w| 0.5 * w).collect();
        // exact mirror symmetry so odd moments vanish identically
        for q in 0..half {
            let v = 0.5 * (nodes[nv - 1 - q] - nodes[q]);
            let w = 0.5 * (weights[nv - 1 - q] + weights[q]);
            nodes[q] = -v;
            nodes[nv - 1 - q] = v;
            weights[q] = w;
            weights[nv - 1 - q] = w;
        }
        Ok(Self {
            model: VelocityModel::Slab,
            nodes,
            weights,
        })
    }

    /// Builds the space for `model`; `nv` is ignored for the telegraph model.
    pub fn new(model: VelocityModel, nv: usize) -> Result<Self> {
        match model {
            VelocityModel::Telegraph => Ok(Self::telegraph()),
            VelocityModel::Slab => Self::slab(nv),
        }
    }

    pub fn model(&self) -> VelocityModel {
        self.model
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `⟨values⟩ = Σ_q w_q values_q`.
    pub fn bracket(&self, values: &[f64]) -> f64 {
        assert_eq!(
            values.len(),
            self.nodes.len(),
            "bracket expects one value per velocity node"
        );
        self.weights.iter().zip(values).map(|(w, x)| w * x).sum()
    }

    /// `⟨f(v)⟩` for a function of velocity.
    pub fn average(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weights.iter().zip(&self.nodes).map(|(w, &v)| w * f(v)).sum()
    }

    /// Moments of the discrete measure actually carried by the nodes.
    pub fn moments(&self) -> Moments {
        Moments {
            v_max: self.nodes.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
            m2: self.average(|v| v * v),
            m1abs: self.average(f64::abs),
        }
    }

    /// Moments of the underlying continuous measure: for the slab model
    /// `‖v‖_∞ = 1` and `⟨|v|⟩ = 1/2`; the telegraph model is already discrete.
    pub fn continuum_moments(&self) -> Moments {
        match self.model {
            VelocityModel::Telegraph => self.moments(),
            VelocityModel::Slab => Moments {
                v_max: 1.0,
                m2: 1.0 / 3.0,
                m1abs: 0.5,
            },
        }
    }
}
