//! Experiment drivers: single solves, convergence tables, stability scans and
//! `ε → 0` distance measurements. All output is CSV with a `#` header line
//! echoing the full experiment specification.

pub mod cli;
mod runs;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::{DGField, KineticField};
use crate::operators::FluxChoice;
use crate::scheme::{init_state, MomentSource, SchemeConfig, State};
use crate::velocity::{VelocityModel, VelocitySpace};

pub use runs::{
    is_stable, l2_distance, run_ap_limit, run_convergence, run_solve, run_stability_scan,
    ApLimitReport, ApLimitRow, ConvergenceReport, ConvergenceRow, Reference, ScanReport, ScanRow,
    ScanStatus, SolveReport, SolveRow, SCAN_MIN_STEPS, SCAN_TOLERANCE,
};

/// Instability threshold: a run is unstable once the energy exceeds this
/// multiple of its initial value or stops being finite.
pub const GROWTH_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Converge,
    StabilityScan,
    ApLimit,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Solve => "solve",
            Mode::Converge => "converge",
            Mode::StabilityScan => "stability-scan",
            Mode::ApLimit => "ap-limit",
        })
    }
}

/// Built-in initial data. Every entry except `IllPrepared` satisfies `⟨g⟩ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    /// `ρ = sin x`, `g = −v cos x`.
    Sin,
    /// `ρ = sin x`, `g = 1`.
    IllPrepared,
    /// `ρ = 1 + exp(−4(x − π)²)`, `g = −v ρ′(x)`.
    Gaussian,
    /// `ρ = 1`, `g = 0`.
    Constant,
    /// Seeded random DG coefficients, with the velocity mean removed from `g`.
    Random,
}

impl InitialCondition {
    pub const ALL: [Self; 5] = [
        Self::Sin,
        Self::IllPrepared,
        Self::Gaussian,
        Self::Constant,
        Self::Random,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::IllPrepared => "ill-prepared",
            Self::Gaussian => "gaussian",
            Self::Constant => "constant",
            Self::Random => "random",
        }
    }

    /// Pointwise `ρ₀(x)`; `None` for the random entry.
    pub fn rho0(&self, x: f64) -> Option<f64> {
        use std::f64::consts::PI;
        match self {
            Self::Sin | Self::IllPrepared => Some(x.sin()),
            Self::Gaussian => Some(1.0 + (-4.0 * (x - PI).powi(2)).exp()),
            Self::Constant => Some(1.0),
            Self::Random => None,
        }
    }

    /// Pointwise `g₀(x, v)`; `None` for the random entry.
    pub fn g0(&self, x: f64, v: f64) -> Option<f64> {
        use std::f64::consts::PI;
        match self {
            Self::Sin => Some(-v * x.cos()),
            Self::IllPrepared => Some(1.0),
            Self::Gaussian => {
                let d = x - PI;
                Some(v * 8.0 * d * (-4.0 * d * d).exp())
            }
            Self::Constant => Some(0.0),
            Self::Random => None,
        }
    }

    /// Initial state for `config`; `seed` only matters for `Random`.
    pub fn build_state(&self, config: &SchemeConfig, seed: u64) -> State {
        if *self == Self::Random {
            return random_state(config, seed);
        }
        init_state(
            |x| self.rho0(x).unwrap_or(0.0),
            |x, v| self.g0(x, v).unwrap_or(0.0),
            config,
        )
    }
}

impl FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|ic| ic.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown initial condition `{s}`")))
    }
}

fn random_state(config: &SchemeConfig, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mesh, k, nv) = (config.mesh, config.degree, config.space.len());
    let size = mesh.cells() * (k + 1);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..size).map(|_| rng.random_range(-1.0..1.0)).collect()
    };
    let rho = DGField::from_coeffs(mesh, k, draw(&mut rng));
    let mut g = KineticField::from_nodes(
        (0..nv)
            .map(|_| DGField::from_coeffs(mesh, k, draw(&mut rng)))
            .collect(),
    );
    let mean = g.bracket(&config.space);
    for q in 0..nv {
        g.node_mut(q).axpy(-1.0, &mean);
    }
    State {
        rho,
        g,
        step: 0,
        time: 0.0,
        prev_g_norm: None,
    }
}

/// Which reference a convergence study measures against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferenceChoice {
    /// Heat-equation solution when the data is `sin` and `ε ≤ 1e-6`,
    /// otherwise self-convergence.
    #[default]
    Auto,
    /// `ρ = e^{−⟨v²⟩t} sin x`.
    Heat,
    /// Solution on a 4× refined mesh with `Δt/16`.
    SelfRefined,
}

impl fmt::Display for ReferenceChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Heat => "heat",
            Self::SelfRefined => "self",
        })
    }
}

impl FromStr for ReferenceChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "heat" => Ok(Self::Heat),
            "self" => Ok(Self::SelfRefined),
            other => Err(Error::Config(format!("unknown reference `{other}`"))),
        }
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub model: VelocityModel,
    pub nv: usize,
    pub degree: usize,
    pub cells: Vec<usize>,
    pub eps: Vec<f64>,
    /// Fixed step; `None` selects `σ Δt_stab`.
    pub dt: Option<f64>,
    /// Allow a user `dt` above `σ Δt_stab` (instability demonstrations).
    pub dt_override: bool,
    pub flux: FluxChoice,
    pub include_bh: bool,
    pub safety: f64,
    pub c0: f64,
    pub tmax: f64,
    /// Fixed number of steps; takes precedence over `tmax` where it applies.
    pub steps: Option<usize>,
    pub ic: InitialCondition,
    pub moments: MomentSource,
    pub reference: ReferenceChoice,
    pub seed: u64,
    pub x_min: f64,
    pub x_max: f64,
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            model: VelocityModel::Telegraph,
            nv: 8,
            degree: 1,
            cells: vec![32],
            eps: vec![1e-6],
            dt: None,
            dt_override: false,
            flux: FluxChoice::ALTERNATING_LR,
            include_bh: true,
            safety: 0.9,
            c0: 0.05,
            tmax: 0.5,
            steps: None,
            ic: InitialCondition::Sin,
            moments: MomentSource::Nodes,
            reference: ReferenceChoice::Auto,
            seed: 0,
            x_min: 0.0,
            x_max: 2.0 * std::f64::consts::PI,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.cells.is_empty() || self.cells.contains(&0) {
            return fail("cell list must be non-empty and positive".into());
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return fail("eps list must be non-empty with finite values >= 0".into());
        }
        if !self.tmax.is_finite() || self.tmax <= 0.0 {
            return fail(format!("tmax must be > 0, got {}", self.tmax));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return fail(format!("safety factor must lie in (0, 1), got {}", self.safety));
        }
        if !(self.c0 > 0.0 && self.c0 < 1.0) {
            return fail(format!("c0 must lie in (0, 1), got {}", self.c0));
        }
        if self.degree > 4 {
            return fail(format!("degree must be in 0..=4, got {}", self.degree));
        }
        if let Some(dt) = self.dt {
            if !dt.is_finite() || dt <= 0.0 {
                return fail(format!("dt must be > 0, got {dt}"));
            }
        }
        if self.steps == Some(0) {
            return fail("steps must be positive".into());
        }
        if !self.include_bh && self.model != VelocityModel::Telegraph && self.dt.is_none() {
            return fail("dropping b_h requires the telegraph model or an explicit dt".into());
        }
        self.space()?;
        match self.mode {
            Mode::Solve if self.cells.len() != 1 || self.eps.len() != 1 => {
                fail("solve takes a single cell count and a single eps".into())
            }
            Mode::Converge if self.cells.len() < 3 => {
                fail("converge needs at least three cell counts".into())
            }
            Mode::Converge if self.cells.windows(2).any(|w| w[1] != 2 * w[0]) => {
                fail("converge needs cell counts doubling at each level".into())
            }
            Mode::ApLimit if self.cells.len() != 1 => {
                fail("ap-limit takes a single cell count".into())
            }
            _ => Ok(()),
        }
    }

    pub fn space(&self) -> Result<VelocitySpace> {
        VelocitySpace::new(self.model, self.nv)
    }

    /// The `#` line echoing every parameter.
    pub fn header(&self) -> String {
        let join = |v: Vec<String>| v.join(";");
        format!(
            "# mode={},model={},nv={},k={},cells={},eps={},dt={},dt_override={},flux={},include_bh={},safety={},c0={},tmax={},steps={},ic={},moments={},reference={},seed={},x_min={},x_max={}",
            self.mode,
            self.model,
            self.nv,
            self.degree,
            join(self.cells.iter().map(|c| c.to_string()).collect()),
            join(self.eps.iter().map(|e| e.to_string()).collect()),
            self.dt.map_or_else(|| "auto".to_string(), |d| d.to_string()),
            self.dt_override,
            self.flux,
            self.include_bh,
            self.safety,
            self.c0,
            self.tmax,
            self.steps.map_or_else(|| "auto".to_string(), |s| s.to_string()),
            self.ic.name(),
            match self.moments {
                MomentSource::Nodes => "nodes",
                MomentSource::Continuum => "continuum",
            },
            self.reference,
            self.seed,
            self.x_min,
            self.x_max,
        )
    }
}
