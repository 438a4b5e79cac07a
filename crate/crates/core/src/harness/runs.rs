use std::fmt::Write as _;

use rayon::prelude::*;

use super::{ExperimentSpec, InitialCondition, ReferenceChoice, GROWTH_LIMIT};
use crate::basis::GaussRule;
use crate::error::{Error, Result};
use crate::fields::{DGField, Mesh1D};
use crate::limit::{step_limit, LimitState};
use crate::scheme::{
    advance, diagnostics, dt_stab, stability_constants_c0, step_imex1, SchemeConfig, State,
};
use crate::velocity::VelocitySpace;

/// `‖a − b‖` for fields on nested meshes of the same domain, integrated on
/// the finer mesh with `(k + 3)`-point Gauss quadrature per cell.
pub fn l2_distance(a: &DGField, b: &DGField) -> f64 {
    let (fine, coarse) = if a.mesh().cells() >= b.mesh().cells() {
        (a, b)
    } else {
        (b, a)
    };
    let mesh = *fine.mesh();
    let rule = GaussRule::new(fine.degree().max(coarse.degree()) + 3);
    let half_h = 0.5 * mesh.h();
    (0..mesh.cells())
        .map(|i| {
            half_h
                * rule.integrate(|xi| {
                    let x = mesh.map(i, xi);
                    (fine.eval_ref(i, xi) - coarse.eval(x)).powi(2)
                })
        })
        .sum::<f64>()
        .sqrt()
}

fn kinetic_distance(a: &State, b: &State, space: &VelocitySpace) -> f64 {
    a.g.nodes()
        .iter()
        .zip(b.g.nodes())
        .zip(space.weights())
        .map(|((ga, gb), w)| w * l2_distance(ga, gb).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn mesh_for(spec: &ExperimentSpec, cells: usize) -> Result<Mesh1D> {
    Mesh1D::new(spec.x_min, spec.x_max, cells)
}

fn base_config(spec: &ExperimentSpec, space: &VelocitySpace, cells: usize, eps: f64) -> Result<SchemeConfig> {
    Ok(
        SchemeConfig::new(mesh_for(spec, cells)?, spec.degree, space.clone(), eps, 1.0)
            .with_flux(spec.flux)
            .with_bh(spec.include_bh),
    )
}

/// `σ Δt_stab`, or the user step clipped to it unless overridden. Returns
/// `(dt, Δt_stab)`; `Δt_stab` is NaN where no bound exists.
fn choose_dt(spec: &ExperimentSpec, config: &SchemeConfig) -> Result<(f64, f64)> {
    let stab = match dt_stab(config, spec.moments) {
        Ok(c) => c.dt_stab,
        Err(e) if spec.dt.is_none() => return Err(e),
        Err(_) => f64::NAN,
    };
    let bound = spec.safety * stab;
    let dt = match spec.dt {
        None => bound,
        Some(d) if spec.dt_override || bound.is_nan() => d,
        Some(d) => d.min(bound),
    };
    Ok((dt, stab))
}

fn steps_for(tmax: f64, dt: f64) -> usize {
    ((tmax / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRow {
    pub step: usize,
    pub time: f64,
    /// `‖ρ^n‖² + ε²|||g^{n−1}|||²` (row 0 pairs `ρ⁰` with `g⁰`).
    pub energy: f64,
    pub rho_norm: f64,
    pub g_norm: f64,
    pub mean_g_norm: f64,
    pub mass: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub header: String,
    pub config: SchemeConfig,
    pub dt: f64,
    pub dt_stab: f64,
    pub rows: Vec<SolveRow>,
    pub diverged_at: Option<usize>,
    pub final_state: State,
}

impl SolveReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.header).unwrap();
        writeln!(
            s,
            "# dt={},dt_stab={},diverged_at={}",
            self.dt,
            self.dt_stab,
            self.diverged_at
                .map_or_else(|| "none".to_string(), |n| n.to_string())
        )
        .unwrap();
        writeln!(s, "n,t,energy,rho_norm,g_norm,mean_g_norm,mass,status").unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.step,
                r.time,
                r.energy,
                r.rho_norm,
                r.g_norm,
                r.mean_g_norm,
                r.mass,
                if r.diverged { "diverged" } else { "ok" }
            )
            .unwrap();
        }
        s
    }
}

/// Steps one configuration to `tmax` (or `steps`), recording diagnostics
/// every step and stopping at the first sign of divergence.
pub fn run_solve(spec: &ExperimentSpec) -> Result<SolveReport> {
    spec.validate()?;
    let space = spec.space()?;
    let mut config = base_config(spec, &space, spec.cells[0], spec.eps[0])?;
    let (mut dt, stab) = choose_dt(spec, &config)?;
    let steps = match spec.steps {
        Some(n) => n,
        None => {
            // land exactly on tmax
            let n = steps_for(spec.tmax, dt);
            dt = spec.tmax / n as f64;
            n
        }
    };
    config.dt = dt;
    config.validate()?;
    let eps = config.eps;

    let mut state = spec.ic.build_state(&config, spec.seed);
    let g0 = state.g.norm_triple(&space);
    let e0 = state.rho.norm_sq() + eps * eps * g0 * g0;
    let mut rows = vec![SolveRow {
        step: 0,
        time: 0.0,
        energy: e0,
        rho_norm: state.rho.norm(),
        g_norm: g0,
        mean_g_norm: state.g.bracket(&space).norm(),
        mass: state.rho.integral(),
        diverged: false,
    }];
    let limit = GROWTH_LIMIT * e0.max(f64::MIN_POSITIVE);
    let mut diverged_at = None;
    for _ in 0..steps {
        let next = step_imex1(&state, &config);
        let d = diagnostics(&state, &next, &config);
        let g_norm = next.g.norm_triple(&space);
        let diverged = !(d.energy.is_finite() && next.is_finite()) || d.energy > limit;
        rows.push(SolveRow {
            step: next.step,
            time: next.time,
            energy: d.energy,
            rho_norm: next.rho.norm(),
            g_norm,
            mean_g_norm: d.mean_g_norm,
            mass: next.rho.integral(),
            diverged,
        });
        state = next;
        if diverged {
            diverged_at = Some(state.step);
            break;
        }
    }
    Ok(SolveReport {
        header: spec.header(),
        config,
        dt,
        dt_stab: stab,
        rows,
        diverged_at,
        final_state: state,
    })
}

/// What the errors in a convergence table were measured against.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Heat,
    SelfRefined { cells: usize, dt: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub cells: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub err_rho: f64,
    pub order_rho: Option<f64>,
    /// `ε |||g_h − g_ref|||`.
    pub err_g: f64,
    pub order_g: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub header: String,
    pub references: Vec<(f64, Reference)>,
    pub rows: Vec<ConvergenceRow>,
    /// `ε` values whose error sequence failed to decrease monotonically.
    pub non_monotone: Vec<f64>,
}

impl ConvergenceReport {
    pub fn rows_for(&self, eps: f64) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.eps == eps)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.header).unwrap();
        for (eps, r) in &self.references {
            match r {
                Reference::Heat => writeln!(s, "# eps={eps},reference=heat").unwrap(),
                Reference::SelfRefined { cells, dt } => {
                    writeln!(s, "# eps={eps},reference=self,ref_cells={cells},ref_dt={dt}").unwrap()
                }
            }
        }
        writeln!(s, "eps,cells,h,dt,steps,err_rho,order_rho,err_g,order_g,monotone").unwrap();
        let opt = |o: Option<f64>| o.map_or_else(String::new, |v| v.to_string());
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.eps,
                r.cells,
                r.h,
                r.dt,
                r.steps,
                r.err_rho,
                opt(r.order_rho),
                r.err_g,
                opt(r.order_g),
                !self.non_monotone.contains(&r.eps)
            )
            .unwrap();
        }
        s
    }
}

fn order(prev: f64, cur: f64, prev_cells: usize, cells: usize) -> f64 {
    (prev / cur).ln() / (cells as f64 / prev_cells as f64).ln()
}

/// Spatial convergence table with `Δt ∝ h^{k+1}` capped by `σ Δt_stab`.
pub fn run_convergence(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    spec.validate()?;
    let space = spec.space()?;
    let k = spec.degree;
    let m2 = space.moments().m2;
    let mut rows = Vec::new();
    let mut references = Vec::new();
    let mut non_monotone = Vec::new();

    for &eps in &spec.eps {
        let reference = match spec.reference {
            ReferenceChoice::Auto if spec.ic == InitialCondition::Sin && eps <= 1e-6 => {
                ReferenceChoice::Heat
            }
            ReferenceChoice::Auto => ReferenceChoice::SelfRefined,
            r => r,
        };
        if reference == ReferenceChoice::Heat && spec.ic != InitialCondition::Sin {
            return Err(Error::Config("the heat reference needs the `sin` initial condition".into()));
        }

        let coarse = base_config(spec, &space, spec.cells[0], eps)?;
        let (dt0, _) = choose_dt(spec, &coarse)?;
        let h0 = coarse.mesh.h();
        let level_dt = |config: &SchemeConfig| -> Result<f64> {
            let (cap, _) = choose_dt(spec, config)?;
            let scaled = dt0 * (config.mesh.h() / h0).powi(k as i32 + 1);
            Ok(if spec.dt_override { scaled } else { scaled.min(cap) })
        };

        let mut jobs = Vec::new();
        for &cells in &spec.cells {
            let mut config = base_config(spec, &space, cells, eps)?;
            let dt = level_dt(&config)?;
            let steps = steps_for(spec.tmax, dt);
            config.dt = spec.tmax / steps as f64;
            jobs.push((config, steps));
        }
        let finest_dt = jobs.last().map(|(c, _)| c.dt).unwrap();
        if reference == ReferenceChoice::SelfRefined {
            let cells = 4 * spec.cells.last().unwrap();
            let mut config = base_config(spec, &space, cells, eps)?;
            let (cap, _) = choose_dt(spec, &config)?;
            let dt = (finest_dt / 16.0).min(cap);
            let steps = steps_for(spec.tmax, dt);
            config.dt = spec.tmax / steps as f64;
            jobs.push((config, steps));
        }

        let finals: Vec<State> = jobs
            .par_iter()
            .map(|(config, steps)| {
                let s0 = spec.ic.build_state(config, spec.seed);
                advance(&s0, config, *steps)
            })
            .collect();

        let n_levels = spec.cells.len();
        let errors: Vec<(f64, f64)> = match reference {
            ReferenceChoice::Heat => {
                let decay = (-m2 * spec.tmax).exp();
                finals[..n_levels]
                    .iter()
                    .map(|s| {
                        let e_rho = s.rho.l2_error(|x| decay * x.sin());
                        let e_g = s
                            .g
                            .nodes()
                            .iter()
                            .zip(space.nodes())
                            .zip(space.weights())
                            .map(|((g, &v), w)| w * g.l2_error(|x| -v * decay * x.cos()).powi(2))
                            .sum::<f64>()
                            .sqrt();
                        (e_rho, eps * e_g)
                    })
                    .collect()
            }
            _ => {
                let reference_state = &finals[n_levels];
                finals[..n_levels]
                    .iter()
                    .map(|s| {
                        (
                            l2_distance(&s.rho, &reference_state.rho),
                            eps * kinetic_distance(s, reference_state, &space),
                        )
                    })
                    .collect()
            }
        };

        references.push((
            eps,
            match reference {
                ReferenceChoice::Heat => Reference::Heat,
                _ => {
                    let (c, _) = &jobs[n_levels];
                    Reference::SelfRefined {
                        cells: c.mesh.cells(),
                        dt: c.dt,
                    }
                }
            },
        ));

        let mut monotone = true;
        for (level, ((config, steps), &(err_rho, err_g))) in jobs.iter().zip(&errors).enumerate() {
            let (order_rho, order_g) = if level == 0 {
                (None, None)
            } else {
                let (prev_rho, prev_g) = errors[level - 1];
                let pc = spec.cells[level - 1];
                let c = spec.cells[level];
                if err_rho >= prev_rho {
                    monotone = false;
                }
                (
                    Some(order(prev_rho, err_rho, pc, c)),
                    (eps > 0.0).then(|| order(prev_g, err_g, pc, c)),
                )
            };
            rows.push(ConvergenceRow {
                eps,
                cells: config.mesh.cells(),
                h: config.mesh.h(),
                dt: config.dt,
                steps: *steps,
                err_rho,
                order_rho,
                err_g,
                order_g,
            });
        }
        if !monotone {
            non_monotone.push(eps);
        }
    }

    Ok(ConvergenceReport {
        header: spec.header(),
        references,
        rows,
        non_monotone,
    })
}

/// Outcome of one bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanStatus {
    /// Stable at `Δt_stab`, bracketed from above.
    Bracketed,
    /// Never became unstable within the widened search range.
    Unbounded,
    /// Unstable already at `Δt_stab`.
    BelowTheory,
}

impl ScanStatus {
    fn as_str(&self) -> &'static str {
        match self {
            ScanStatus::Bracketed => "ok",
            ScanStatus::Unbounded => "unbounded",
            ScanStatus::BelowTheory => "below-theory",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub eps: f64,
    pub cells: usize,
    pub h: f64,
    /// Largest step found stable.
    pub dt_empirical: f64,
    pub dt_stab: f64,
    pub ratio: f64,
    pub status: ScanStatus,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub header: String,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.header).unwrap();
        writeln!(s, "eps,cells,h,dt_empirical,dt_stab,ratio,status").unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.eps,
                r.cells,
                r.h,
                r.dt_empirical,
                r.dt_stab,
                r.ratio,
                r.status.as_str()
            )
            .unwrap();
        }
        s
    }
}

/// Relative width at which the bisection stops.
pub const SCAN_TOLERANCE: f64 = 0.02;
/// Each stability probe runs at least this many steps.
pub const SCAN_MIN_STEPS: usize = 50;
const BRACKET_DOUBLINGS: usize = 16;

/// Runs `config` from the spec's initial data to `tmax` and reports whether
/// the energy stayed finite and below `GROWTH_LIMIT` times its initial value.
pub fn is_stable(spec: &ExperimentSpec, config: &SchemeConfig) -> bool {
    let eps = config.eps;
    let mut state = spec.ic.build_state(config, spec.seed);
    let g0 = state.g.norm_triple(&config.space);
    let e0 = state.rho.norm_sq() + eps * eps * g0 * g0;
    let limit = GROWTH_LIMIT * e0.max(f64::MIN_POSITIVE);
    let steps = steps_for(spec.tmax, config.dt).max(SCAN_MIN_STEPS);
    for _ in 0..steps {
        state = step_imex1(&state, config);
        match state.energy(eps) {
            Some(e) if e.is_finite() && e <= limit => {}
            _ => return false,
        }
    }
    state.is_finite()
}

fn scan_point(spec: &ExperimentSpec, base: &SchemeConfig, dt_stab: f64) -> (f64, ScanStatus) {
    let stable = |dt: f64| is_stable(spec, &base.clone().with_dt(dt));
    let (mut lo, mut hi);
    let mut status = ScanStatus::Bracketed;
    if stable(dt_stab) {
        lo = dt_stab;
        hi = 2.0 * dt_stab;
        let mut found = false;
        // one widening retry after the first failed bracket
        for _ in 0..2 * BRACKET_DOUBLINGS {
            if !stable(hi) {
                found = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !found {
            return (lo, ScanStatus::Unbounded);
        }
    } else {
        status = ScanStatus::BelowTheory;
        hi = dt_stab;
        lo = 0.5 * dt_stab;
        let mut found = false;
        for _ in 0..2 * BRACKET_DOUBLINGS {
            if stable(lo) {
                found = true;
                break;
            }
            hi = lo;
            lo *= 0.5;
        }
        if !found {
            return (0.0, status);
        }
    }
    while (hi - lo) > SCAN_TOLERANCE * lo {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, status)
}

/// Bisects the largest stable step for every `(ε, N)` pair.
pub fn run_stability_scan(spec: &ExperimentSpec) -> Result<ScanReport> {
    spec.validate()?;
    let space = spec.space()?;
    let mut points = Vec::new();
    for &eps in &spec.eps {
        for &cells in &spec.cells {
            let config = base_config(spec, &space, cells, eps)?;
            let stab = dt_stab(&config, spec.moments)?.dt_stab;
            points.push((config, stab));
        }
    }
    let rows = points
        .par_iter()
        .map(|(config, stab)| {
            let (dt_empirical, status) = scan_point(spec, config, *stab);
            ScanRow {
                eps: config.eps,
                cells: config.mesh.cells(),
                h: config.mesh.h(),
                dt_empirical,
                dt_stab: *stab,
                ratio: dt_empirical / stab,
                status,
            }
        })
        .collect();
    Ok(ScanReport {
        header: spec.header(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApLimitRow {
    pub eps: f64,
    pub rho_distance: f64,
    pub q_distance: f64,
}

#[derive(Debug, Clone)]
pub struct ApLimitReport {
    pub header: String,
    pub dt: f64,
    pub steps: usize,
    pub rows: Vec<ApLimitRow>,
    /// Whether both distances shrink along the given `ε` list.
    pub monotone: bool,
    pub limit_state: LimitState,
}

impl ApLimitReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.header).unwrap();
        writeln!(s, "# dt={},steps={},monotone={}", self.dt, self.steps, self.monotone).unwrap();
        writeln!(s, "eps,rho_distance,q_distance").unwrap();
        for r in &self.rows {
            writeln!(s, "{},{},{}", r.eps, r.rho_distance, r.q_distance).unwrap();
        }
        s
    }
}

/// Runs the kinetic scheme for each `ε` next to the limiting heat scheme
/// from the same data and reports their distances after the last step.
pub fn run_ap_limit(spec: &ExperimentSpec) -> Result<ApLimitReport> {
    spec.validate()?;
    let space = spec.space()?;
    let m2 = space.moments().m2;
    let mut config = base_config(spec, &space, spec.cells[0], 0.0)?;
    let bound = stability_constants_c0(
        &space,
        spec.degree,
        config.mesh.h(),
        0.0,
        spec.include_bh,
        spec.moments,
        spec.c0,
    )?
    .dt_stab;
    let dt = match spec.dt {
        Some(d) if spec.dt_override => d,
        Some(d) => d.min(spec.safety * bound),
        None => spec.safety * bound,
    };
    config.dt = dt;
    let steps = spec.steps.unwrap_or_else(|| steps_for(spec.tmax, dt));

    let initial = spec.ic.build_state(&config, spec.seed);
    let mut limit = LimitState {
        rho: initial.rho.clone(),
        q: initial.g.flux_moment(&space),
        step: 0,
        time: 0.0,
    };
    for _ in 0..steps {
        limit = step_limit(&limit, dt, spec.flux, m2);
    }

    let rows: Vec<ApLimitRow> = spec
        .eps
        .par_iter()
        .map(|&eps| {
            let mut cfg = config.clone();
            cfg.eps = eps;
            let s = advance(&initial, &cfg, steps);
            ApLimitRow {
                eps,
                rho_distance: s.rho.difference(&limit.rho).norm(),
                q_distance: s.g.flux_moment(&space).difference(&limit.q).norm(),
            }
        })
        .collect();
    let monotone = rows
        .windows(2)
        .all(|w| w[1].rho_distance <= w[0].rho_distance && w[1].q_distance <= w[0].q_distance);
    Ok(ApLimitReport {
        header: spec.header(),
        dt,
        steps,
        rows,
        monotone,
        limit_state: limit,
    })
}
