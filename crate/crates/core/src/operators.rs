//! Spatial DG operators of the micro-macro scheme.
//!
//! Every operator returns the mass-inverted field `r ∈ U_h^k` whose L² inner
//! product with a test function reproduces the corresponding bilinear form,
//! so no mass solve appears anywhere downstream.
//!
//! For a piecewise polynomial `u` and interface values `F̂_{i−1/2}`, the
//! shared kernel is
//!
//! ```text
//! (r, φ) = −Σ_i ∫_{I_i} u φ_x dx − Σ_i F̂_{i−1/2} [φ]_{i−1/2}
//! ```
//!
//! which is `a_h` for `u = ⟨vg⟩`, the upwind `D_h` for `u = v g`, and `−d_h`
//! for `u = ρ`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::{DGField, KineticField};
use crate::velocity::VelocitySpace;

/// How an interface value is built from the two one-sided traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceChoice {
    Minus,
    Plus,
    Average,
}

/// Interface fluxes for `⟨vg⟩̂` (and the limit variable `q̂`) and `ρ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FluxChoice {
    pub q_trace: TraceChoice,
    pub rho_trace: TraceChoice,
}

impl FluxChoice {
    /// `⟨vg⟩̂ = ⟨vg⟩⁻`, `ρ̂ = ρ⁺`.
    pub const ALTERNATING_LR: Self = Self {
        q_trace: TraceChoice::Minus,
        rho_trace: TraceChoice::Plus,
    };
    /// `⟨vg⟩̂ = ⟨vg⟩⁺`, `ρ̂ = ρ⁻`.
    pub const ALTERNATING_RL: Self = Self {
        q_trace: TraceChoice::Plus,
        rho_trace: TraceChoice::Minus,
    };
    /// Both fluxes are interface averages.
    pub const CENTRAL: Self = Self {
        q_trace: TraceChoice::Average,
        rho_trace: TraceChoice::Average,
    };

    pub const PAIRED: [Self; 3] = [Self::ALTERNATING_LR, Self::ALTERNATING_RL, Self::CENTRAL];

    /// Arbitrary combination of traces. Only the three paired choices carry
    /// the stability and convergence guarantees; anything else is experimental.
    pub fn mixed(q_trace: TraceChoice, rho_trace: TraceChoice) -> Self {
        Self { q_trace, rho_trace }
    }

    pub fn is_paired(&self) -> bool {
        Self::PAIRED.contains(self)
    }

    pub fn is_alternating(&self) -> bool {
        *self == Self::ALTERNATING_LR || *self == Self::ALTERNATING_RL
    }
}

impl fmt::Display for FluxChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::ALTERNATING_LR => f.write_str("alt-lr"),
            Self::ALTERNATING_RL => f.write_str("alt-rl"),
            Self::CENTRAL => f.write_str("central"),
            FluxChoice { q_trace, rho_trace } => {
                write!(f, "mixed-{q_trace:?}-{rho_trace:?}")
            }
        }
    }
}

impl FromStr for FluxChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alt-lr" => Ok(Self::ALTERNATING_LR),
            "alt-rl" => Ok(Self::ALTERNATING_RL),
            "central" => Ok(Self::CENTRAL),
            other => Err(Error::Config(format!("unknown flux `{other}`"))),
        }
    }
}

/// Upwind value `ṽg` at an interface: `v g⁻` for `v > 0`, `v g⁺` for `v < 0`.
pub fn upwind_flux(v: f64, minus: f64, plus: f64) -> f64 {
    if v > 0.0 {
        v * minus
    } else {
        v * plus
    }
}

/// Mass-inverted `−Σ ∫ u φ_x − Σ F̂ [φ]`, with `flux[i]` the value at the
/// left interface of cell `i`.
pub fn weak_divergence(u: &DGField, flux: &[f64]) -> DGField {
    let mesh = *u.mesh();
    let n = mesh.cells();
    assert_eq!(flux.len(), n, "one flux value per interface");
    let m = u.modes();
    let h = mesh.h();
    let inv_mass: Vec<f64> = (0..m).map(|j| (2 * j + 1) as f64 / h).collect();
    let mut out = vec![0.0; n * m];
    for (i, (c, r)) in u.coeffs().chunks_exact(m).zip(out.chunks_exact_mut(m)).enumerate() {
        let f_left = flux[i];
        let f_right = if i + 1 == n { flux[0] } else { flux[i + 1] };
        // ∫ u ∂_x P_j dx = 2 Σ_{m<j, j−m odd} c_m; running sums by parity.
        let mut parity_sums = [0.0, 0.0];
        for j in 0..m {
            let volume = 2.0 * parity_sums[(j + 1) % 2];
            let left_sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let dual = -volume + f_right - left_sign * f_left;
            r[j] = dual * inv_mass[j];
            parity_sums[j % 2] += c[j];
        }
    }
    DGField::from_coeffs(mesh, u.degree(), out)
}

/// `(u⁻, u⁺)` at every interface, indexed by the cell to its right.
fn one_sided_traces(field: &DGField) -> (Vec<f64>, Vec<f64>) {
    let m = field.modes();
    let n = field.mesh().cells();
    let mut minus = vec![0.0; n];
    let mut plus = vec![0.0; n];
    for (i, c) in field.coeffs().chunks_exact(m).enumerate() {
        let (mut right, mut left) = (0.0, 0.0);
        for (j, &cj) in c.iter().enumerate() {
            right += cj;
            left += if j % 2 == 0 { cj } else { -cj };
        }
        minus[if i + 1 == n { 0 } else { i + 1 }] = right;
        plus[i] = left;
    }
    (minus, plus)
}

fn interface_values(field: &DGField, choice: TraceChoice) -> Vec<f64> {
    let (minus, plus) = one_sided_traces(field);
    match choice {
        TraceChoice::Minus => minus,
        TraceChoice::Plus => plus,
        TraceChoice::Average => minus.iter().zip(&plus).map(|(a, b)| 0.5 * (a + b)).collect(),
    }
}

/// `a_h` applied to a given flux variable `q` (`⟨vg⟩` in the kinetic scheme,
/// the limit flux in the heat scheme).
pub fn apply_ah_moment(q: &DGField, flux: FluxChoice) -> DGField {
    weak_divergence(q, &interface_values(q, flux.q_trace))
}

/// `(r, φ) = a_h(g, φ)`: DG divergence of `⟨vg⟩`.
pub fn apply_ah(g: &KineticField, space: &VelocitySpace, flux: FluxChoice) -> DGField {
    apply_ah_moment(&g.flux_moment(space), flux)
}

/// `(D, ψ) = d_h(ρ, ψ)`, the weak form of `−∂_x ρ`.
pub fn apply_dh(rho: &DGField, flux: FluxChoice) -> DGField {
    let mut out = weak_divergence(rho, &interface_values(rho, flux.rho_trace));
    out.scale(-1.0);
    out
}

/// Upwind `D_h(g; v)` at a single velocity.
pub fn apply_dh_upwind_node(g: &DGField, v: f64) -> DGField {
    let (minus, plus) = one_sided_traces(g);
    let flux: Vec<f64> = minus
        .iter()
        .zip(&plus)
        .map(|(&gm, &gp)| upwind_flux(v, gm, gp))
        .collect();
    let vg = g.scaled(v);
    weak_divergence(&vg, &flux)
}

/// Upwind `D_h(g; v_q)` at every velocity node.
pub fn apply_dh_upwind(g: &KineticField, space: &VelocitySpace) -> KineticField {
    assert_eq!(g.len(), space.len(), "velocity node count mismatch");
    KineticField::from_nodes(
        g.nodes()
            .iter()
            .zip(space.nodes())
            .map(|(gq, &v)| apply_dh_upwind_node(gq, v))
            .collect(),
    )
}

/// `b_{h,v}(g, ·) = ((I − Π) D_h(g; v), ·)`.
pub fn apply_bh(g: &KineticField, space: &VelocitySpace) -> KineticField {
    let mut d = apply_dh_upwind(g, space);
    let mean = d.bracket(space);
    for q in 0..d.len() {
        d.node_mut(q).axpy(-1.0, &mean);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{project, Mesh1D, ProjectionKind};

    fn mesh(n: usize) -> Mesh1D {
        Mesh1D::periodic_unit_circle(n).unwrap()
    }

    #[test]
    fn flux_parsing() {
        for f in FluxChoice::PAIRED {
            assert_eq!(f.to_string().parse::<FluxChoice>().unwrap(), f);
            assert!(f.is_paired());
        }
        assert!("upwind".parse::<FluxChoice>().is_err());
        assert!(!FluxChoice::mixed(TraceChoice::Average, TraceChoice::Minus).is_paired());
    }

    #[test]
    fn upwind_takes_the_upstream_trace() {
        assert_eq!(upwind_flux(1.0, 2.0, 0.0), 2.0);
        assert_eq!(upwind_flux(-1.0, 2.0, 0.0), 0.0);
        assert_eq!(upwind_flux(-1.0, 0.0, 2.0), -2.0);
        // v{g} − |v|/2 [g]
        let (v, gm, gp) = (0.4, 1.3, -0.7);
        let avg = 0.5 * (gm + gp);
        assert!((upwind_flux(v, gm, gp) - (v * avg - 0.5 * v.abs() * (gp - gm))).abs() < 1e-15);
    }

    #[test]
    fn constants_are_annihilated() {
        let space = VelocitySpace::slab(4).unwrap();
        let m = mesh(8);
        let g = KineticField::project(|_, v| 1.0 + v * v, m, 2, &space);
        let rho = DGField::constant(m, 2, 4.0);
        for flux in FluxChoice::PAIRED {
            assert!(apply_ah(&g, &space, flux).max_abs_coeff() < 1e-13);
            assert!(apply_dh(&rho, flux).max_abs_coeff() < 1e-13);
        }
        let d = apply_dh_upwind(&g, &space);
        assert!(d.nodes().iter().all(|f| f.max_abs_coeff() < 1e-13));
    }

    #[test]
    fn first_order_is_a_difference_quotient() {
        let m = Mesh1D::new(0.0, 4.0, 4).unwrap();
        let u = DGField::from_coeffs(m, 0, vec![1.0, 3.0, 2.0, 5.0]);
        let r = apply_ah_moment(&u, FluxChoice::ALTERNATING_LR);
        // backward differences with periodic wrap
        assert_eq!(r.coeffs(), &[-4.0, 2.0, -1.0, 3.0]);
        let d = apply_dh(&u, FluxChoice::ALTERNATING_LR);
        // ρ̂ = ρ⁺ gives −forward difference
        assert_eq!(d.coeffs(), &[-2.0, 1.0, -3.0, 4.0]);
    }

    #[test]
    fn conservation_of_divergence() {
        let space = VelocitySpace::telegraph();
        let m = mesh(11);
        let g = KineticField::project(|x, v| v * (x.sin() + 0.3 * (2.0 * x).cos()) + x.cos(), m, 3, &space);
        for flux in FluxChoice::PAIRED {
            assert!(apply_ah(&g, &space, flux).integral().abs() < 1e-13);
        }
    }

    #[test]
    fn bh_output_has_zero_mean() {
        let space = VelocitySpace::slab(6).unwrap();
        let g = KineticField::project(|x, v| (x + v).sin() * v, mesh(9), 2, &space);
        let b = apply_bh(&g, &space);
        assert!(b.bracket(&space).max_abs_coeff() < 1e-13);
        let zero = KineticField::zeros(*g.mesh(), 2, space.len());
        assert!(apply_bh(&zero, &space).nodes().iter().all(|f| f.max_abs_coeff() == 0.0));
    }

    #[test]
    fn dh_approximates_minus_derivative() {
        // on the Radau projection matching the ρ trace the error is that of
        // the L² projection of −ρ′
        let errs: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| {
                let rho = project(f64::sin, mesh(n), 1, ProjectionKind::RadauMinus);
                apply_dh(&rho, FluxChoice::ALTERNATING_RL).l2_error(|x| -x.cos())
            })
            .collect();
        let rate = (errs[0] / errs[1]).log2();
        assert!(rate > 1.7, "rate {rate}");
    }
}
