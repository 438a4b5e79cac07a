//! Periodic uniform mesh, piecewise-polynomial fields, projections, traces
//! and norms.

use crate::basis::{self, GaussRule};
use crate::error::{Error, Result};
use crate::velocity::VelocitySpace;

/// Uniform periodic partition of `[x_min, x_max]` into `cells` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    x_min: f64,
    x_max: f64,
    cells: usize,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::Config("mesh needs at least one cell".into()));
        }
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(Error::Config(format!(
                "invalid domain [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            cells,
        })
    }

    /// `[0, 2π]` with `cells` intervals.
    pub fn periodic_unit_circle(cells: usize) -> Result<Self> {
        Self::new(0.0, 2.0 * std::f64::consts::PI, cells)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn h(&self) -> f64 {
        self.length() / self.cells as f64
    }

    pub fn x_left(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h()
    }

    pub fn x_right(&self, i: usize) -> f64 {
        if i + 1 == self.cells {
            self.x_max
        } else {
            self.x_min + (i + 1) as f64 * self.h()
        }
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.h()
    }

    /// Physical coordinate of reference point `ξ` in cell `i`.
    pub fn map(&self, i: usize, xi: f64) -> f64 {
        self.center(i) + 0.5 * self.h() * xi
    }

    /// Cell index and reference coordinate of `x`, wrapped periodically.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let l = self.length();
        let mut s = (x - self.x_min).rem_euclid(l);
        if s >= l {
            s = 0.0;
        }
        let h = self.h();
        let i = ((s / h).floor() as usize).min(self.cells - 1);
        let xi = (2.0 * (s - i as f64 * h) / h - 1.0).clamp(-1.0, 1.0);
        (i, xi)
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.cells - 1) % self.cells
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.cells
    }
}

/// Side of an interface: `Minus` is the limit from the left cell,
/// `Plus` from the right cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Piecewise-P^k function stored as Legendre coefficients, cell-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DGField {
    mesh: Mesh1D,
    degree: usize,
    coeffs: Vec<f64>,
}

impl DGField {
    pub fn zeros(mesh: Mesh1D, degree: usize) -> Self {
        Self {
            mesh,
            degree,
            coeffs: vec![0.0; mesh.cells() * (degree + 1)],
        }
    }

    pub fn from_coeffs(mesh: Mesh1D, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(
            coeffs.len(),
            mesh.cells() * (degree + 1),
            "coefficient count does not match mesh and degree"
        );
        Self {
            mesh,
            degree,
            coeffs,
        }
    }

    /// The field equal to `value` everywhere.
    pub fn constant(mesh: Mesh1D, degree: usize, value: f64) -> Self {
        let mut f = Self::zeros(mesh, degree);
        for i in 0..mesh.cells() {
            f.cell_mut(i)[0] = value;
        }
        f
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modes(&self) -> usize {
        self.degree + 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        let m = self.modes();
        &self.coeffs[i * m..(i + 1) * m]
    }

    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        let m = self.modes();
        &mut self.coeffs[i * m..(i + 1) * m]
    }

    pub fn same_space(&self, other: &DGField) -> bool {
        self.mesh == other.mesh && self.degree == other.degree
    }

    /// Value at reference point `ξ` of cell `i`.
    pub fn eval_ref(&self, i: usize, xi: f64) -> f64 {
        self.cell(i)
            .iter()
            .enumerate()
            .map(|(j, c)| c * basis::legendre(j, xi))
            .sum()
    }

    /// Point value; at an interface this returns the right cell's trace.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, xi) = self.mesh.locate(x);
        self.eval_ref(i, xi)
    }

    /// Trace at the right end of cell `i` (ξ = 1).
    pub fn right_trace(&self, i: usize) -> f64 {
        self.cell(i).iter().sum()
    }

    /// Trace at the left end of cell `i` (ξ = −1).
    pub fn left_trace(&self, i: usize) -> f64 {
        self.cell(i)
            .iter()
            .enumerate()
            .map(|(j, c)| if j % 2 == 0 { *c } else { -*c })
            .sum()
    }

    /// One-sided value at interface `iface`, the left edge of cell `iface`
    /// (so interface 0 and interface `N` are the same point).
    pub fn trace(&self, iface: usize, side: Side) -> f64 {
        let n = self.mesh.cells();
        let right_cell = iface % n;
        match side {
            Side::Minus => self.right_trace(self.mesh.prev(right_cell)),
            Side::Plus => self.left_trace(right_cell),
        }
    }

    /// `[u] = u⁺ − u⁻` at interface `iface`.
    pub fn jump(&self, iface: usize) -> f64 {
        self.trace(iface, Side::Plus) - self.trace(iface, Side::Minus)
    }

    /// `{u} = (u⁺ + u⁻)/2` at interface `iface`.
    pub fn average(&self, iface: usize) -> f64 {
        0.5 * (self.trace(iface, Side::Plus) + self.trace(iface, Side::Minus))
    }

    /// `‖u‖²` from coefficients with the diagonal mass `h/(2j+1)`.
    pub fn norm_sq(&self) -> f64 {
        let h = self.mesh.h();
        let m = self.modes();
        let mut per_mode = [0.0; 8];
        if m > per_mode.len() {
            return self
                .coeffs
                .iter()
                .enumerate()
                .map(|(idx, c)| c * c * h / (2 * (idx % m) + 1) as f64)
                .sum();
        }
        for cell in self.coeffs.chunks_exact(m) {
            for (acc, c) in per_mode.iter_mut().zip(cell) {
                *acc += c * c;
            }
        }
        per_mode[..m]
            .iter()
            .enumerate()
            .map(|(j, s)| s * h / (2 * j + 1) as f64)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `‖u‖` by cell-wise Gauss quadrature with `nodes` points.
    pub fn norm_by_quadrature(&self, nodes: usize) -> f64 {
        let rule = GaussRule::new(nodes);
        let half_h = 0.5 * self.mesh.h();
        (0..self.mesh.cells())
            .map(|i| half_h * rule.integrate(|xi| self.eval_ref(i, xi).powi(2)))
            .sum::<f64>()
            .sqrt()
    }

    /// `∫ u dx`.
    pub fn integral(&self) -> f64 {
        let h = self.mesh.h();
        (0..self.mesh.cells()).map(|i| h * self.cell(i)[0]).sum()
    }

    /// `(u, w)` in L².
    pub fn inner(&self, other: &DGField) -> f64 {
        assert!(self.same_space(other), "fields live on different spaces");
        let h = self.mesh.h();
        let m = self.modes();
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(idx, (a, b))| a * b * h / (2 * (idx % m) + 1) as f64)
            .sum()
    }

    /// `‖u − f‖` by `(k + 3)`-point quadrature per cell.
    pub fn l2_error(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.l2_error_with(f, self.degree + 3)
    }

    pub fn l2_error_with(&self, f: impl Fn(f64) -> f64, nodes: usize) -> f64 {
        let rule = GaussRule::new(nodes);
        let half_h = 0.5 * self.mesh.h();
        (0..self.mesh.cells())
            .map(|i| {
                half_h
                    * rule.integrate(|xi| (self.eval_ref(i, xi) - f(self.mesh.map(i, xi))).powi(2))
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `self += a · x`.
    pub fn axpy(&mut self, a: f64, x: &DGField) {
        assert!(self.same_space(x), "fields live on different spaces");
        for (s, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * xv;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> DGField {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self − other`.
    pub fn difference(&self, other: &DGField) -> DGField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m: f64, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// Which projection onto the DG space to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    /// Matches all cell moments `0..=k`.
    L2,
    /// Matches moments `0..k` and the right endpoint value.
    RadauMinus,
    /// Matches moments `0..k` and the left endpoint value.
    RadauPlus,
}

/// Projects `f` onto piecewise P^k, using `k + 2` Gauss points per cell.
pub fn project(
    f: impl Fn(f64) -> f64,
    mesh: Mesh1D,
    degree: usize,
    kind: ProjectionKind,
) -> DGField {
    project_with(f, mesh, degree, kind, degree + 2)
}

pub fn project_with(
    f: impl Fn(f64) -> f64,
    mesh: Mesh1D,
    degree: usize,
    kind: ProjectionKind,
    nodes: usize,
) -> DGField {
    let rule = GaussRule::new(nodes);
    let m = degree + 1;
    let mut field = DGField::zeros(mesh, degree);
    let mut modes = vec![0.0; m];
    let samples: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|&xi| {
            basis::eval_all(xi, &mut modes);
            modes.clone()
        })
        .collect();
    for i in 0..mesh.cells() {
        let cell = field.cell_mut(i);
        for ((&xi, &w), p) in rule.nodes.iter().zip(&rule.weights).zip(&samples) {
            let fx = f(mesh.map(i, xi));
            for j in 0..m {
                cell[j] += w * fx * p[j];
            }
        }
        for (j, c) in cell.iter_mut().enumerate() {
            *c *= (2 * j + 1) as f64 / 2.0;
        }
        // The endpoint condition fixes the top mode: P_j(1) = 1, P_j(-1) = (-1)^j.
        match kind {
            ProjectionKind::L2 => {}
            ProjectionKind::RadauMinus => {
                let lower: f64 = cell[..degree].iter().sum();
                cell[degree] = f(mesh.x_right(i)) - lower;
            }
            ProjectionKind::RadauPlus => {
                let sign = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
                let lower: f64 = cell[..degree]
                    .iter()
                    .enumerate()
                    .map(|(j, c)| sign(j) * c)
                    .sum();
                cell[degree] = sign(degree) * (f(mesh.x_left(i)) - lower);
            }
        }
    }
    field
}

/// One DG field per velocity node, `g_h(·, v_q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    nodes: Vec<DGField>,
}

impl KineticField {
    pub fn zeros(mesh: Mesh1D, degree: usize, velocities: usize) -> Self {
        Self {
            nodes: vec![DGField::zeros(mesh, degree); velocities],
        }
    }

    pub fn from_nodes(nodes: Vec<DGField>) -> Self {
        assert!(!nodes.is_empty(), "kinetic field needs at least one node");
        assert!(
            nodes.iter().all(|f| f.same_space(&nodes[0])),
            "all velocity nodes must share mesh and degree"
        );
        Self { nodes }
    }

    /// L² projection of `f(x, v_q)` at every velocity node.
    pub fn project(
        f: impl Fn(f64, f64) -> f64,
        mesh: Mesh1D,
        degree: usize,
        space: &VelocitySpace,
    ) -> Self {
        let nodes = space
            .nodes()
            .iter()
            .map(|&v| project(|x| f(x, v), mesh, degree, ProjectionKind::L2))
            .collect();
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, q: usize) -> &DGField {
        &self.nodes[q]
    }

    pub fn node_mut(&mut self, q: usize) -> &mut DGField {
        &mut self.nodes[q]
    }

    pub fn nodes(&self) -> &[DGField] {
        &self.nodes
    }

    pub fn mesh(&self) -> &Mesh1D {
        self.nodes[0].mesh()
    }

    pub fn degree(&self) -> usize {
        self.nodes[0].degree()
    }

    /// `⟨φ(v) g⟩`, taken coefficient-wise.
    pub fn weighted_bracket(&self, space: &VelocitySpace, phi: impl Fn(f64) -> f64) -> DGField {
        assert_eq!(self.len(), space.len(), "velocity node count mismatch");
        let first = &self.nodes[0];
        let mut out = DGField::zeros(*first.mesh(), first.degree());
        for ((g, &w), &v) in self.nodes.iter().zip(space.weights()).zip(space.nodes()) {
            out.axpy(w * phi(v), g);
        }
        out
    }

    /// `⟨g⟩`.
    pub fn bracket(&self, space: &VelocitySpace) -> DGField {
        assert_eq!(self.len(), space.len(), "velocity node count mismatch");
        let first = &self.nodes[0];
        let mut out = DGField::zeros(*first.mesh(), first.degree());
        for (g, &w) in self.nodes.iter().zip(space.weights()) {
            out.axpy(w, g);
        }
        out
    }

    /// `⟨v g⟩`.
    pub fn flux_moment(&self, space: &VelocitySpace) -> DGField {
        self.weighted_bracket(space, |v| v)
    }

    /// `|||g||| = ⟨‖g‖²⟩^{1/2}`.
    pub fn norm_triple(&self, space: &VelocitySpace) -> f64 {
        assert_eq!(self.len(), space.len(), "velocity node count mismatch");
        self.nodes
            .iter()
            .zip(space.weights())
            .map(|(g, w)| w * g.norm_sq())
            .sum::<f64>()
            .sqrt()
    }

    pub fn axpy(&mut self, a: f64, x: &KineticField) {
        assert_eq!(self.len(), x.len(), "velocity node count mismatch");
        for (s, xv) in self.nodes.iter_mut().zip(&x.nodes) {
            s.axpy(a, xv);
        }
    }

    pub fn difference(&self, other: &KineticField) -> KineticField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.nodes.iter().all(DGField::is_finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mesh(n: usize) -> Mesh1D {
        Mesh1D::periodic_unit_circle(n).unwrap()
    }

    #[test]
    fn mesh_geometry() {
        let m = Mesh1D::new(-1.0, 3.0, 4).unwrap();
        assert_eq!(m.h(), 1.0);
        assert_eq!(m.x_left(2), 1.0);
        assert_eq!(m.x_right(3), 3.0);
        assert_eq!(m.prev(0), 3);
        assert_eq!(m.next(3), 0);
        assert_eq!(m.locate(1.5), (2, 0.0));
        assert_eq!(m.locate(3.5), (0, 0.0));
        assert!(Mesh1D::new(1.0, 1.0, 3).is_err());
        assert!(Mesh1D::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn polynomial_reproduction() {
        let m = Mesh1D::new(0.0, 1.0, 5).unwrap();
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x;
        for kind in [ProjectionKind::L2, ProjectionKind::RadauMinus, ProjectionKind::RadauPlus] {
            let f = project(p, m, 2, kind);
            assert!(f.l2_error(p) < 1e-14, "{kind:?}");
        }
    }

    #[test]
    fn radau_endpoint_constraints() {
        let m = mesh(10);
        let minus = project(f64::sin, m, 2, ProjectionKind::RadauMinus);
        let plus = project(f64::sin, m, 2, ProjectionKind::RadauPlus);
        for i in 0..10 {
            assert!((minus.right_trace(i) - m.x_right(i).sin()).abs() < 1e-14);
            assert!((plus.left_trace(i) - m.x_left(i).sin()).abs() < 1e-14);
        }
        // k = 0 degenerates to endpoint interpolation
        let m0 = project(f64::sin, m, 0, ProjectionKind::RadauMinus);
        assert!((m0.cell(3)[0] - m.x_right(3).sin()).abs() < 1e-15);
    }

    #[test]
    fn constant_field_traces() {
        let f = DGField::constant(mesh(6), 2, 3.5);
        for iface in 0..=6 {
            assert_eq!(f.jump(iface), 0.0);
            assert_eq!(f.average(iface), 3.5);
        }
    }

    #[test]
    fn wrap_interface_jump() {
        let m = Mesh1D::new(0.0, 2.0, 1).unwrap();
        let f = project(|x| x, m, 1, ProjectionKind::L2);
        assert!((f.jump(0) + 2.0).abs() < 1e-14);
        assert!((f.jump(1) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        let m = mesh(8);
        let c = DGField::constant(m, 1, -2.0);
        assert!((c.norm() - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-13);

        let space = VelocitySpace::telegraph();
        let g = KineticField::project(|x, _| x.cos(), m, 2, &space);
        assert!((g.norm_triple(&space) - g.node(0).norm()).abs() < 1e-14);
        let gv = KineticField::project(|_, v| v, m, 1, &space);
        assert!((gv.norm_triple(&space) - (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn parseval_consistency() {
        for k in 0..=4 {
            let f = project(|x| (3.0 * x).sin() + x.cos().powi(3), mesh(7), k, ProjectionKind::L2);
            assert!((f.norm() - f.norm_by_quadrature(k + 2)).abs() < 1e-13);
        }
    }

    #[test]
    fn l2_projection_rate() {
        let e16 = project(f64::sin, mesh(16), 1, ProjectionKind::L2).l2_error(f64::sin);
        let e32 = project(f64::sin, mesh(32), 1, ProjectionKind::L2).l2_error(f64::sin);
        let ratio = e16 / e32;
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn bracket_of_odd_data_vanishes() {
        let space = VelocitySpace::slab(8).unwrap();
        let g = KineticField::project(|x, v| -v * x.cos(), mesh(9), 2, &space);
        assert!(g.bracket(&space).max_abs_coeff() < 1e-15);
    }
}
