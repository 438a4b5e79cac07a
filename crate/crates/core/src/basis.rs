//! Reference-element Legendre machinery for the local space P^k on [-1, 1].
//!
//! Cells are mapped affinely by `x = x_c + (h/2) ξ`. Modes are the unnormalized
//! Legendre polynomials, so the cell mass matrix is diagonal with entries
//! `h / (2j + 1)`.

use nalgebra::{DMatrix, SymmetricEigen};

/// Evaluates `P_j(ξ)` with the three-term recurrence.
///
/// Panics if `|ξ| > 1` (beyond a few ulps).
pub fn eval_basis(j: usize, xi: f64) -> f64 {
    assert!(
        xi.abs() <= 1.0 + 1e-12,
        "reference coordinate {xi} outside [-1, 1]"
    );
    legendre(j, xi)
}

/// `P_j(ξ)` without the domain check; used internally at quadrature nodes.
pub(crate) fn legendre(j: usize, xi: f64) -> f64 {
    match j {
        0 => 1.0,
        1 => xi,
        _ => {
            let (mut p0, mut p1) = (1.0, xi);
            for n in 1..j {
                let nf = n as f64;
                let p2 = ((2.0 * nf + 1.0) * xi * p1 - nf * p0) / (nf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Fills `out[j] = P_j(ξ)` for `j = 0..out.len()`.
pub fn eval_all(xi: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = xi;
    for j in 1..n - 1 {
        let jf = j as f64;
        out[j + 1] = ((2.0 * jf + 1.0) * xi * out[j] - jf * out[j - 1]) / (jf + 1.0);
    }
}

/// `P_j'(ξ) = Σ_{m < j, j - m odd} (2m + 1) P_m(ξ)`.
pub fn eval_basis_derivative(j: usize, xi: f64) -> f64 {
    (0..j)
        .filter(|m| (j - m) % 2 == 1)
        .map(|m| (2 * m + 1) as f64 * legendre(m, xi))
        .sum()
}

/// Physical-cell mass diagonal `h / (2j + 1)` for `j = 0..=k`.
pub fn mass_diagonal(k: usize, h: f64) -> Vec<f64> {
    assert!(h > 0.0, "cell width must be positive, got {h}");
    (0..=k).map(|j| h / (2 * j + 1) as f64).collect()
}

/// Tabulated endpoint values and reference mass weights for a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreBasis {
    degree: usize,
    right: Vec<f64>,
    left: Vec<f64>,
    mass: Vec<f64>,
}

impl LegendreBasis {
    pub fn new(degree: usize) -> Self {
        let right = vec![1.0; degree + 1];
        let left = (0..=degree)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let mass = (0..=degree).map(|j| 2.0 / (2 * j + 1) as f64).collect();
        Self {
            degree,
            right,
            left,
            mass,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `P_j(1)`, identically one.
    pub fn right(&self) -> &[f64] {
        &self.right
    }

    /// `P_j(-1) = (-1)^j`.
    pub fn left(&self) -> &[f64] {
        &self.left
    }

    /// `∫_{-1}^{1} P_j^2 dξ = 2 / (2j + 1)`.
    pub fn reference_mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn eval(&self, j: usize, xi: f64) -> f64 {
        assert!(j <= self.degree, "mode {j} exceeds degree {}", self.degree);
        eval_basis(j, xi)
    }
}

/// Gauss–Legendre rule on [-1, 1], nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Newton on P_n from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_{-1}^{1} f dξ`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Sharp constants of the trace and derivative inverse inequalities on P^k:
///
/// `|w(y)|² (b − a) ≤ trace ∫ w²` for `y ∈ {a, b}`, and
/// `(b − a)² ∫ (w′)² ≤ derivative ∫ w²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseConstants {
    pub degree: usize,
    pub trace: f64,
    pub derivative: f64,
}

/// Largest generalized eigenvalues of the boundary and stiffness forms
/// against the mass form on the reference element.
pub fn inverse_constants(k: usize) -> InverseConstants {
    let n = k + 1;
    let basis = LegendreBasis::new(k);
    let mass = basis.reference_mass();
    let inv_sqrt_mass: Vec<f64> = mass.iter().map(|m| m.sqrt().recip()).collect();

    // 2 |w(1)|² with w(1) = Σ c_j.
    let boundary = DMatrix::from_fn(n, n, |i, j| 2.0 / (mass[i] * mass[j]).sqrt());

    // 4 ∫ P_i' P_j' dξ; the integrand has degree ≤ 2k − 2.
    let rule = GaussRule::new(n);
    let stiffness = DMatrix::from_fn(n, n, |i, j| {
        let s = rule.integrate(|x| eval_basis_derivative(i, x) * eval_basis_derivative(j, x));
        4.0 * s * inv_sqrt_mass[i] * inv_sqrt_mass[j]
    });

    InverseConstants {
        degree: k,
        trace: largest_eigenvalue(boundary),
        derivative: if k == 0 { 0.0 } else { largest_eigenvalue(stiffness) },
    }
}

fn largest_eigenvalue(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}
