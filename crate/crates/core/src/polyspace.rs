//! Polynomial spaces on cells and edges, quadrature rules and L2 projections.
//!
//! Cell bases are monomials in `4 (x - x_K) / h_K` centered at the cell
//! centroid; edge bases are monomials in `2s`, where `s` in `[-1/2, 1/2]` is
//! the dimensionless arc parameter along the edge's global orientation. Both
//! scalings keep local mass matrices well conditioned under refinement (the
//! factor 4 takes the `P_3` mass matrix condition number from ~1e6 to ~6e2).

use std::f64::consts::PI;

use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, Side};

use crate::mesh::Mesh;
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    Cell,
    Edge,
}

/// Dimension of `P_k` on a cell (2D) or an edge (1D).
pub const fn dim_p(k: usize, dim: Dim) -> usize {
    match dim {
        Dim::Cell => (k + 1) * (k + 2) / 2,
        Dim::Edge => k + 1,
    }
}

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
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
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss rule on the edge parameter interval `[-1/2, 1/2]`; weights sum to 1.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EdgeRule {
    pub fn gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Self { nodes: x.iter().map(|x| 0.5 * x).collect(), weights: w.iter().map(|w| 0.5 * w).collect() }
    }

    /// Exact for polynomials up to this degree.
    pub fn degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Default edge rule for degree `k`: `ceil((2k+3)/2) + 1` points.
    pub fn for_degree(k: usize) -> Self {
        Self::gauss((2 * k + 3).div_ceil(2) + 1)
    }
}

/// Quadrature on the reference triangle `(0,0), (1,0), (0,1)`, built by
/// collapsing a tensor Gauss rule on the unit square.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    /// Rule integrating every polynomial of total degree `<= degree` exactly.
    pub fn triangle(degree: usize) -> Self {
        // x^a y^b maps to u^a (1-u)^(b+1) w^b, so u needs degree + 1.
        let n = (degree + 2).div_ceil(2).max(3);
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let u = 0.5 * (x[i] + 1.0);
            for j in 0..n {
                let v = 0.5 * (x[j] + 1.0);
                points.push([u, v * (1.0 - u)]);
                weights.push(0.25 * w[i] * w[j] * (1.0 - u));
            }
        }
        Self { points, weights, degree: 2 * n - 2 }
    }

    /// Rule used to assemble the system blocks (polynomial integrands).
    pub fn for_assembly(k: usize) -> Self {
        Self::triangle(2 * (k + 1) + 2)
    }

    /// Rule used for load vectors, projections of analytic data and error
    /// norms.
    pub fn for_data(k: usize) -> Self {
        Self::triangle(2 * (k + 1) + 10)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }

    /// Maps the rule onto a mesh cell.
    pub fn on_cell(&self, mesh: &Mesh, cell: usize) -> CellQuadrature {
        let [a, b, c] = mesh.cell_points(cell);
        let jac = 2.0 * mesh.cell_area(cell);
        let points = self.points.iter().map(|[u, v]| [a[0] + (b[0] - a[0]) * u + (c[0] - a[0]) * v, a[1] + (b[1] - a[1]) * u + (c[1] - a[1]) * v]).collect();
        CellQuadrature { points, weights: self.weights.iter().map(|w| w * jac).collect() }
    }
}

/// A quadrature rule mapped to a physical cell.
#[derive(Clone, Debug)]
pub struct CellQuadrature {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl CellQuadrature {
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }
}

/// Scaled monomial basis of `P_k` on a cell, ordered by total degree.
#[derive(Clone, Debug)]
pub struct CellBasis {
    pub degree: usize,
    pub center: Point,
    pub scale: f64,
    exponents: Vec<(i32, i32)>,
}

impl CellBasis {
    pub fn new(degree: usize, center: Point, scale: f64) -> Self {
        let exponents = (0..=degree as i32).flat_map(|d| (0..=d).map(move |b| (d - b, b))).collect();
        Self { degree, center, scale, exponents }
    }

    pub fn on_cell(mesh: &Mesh, cell: usize, degree: usize) -> Self {
        Self::new(degree, mesh.cell_centroid(cell), 0.25 * mesh.cell_diameters[cell])
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[(i32, i32)] {
        &self.exponents
    }

    fn local(&self, x: Point) -> (f64, f64) {
        ((x[0] - self.center[0]) / self.scale, (x[1] - self.center[1]) / self.scale)
    }

    pub fn eval_into(&self, x: Point, out: &mut [f64]) {
        let (u, v) = self.local(x);
        for (o, &(a, b)) in out.iter_mut().zip(&self.exponents) {
            *o = u.powi(a) * v.powi(b);
        }
    }

    pub fn eval(&self, x: Point) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }

    /// Gradients with respect to physical coordinates.
    pub fn grad_into(&self, x: Point, out: &mut [[f64; 2]]) {
        let (u, v) = self.local(x);
        let s = 1.0 / self.scale;
        for (o, &(a, b)) in out.iter_mut().zip(&self.exponents) {
            let dx = if a > 0 { a as f64 * u.powi(a - 1) * v.powi(b) } else { 0.0 };
            let dy = if b > 0 { b as f64 * u.powi(a) * v.powi(b - 1) } else { 0.0 };
            *o = [dx * s, dy * s];
        }
    }

    pub fn grad(&self, x: Point) -> Vec<[f64; 2]> {
        let mut out = vec![[0.0; 2]; self.dim()];
        self.grad_into(x, &mut out);
        out
    }

    /// Value of the polynomial with the given coefficients.
    pub fn eval_coeffs(&self, coeffs: &[f64], x: Point) -> f64 {
        let (u, v) = self.local(x);
        coeffs.iter().zip(&self.exponents).map(|(c, &(a, b))| c * u.powi(a) * v.powi(b)).sum()
    }

    pub fn grad_coeffs(&self, coeffs: &[f64], x: Point) -> [f64; 2] {
        let g = self.grad(x);
        coeffs.iter().zip(g).fold([0.0, 0.0], |acc, (c, g)| [acc[0] + c * g[0], acc[1] + c * g[1]])
    }
}

/// Monomials `(2s)^m`, `m = 0..=k`, in the edge parameter.
#[derive(Clone, Copy, Debug)]
pub struct EdgeBasis {
    pub degree: usize,
}

impl EdgeBasis {
    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        let mut p = 1.0;
        for o in out.iter_mut().take(self.dim()) {
            *o = p;
            p *= 2.0 * s;
        }
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(s, &mut out);
        out
    }

    pub fn eval_coeffs(&self, coeffs: &[f64], s: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * 2.0 * s + c)
    }
}

/// Cholesky factorization of a small dense SPD matrix.
#[derive(Clone, Debug)]
pub struct DenseSpd {
    n: usize,
    matrix: Vec<f64>,
    llt: Llt<f64>,
}

impl DenseSpd {
    /// Factors the row-major `n x n` matrix; `None` if it is not numerically
    /// positive definite.
    pub fn new(n: usize, matrix: Vec<f64>) -> Option<Self> {
        assert_eq!(matrix.len(), n * n);
        let m = Mat::<f64>::from_fn(n, n, |i, j| matrix[i * n + j]);
        let llt = m.llt(Side::Lower).ok()?;
        Some(Self { n, matrix, llt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The factored matrix, row-major.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let mut b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        self.llt.solve_in_place(b.as_mut());
        for (i, r) in rhs.iter_mut().enumerate() {
            *r = b[(i, 0)];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.n;
        (0..n).map(|i| x[i] * (0..n).map(|j| self.matrix[i * n + j] * x[j]).sum::<f64>()).sum()
    }
}

/// `P_k(K)` on one cell together with a quadrature rule and the factored
/// mass matrix; realizes the projection `Q_k^0`.
#[derive(Clone, Debug)]
pub struct CellSpace {
    pub cell: usize,
    pub basis: CellBasis,
    pub quad: CellQuadrature,
    /// Basis values at the quadrature points, `values[q * dim + i]`.
    pub values: Vec<f64>,
    pub mass: DenseSpd,
}

impl CellSpace {
    pub fn new(mesh: &Mesh, cell: usize, k: usize, rule: &QuadratureRule) -> Result<Self> {
        let basis = CellBasis::on_cell(mesh, cell, k);
        let quad = rule.on_cell(mesh, cell);
        let n = basis.dim();
        let mut values = vec![0.0; quad.points.len() * n];
        for (q, x) in quad.points.iter().enumerate() {
            basis.eval_into(*x, &mut values[q * n..(q + 1) * n]);
        }
        let mut mass = vec![0.0; n * n];
        for (q, w) in quad.weights.iter().enumerate() {
            let phi = &values[q * n..(q + 1) * n];
            for i in 0..n {
                for j in 0..n {
                    mass[i * n + j] += w * phi[i] * phi[j];
                }
            }
        }
        let mass = DenseSpd::new(n, mass).ok_or(Error::DegenerateElement { what: "cell", index: cell })?;
        Ok(Self { cell, basis, quad, values, mass })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Moments `b_i = (f, phi_i)_K`.
    pub fn moments(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let n = self.dim();
        let mut b = vec![0.0; n];
        for (q, (x, w)) in self.quad.points.iter().zip(&self.quad.weights).enumerate() {
            let fx = w * f(*x);
            for (bi, phi) in b.iter_mut().zip(&self.values[q * n..(q + 1) * n]) {
                *bi += fx * phi;
            }
        }
        b
    }

    /// Coefficients of `Q_k^0 f`.
    pub fn project(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut b = self.moments(f);
        self.mass.solve_in_place(&mut b);
        b
    }

    /// `||p||_{0,K}` for a polynomial given by its coefficients.
    pub fn l2_norm(&self, coeffs: &[f64]) -> f64 {
        self.mass.quadratic_form(coeffs).max(0.0).sqrt()
    }

    /// `||f||_{0,K}` by quadrature.
    pub fn l2_norm_of(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.quad.integrate(|x| f(x).powi(2)).sqrt()
    }

    pub fn eval(&self, coeffs: &[f64], x: Point) -> f64 {
        self.basis.eval_coeffs(coeffs, x)
    }
}

/// `P_k(E)` on one edge with its Gauss rule and factored mass matrix;
/// realizes the projection `Q_k^b`.
#[derive(Clone, Debug)]
pub struct EdgeSpace {
    pub edge: usize,
    pub length: f64,
    pub basis: EdgeBasis,
    pub rule: EdgeRule,
    pub mass: DenseSpd,
}

impl EdgeSpace {
    pub fn new(mesh: &Mesh, edge: usize, k: usize, rule: &EdgeRule) -> Result<Self> {
        let basis = EdgeBasis { degree: k };
        let length = mesh.edge_lengths[edge];
        let n = basis.dim();
        let mut mass = vec![0.0; n * n];
        let mut chi = vec![0.0; n];
        for (s, w) in rule.nodes.iter().zip(&rule.weights) {
            basis.eval_into(*s, &mut chi);
            for i in 0..n {
                for j in 0..n {
                    mass[i * n + j] += length * w * chi[i] * chi[j];
                }
            }
        }
        let mass = DenseSpd::new(n, mass).ok_or(Error::DegenerateElement { what: "edge", index: edge })?;
        Ok(Self { edge, length, basis, rule: rule.clone(), mass })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Moments `<f, chi_m>_E` with `f` given as a function of the edge parameter.
    pub fn moments_param(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.dim();
        let mut b = vec![0.0; n];
        let mut chi = vec![0.0; n];
        for (s, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            self.basis.eval_into(*s, &mut chi);
            let fx = self.length * w * f(*s);
            for (bi, c) in b.iter_mut().zip(&chi) {
                *bi += fx * c;
            }
        }
        b
    }

    /// Coefficients of `Q_k^b f`.
    pub fn project(&self, mesh: &Mesh, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.project_param(|s| f(mesh.edge_point(self.edge, s)))
    }

    pub fn project_param(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut b = self.moments_param(f);
        self.mass.solve_in_place(&mut b);
        b
    }

    pub fn l2_norm(&self, coeffs: &[f64]) -> f64 {
        self.mass.quadratic_form(coeffs).max(0.0).sqrt()
    }

    pub fn l2_norm_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        let s: f64 = self.rule.nodes.iter().zip(&self.rule.weights).map(|(s, w)| w * f(*s).powi(2)).sum();
        (self.length * s).sqrt()
    }
}

/// `Q_k^0 f` on one cell.
pub fn project_cell(f: impl Fn(Point) -> f64, mesh: &Mesh, cell: usize, k: usize, rule: &QuadratureRule) -> Result<Vec<f64>> {
    Ok(CellSpace::new(mesh, cell, k, rule)?.project(f))
}

/// `Q_k^b f` on one edge.
pub fn project_edge(f: impl Fn(Point) -> f64, mesh: &Mesh, edge: usize, k: usize, rule: &EdgeRule) -> Result<Vec<f64>> {
    Ok(EdgeSpace::new(mesh, edge, k, rule)?.project(mesh, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_uniform_mesh, Pattern};

    #[test]
    fn dimensions() {
        assert_eq!(dim_p(1, Dim::Cell), 3);
        assert_eq!(dim_p(2, Dim::Cell), 6);
        assert_eq!(dim_p(3, Dim::Cell), 10);
        assert_eq!(dim_p(1, Dim::Edge), 2);
        assert_eq!(dim_p(0, Dim::Edge), 1);
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for p in 0..2 * n {
                let num: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((num - exact).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn triangle_rules_integrate_monomials_exactly() {
        for degree in [0, 2, 5, 6, 8, 14, 20] {
            let rule = QuadratureRule::triangle(degree);
            assert!(rule.degree >= degree);
            assert!(rule.len() >= 7);
            for a in 0..=degree as i32 {
                for b in 0..=(degree as i32 - a) {
                    let num = rule.integrate(|p| p[0].powi(a) * p[1].powi(b));
                    // int_T x^a y^b = a! b! / (a + b + 2)!
                    let exact = factorial(a as u32) * factorial(b as u32) / factorial((a + b + 2) as u32);
                    assert!((num - exact).abs() <= 1e-13 * exact, "deg={degree} a={a} b={b}");
                }
            }
        }
        assert!((QuadratureRule::triangle(3).integrate(|_| 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mass_matrix_conditioning_is_mesh_independent() {
        let cond = |m: usize| {
            let mesh = build_uniform_mesh(m, Pattern::DiagonalNe).unwrap();
            let space = CellSpace::new(&mesh, 0, 2, &QuadratureRule::for_assembly(2)).unwrap();
            let n = space.dim();
            let mat = Mat::<f64>::from_fn(n, n, |i, j| space.mass.matrix()[i * n + j] / mesh.cell_area(0));
            let ev = mat.self_adjoint_eigenvalues(Side::Lower).unwrap();
            ev[n - 1] / ev[0]
        };
        let (c4, c64) = (cond(4), cond(64));
        assert!((c4 - c64).abs() < 1e-6 * c4);
    }

    #[test]
    fn cell_projection_reproduces_polynomials() {
        let mesh = build_uniform_mesh(3, Pattern::DiagonalNw).unwrap();
        let rule = QuadratureRule::for_data(2);
        let f = |p: Point| 1.0 - 2.0 * p[0] + 3.0 * p[0] * p[1] - p[1] * p[1];
        for cell in 0..mesh.num_cells() {
            let space = CellSpace::new(&mesh, cell, 2, &rule).unwrap();
            let c = space.project(f);
            let err = space.l2_norm_of(|x| f(x) - space.eval(&c, x));
            assert!(err < 1e-12, "{err}");
            assert!(space.project(|_| 0.0).iter().all(|c| *c == 0.0));
        }
    }

    #[test]
    fn cell_projection_error_is_second_order_for_linears() {
        let f = |p: Point| (PI * p[0]).sin() * (PI * p[1]).sin();
        let err = |m: usize| {
            let mesh = build_uniform_mesh(m, Pattern::DiagonalNe).unwrap();
            let rule = QuadratureRule::triangle(20);
            let mut e2 = 0.0;
            for cell in 0..mesh.num_cells() {
                let space = CellSpace::new(&mesh, cell, 1, &rule).unwrap();
                let c = space.project(f);
                e2 += space.l2_norm_of(|x| f(x) - space.eval(&c, x)).powi(2);
            }
            e2.sqrt()
        };
        let (e4, e8, e16) = (err(4), err(8), err(16));
        let r1 = (e4 / e8).log2();
        let r2 = (e8 / e16).log2();
        assert!((r1 - 2.0).abs() < 0.1 && (r2 - 2.0).abs() < 0.05, "{r1} {r2}");
    }

    #[test]
    fn edge_projection_properties() {
        let mesh = build_uniform_mesh(2, Pattern::Crisscross).unwrap();
        let rule = EdgeRule::gauss(8);
        for edge in 0..mesh.num_edges() {
            let space = EdgeSpace::new(&mesh, edge, 1, &rule).unwrap();
            let lin = |p: Point| 0.3 + p[0] - 2.0 * p[1];
            let c = space.project(&mesh, lin);
            let err = space.l2_norm_of(|s| lin(mesh.edge_point(edge, s)) - space.basis.eval_coeffs(&c, s));
            assert!(err < 1e-12);

            // quadratic trace: the residual is orthogonal to P_1(E)
            let quad = |p: Point| p[0] * p[1] + p[0] * p[0];
            let c = space.project(&mesh, quad);
            let res = space.moments_param(|s| quad(mesh.edge_point(edge, s)) - space.basis.eval_coeffs(&c, s));
            assert!(res.iter().all(|r| r.abs() < 1e-14));
        }
    }

    #[test]
    fn edge_basis_horner_matches_eval() {
        let b = EdgeBasis { degree: 3 };
        let c = [1.0, -2.0, 0.5, 4.0];
        let s = 0.3;
        let direct: f64 = b.eval(s).iter().zip(c).map(|(p, c)| p * c).sum();
        assert!((b.eval_coeffs(&c, s) - direct).abs() < 1e-15);
    }
}
