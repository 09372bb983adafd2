//! Discrete weak differential operators and the global unknown layout.
//!
//! A weak function on a cell `K` is a pair `{v0, vb}` with `v0` in
//! `P_{k+1}(K)` and `vb` in `P_k(E)` on each edge. Its weak gradient is the
//! unique `g` in `[P_k(K)]^2` with
//!
//! ```text
//! (g, q)_K = -(v0, div q)_K + <vb, q.n>_{dK}    for all q in [P_k(K)]^2
//! ```
//!
//! which [`LocalCell`] stores as an explicit matrix acting on stacked
//! `(v0, vb_0, vb_1, vb_2)` coefficients.

use std::ops::Range;

use crate::mesh::Mesh;
use crate::polyspace::{dim_p, CellBasis, CellQuadrature, CellSpace, Dim, EdgeRule, EdgeSpace, QuadratureRule};
use crate::{Point, Result, Sym2};

/// Global indexing of `(eta, beta, gamma)`: stresses, interior velocities and
/// velocity traces on interior edges. Boundary edges carry no unknowns.
#[derive(Clone, Debug)]
pub struct DofLayout {
    pub k: usize,
    pub num_cells: usize,
    /// `dim P_k(K)`.
    pub stress_dim: usize,
    /// `dim P_{k+1}(K)`.
    pub velocity_dim: usize,
    /// `dim P_k(E)`.
    pub trace_dim: usize,
    /// Global edge id of each trace slot.
    pub interior_edges: Vec<usize>,
    /// Trace slot of each global edge, `None` on the boundary.
    pub edge_slot: Vec<Option<usize>>,
}

impl DofLayout {
    pub fn new(mesh: &Mesh, k: usize) -> Self {
        let mut interior_edges = Vec::new();
        let edge_slot = mesh
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                (!edge.boundary).then(|| {
                    interior_edges.push(e);
                    interior_edges.len() - 1
                })
            })
            .collect();
        Self {
            k,
            num_cells: mesh.num_cells(),
            stress_dim: dim_p(k, Dim::Cell),
            velocity_dim: dim_p(k + 1, Dim::Cell),
            trace_dim: dim_p(k, Dim::Edge),
            interior_edges,
            edge_slot,
        }
    }

    pub fn num_stress(&self) -> usize {
        3 * self.stress_dim * self.num_cells
    }

    pub fn num_velocity(&self) -> usize {
        2 * self.velocity_dim * self.num_cells
    }

    pub fn num_trace(&self) -> usize {
        2 * self.trace_dim * self.interior_edges.len()
    }

    pub fn velocity_offset(&self) -> usize {
        self.num_stress()
    }

    pub fn trace_offset(&self) -> usize {
        self.num_stress() + self.num_velocity()
    }

    pub fn total(&self) -> usize {
        self.num_stress() + self.num_velocity() + self.num_trace()
    }

    /// Index into `eta` of stress component `comp` (0: 11, 1: 22, 2: 12).
    #[inline]
    pub fn stress(&self, cell: usize, comp: usize, i: usize) -> usize {
        (cell * 3 + comp) * self.stress_dim + i
    }

    /// Index into `beta` of velocity component `r`.
    #[inline]
    pub fn velocity(&self, cell: usize, r: usize, i: usize) -> usize {
        (cell * 2 + r) * self.velocity_dim + i
    }

    /// Index into `gamma` of trace component `r` on trace slot `slot`.
    #[inline]
    pub fn trace(&self, slot: usize, r: usize, m: usize) -> usize {
        (slot * 2 + r) * self.trace_dim + m
    }

    pub fn stress_range(&self, cell: usize, comp: usize) -> Range<usize> {
        let s = self.stress(cell, comp, 0);
        s..s + self.stress_dim
    }

    pub fn velocity_range(&self, cell: usize, r: usize) -> Range<usize> {
        let s = self.velocity(cell, r, 0);
        s..s + self.velocity_dim
    }

    pub fn trace_range(&self, edge: usize, r: usize) -> Option<Range<usize>> {
        self.edge_slot[edge].map(|slot| {
            let s = self.trace(slot, r, 0);
            s..s + self.trace_dim
        })
    }
}

/// One edge of a cell as seen from that cell.
#[derive(Clone, Copy, Debug)]
pub struct LocalEdge {
    pub edge: usize,
    pub normal: Point,
    pub length: f64,
}

/// Per-cell spaces, quadrature and the weak gradient matrix.
#[derive(Clone, Debug)]
pub struct LocalCell {
    pub cell: usize,
    pub k: usize,
    /// `P_k(K)` for stresses and weak gradients.
    pub stress: CellSpace,
    /// `P_{k+1}(K)` for interior velocities.
    pub velocity: CellSpace,
    pub edges: [LocalEdge; 3],
    /// High-order rule for analytic data.
    pub data_quad: CellQuadrature,
    weak_grad: Vec<f64>,
}

impl LocalCell {
    pub fn new(mesh: &Mesh, cell: usize, k: usize, assembly: &QuadratureRule, data: &QuadratureRule, edge_rule: &EdgeRule) -> Result<Self> {
        let stress = CellSpace::new(mesh, cell, k, assembly)?;
        let velocity = CellSpace::new(mesh, cell, k + 1, assembly)?;
        let edges = mesh.cell_edges[cell].map(|ce| LocalEdge { edge: ce.edge, normal: ce.normal, length: mesh.edge_lengths[ce.edge] });
        let mut this = Self { cell, k, stress, velocity, edges, data_quad: data.on_cell(mesh, cell), weak_grad: Vec::new() };
        this.weak_grad = this.build_weak_gradient(mesh, edge_rule);
        Ok(this)
    }

    pub fn stress_dim(&self) -> usize {
        self.stress.dim()
    }

    pub fn velocity_dim(&self) -> usize {
        self.velocity.dim()
    }

    pub fn trace_dim(&self) -> usize {
        self.k + 1
    }

    /// Columns of the weak gradient matrix: `dim P_{k+1}` interior
    /// coefficients followed by three blocks of trace coefficients.
    pub fn weak_grad_cols(&self) -> usize {
        self.velocity_dim() + 3 * self.trace_dim()
    }

    /// Row-major `(2 dim P_k) x weak_grad_cols()` matrix; row `c * dim P_k + a`
    /// is coefficient `a` of the `c`-th gradient component.
    pub fn weak_grad_matrix(&self) -> &[f64] {
        &self.weak_grad
    }

    fn build_weak_gradient(&self, mesh: &Mesh, edge_rule: &EdgeRule) -> Vec<f64> {
        let nk = self.stress_dim();
        let nv = self.velocity_dim();
        let nt = self.trace_dim();
        let cols = self.weak_grad_cols();
        let mut rhs = vec![0.0; 2 * nk * cols];

        // -(v0, d_c phi_a)_K
        let mut psi = vec![0.0; nv];
        let mut dphi = vec![[0.0; 2]; nk];
        for (x, w) in self.stress.quad.points.iter().zip(&self.stress.quad.weights) {
            self.velocity.basis.eval_into(*x, &mut psi);
            self.stress.basis.grad_into(*x, &mut dphi);
            for c in 0..2 {
                for a in 0..nk {
                    let row = (c * nk + a) * cols;
                    for j in 0..nv {
                        rhs[row + j] -= w * psi[j] * dphi[a][c];
                    }
                }
            }
        }
        // <vb, phi_a n_c>_E
        let mut phi = vec![0.0; nk];
        let mut chi = vec![0.0; nt];
        for (i, le) in self.edges.iter().enumerate() {
            for (s, w) in edge_rule.nodes.iter().zip(&edge_rule.weights) {
                let x = mesh.edge_point(le.edge, *s);
                self.stress.basis.eval_into(x, &mut phi);
                crate::polyspace::EdgeBasis { degree: self.k }.eval_into(*s, &mut chi);
                let w = w * le.length;
                for c in 0..2 {
                    for a in 0..nk {
                        let row = (c * nk + a) * cols;
                        for m in 0..nt {
                            rhs[row + nv + i * nt + m] += w * chi[m] * phi[a] * le.normal[c];
                        }
                    }
                }
            }
        }
        // apply the P_k mass inverse per gradient component, column by column
        let mut col = vec![0.0; nk];
        for c in 0..2 {
            for j in 0..cols {
                for a in 0..nk {
                    col[a] = rhs[(c * nk + a) * cols + j];
                }
                self.stress.mass.solve_in_place(&mut col);
                for a in 0..nk {
                    rhs[(c * nk + a) * cols + j] = col[a];
                }
            }
        }
        rhs
    }

    /// Weak gradient of a scalar weak function; returns the two components'
    /// `P_k` coefficients.
    pub fn weak_gradient(&self, v0: &[f64], vb: [&[f64]; 3]) -> [Vec<f64>; 2] {
        let nk = self.stress_dim();
        let nv = self.velocity_dim();
        let nt = self.trace_dim();
        let cols = self.weak_grad_cols();
        assert_eq!(v0.len(), nv);
        let mut out = [vec![0.0; nk], vec![0.0; nk]];
        for (c, g) in out.iter_mut().enumerate() {
            for (a, ga) in g.iter_mut().enumerate() {
                let row = &self.weak_grad[(c * nk + a) * cols..(c * nk + a + 1) * cols];
                let mut acc: f64 = row[..nv].iter().zip(v0).map(|(m, v)| m * v).sum();
                for (i, b) in vb.iter().enumerate() {
                    assert_eq!(b.len(), nt);
                    acc += row[nv + i * nt..nv + (i + 1) * nt].iter().zip(b.iter()).map(|(m, v)| m * v).sum::<f64>();
                }
                *ga = acc;
            }
        }
        out
    }

    /// Symmetrized weak gradient of a vector weak function, as `P_k`
    /// coefficients of `(e11, e22, e12)`.
    pub fn weak_strain(&self, v0: [&[f64]; 2], vb: [[&[f64]; 3]; 2]) -> [Vec<f64>; 3] {
        let [g1x, g1y] = self.weak_gradient(v0[0], vb[0]);
        let [g2x, g2y] = self.weak_gradient(v0[1], vb[1]);
        let e12 = g1y.iter().zip(&g2x).map(|(a, b)| 0.5 * (a + b)).collect();
        [g1x, g2y, e12]
    }

    /// Weak divergence of degree `j` of a vector weak function, computed
    /// directly from its defining identity against `P_j(K)`.
    pub fn weak_divergence(&self, mesh: &Mesh, v0: [&[f64]; 2], vb: [[&[f64]; 3]; 2], j: usize) -> Result<Vec<f64>> {
        let rule = QuadratureRule::triangle(j + self.k + 2);
        let space = CellSpace::new(mesh, self.cell, j, &rule)?;
        let n = space.dim();
        let mut rhs = vec![0.0; n];
        let mut dq = vec![[0.0; 2]; n];
        for (x, w) in space.quad.points.iter().zip(&space.quad.weights) {
            space.basis.grad_into(*x, &mut dq);
            let v = [self.velocity.eval(v0[0], *x), self.velocity.eval(v0[1], *x)];
            for (r, g) in rhs.iter_mut().zip(&dq) {
                *r -= w * (v[0] * g[0] + v[1] * g[1]);
            }
        }
        let edge_rule = EdgeRule::gauss(j + self.k + 2);
        let tb = crate::polyspace::EdgeBasis { degree: self.k };
        let mut q = vec![0.0; n];
        for (i, le) in self.edges.iter().enumerate() {
            for (s, w) in edge_rule.nodes.iter().zip(&edge_rule.weights) {
                let x = mesh.edge_point(le.edge, *s);
                space.basis.eval_into(x, &mut q);
                let vn = tb.eval_coeffs(vb[0][i], *s) * le.normal[0] + tb.eval_coeffs(vb[1][i], *s) * le.normal[1];
                for (r, qa) in rhs.iter_mut().zip(&q) {
                    *r += w * le.length * vn * qa;
                }
            }
        }
        space.mass.solve_in_place(&mut rhs);
        Ok(rhs)
    }

    /// `(s, t)_K` for symmetric tensors given by `P_k` coefficients.
    pub fn tensor_inner(&self, s: [&[f64]; 3], t: [&[f64]; 3]) -> f64 {
        let m = self.stress.mass.matrix();
        let n = self.stress_dim();
        let mut acc = 0.0;
        for (comp, weight) in [(0, 1.0), (1, 1.0), (2, 2.0)] {
            for a in 0..n {
                for b in 0..n {
                    acc += weight * s[comp][a] * m[a * n + b] * t[comp][b];
                }
            }
        }
        acc
    }
}

/// The weak Galerkin space on a mesh: layout plus all local operators.
#[derive(Clone, Debug)]
pub struct WgSpace {
    pub mesh: Mesh,
    pub k: usize,
    pub layout: DofLayout,
    pub cells: Vec<LocalCell>,
    /// `P_k(E)` on every edge (including boundary edges).
    pub edges: Vec<EdgeSpace>,
    pub edge_rule: EdgeRule,
}

impl WgSpace {
    pub fn new(mesh: Mesh, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(crate::Error::InvalidConfig("polynomial degree k must be at least 1".into()));
        }
        let assembly = QuadratureRule::for_assembly(k);
        let data = QuadratureRule::for_data(k);
        let edge_rule = EdgeRule::for_degree(k);
        let cells = (0..mesh.num_cells()).map(|c| LocalCell::new(&mesh, c, k, &assembly, &data, &edge_rule)).collect::<Result<Vec<_>>>()?;
        let edges = (0..mesh.num_edges()).map(|e| EdgeSpace::new(&mesh, e, k, &edge_rule)).collect::<Result<Vec<_>>>()?;
        let layout = DofLayout::new(&mesh, k);
        Ok(Self { mesh, k, layout, cells, edges, edge_rule })
    }

    /// Componentwise `Q_k^0` of a symmetric tensor field, as `eta`.
    pub fn project_stress(&self, f: impl Fn(Point) -> Sym2) -> Vec<f64> {
        let mut eta = vec![0.0; self.layout.num_stress()];
        for lc in &self.cells {
            let values: Vec<Sym2> = lc.data_quad.points.iter().map(|x| f(*x)).collect();
            for comp in 0..3 {
                let mut b = data_moments(&lc.stress.basis, &lc.data_quad, |q| values[q][comp]);
                lc.stress.mass.solve_in_place(&mut b);
                eta[self.layout.stress_range(lc.cell, comp)].copy_from_slice(&b);
            }
        }
        eta
    }

    /// `(Q_{k+1}^0 v, Q_k^b v)` of a vector field, as `(beta, gamma)`. Traces
    /// on boundary edges are dropped.
    pub fn interpolate_velocity(&self, f: impl Fn(Point) -> [f64; 2]) -> (Vec<f64>, Vec<f64>) {
        let mut beta = vec![0.0; self.layout.num_velocity()];
        for lc in &self.cells {
            let values: Vec<[f64; 2]> = lc.data_quad.points.iter().map(|x| f(*x)).collect();
            for r in 0..2 {
                let mut b = data_moments(&lc.velocity.basis, &lc.data_quad, |q| values[q][r]);
                lc.velocity.mass.solve_in_place(&mut b);
                beta[self.layout.velocity_range(lc.cell, r)].copy_from_slice(&b);
            }
        }
        let mut gamma = vec![0.0; self.layout.num_trace()];
        let fine = EdgeRule::gauss(self.k + 8);
        for (slot, &e) in self.layout.interior_edges.iter().enumerate() {
            let es = &self.edges[e];
            for r in 0..2 {
                let mut b = vec![0.0; es.dim()];
                let mut chi = vec![0.0; es.dim()];
                for (s, w) in fine.nodes.iter().zip(&fine.weights) {
                    es.basis.eval_into(*s, &mut chi);
                    let fx = es.length * w * f(self.mesh.edge_point(e, *s))[r];
                    b.iter_mut().zip(&chi).for_each(|(bi, c)| *bi += fx * c);
                }
                es.mass.solve_in_place(&mut b);
                let start = self.layout.trace(slot, r, 0);
                gamma[start..start + es.dim()].copy_from_slice(&b);
            }
        }
        (beta, gamma)
    }

    /// Trace coefficients of component `r` on the three edges of `cell`
    /// (zero on boundary edges).
    pub fn cell_traces<'a>(&self, gamma: &'a [f64], cell: usize, r: usize, zero: &'a [f64]) -> [&'a [f64]; 3] {
        self.cells[cell].edges.map(|le| match self.layout.trace_range(le.edge, r) {
            Some(range) => &gamma[range],
            None => zero,
        })
    }

    /// Weak strain of the discrete velocity `(beta, gamma)` on one cell.
    pub fn cell_weak_strain(&self, beta: &[f64], gamma: &[f64], cell: usize) -> [Vec<f64>; 3] {
        let zero = vec![0.0; self.layout.trace_dim];
        let l = &self.layout;
        let v0 = [&beta[l.velocity_range(cell, 0)], &beta[l.velocity_range(cell, 1)]];
        let vb = [self.cell_traces(gamma, cell, 0, &zero), self.cell_traces(gamma, cell, 1, &zero)];
        self.cells[cell].weak_strain(v0, vb)
    }
}

/// `(f, phi_i)` over a cell's data quadrature, with `f` given by value at
/// quadrature point index.
pub(crate) fn data_moments(basis: &CellBasis, quad: &CellQuadrature, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = basis.dim();
    let mut b = vec![0.0; n];
    let mut phi = vec![0.0; n];
    for (q, (x, w)) in quad.points.iter().zip(&quad.weights).enumerate() {
        basis.eval_into(*x, &mut phi);
        let fx = w * f(q);
        b.iter_mut().zip(&phi).for_each(|(bi, p)| *bi += fx * p);
    }
    b
}
