//! Constitutive law, global block assembly and the per-step linear system.
//!
//! Unknowns are ordered `(eta, beta, gamma)` following [`DofLayout`]. The
//! blocks realize
//!
//! ```text
//! a_h(s, t)  = eta_t' M0 eta_s
//! b_h(t, w)  = -eta_t' M1 beta_w - eta_t' M2 gamma_w
//! s_h(v, w)  = [beta_w; gamma_w]' [M3 M4; M5 M6] [beta_v; gamma_v]
//! ```
//!
//! and one backward Euler step solves
//!
//! ```text
//! | (1/dt + 1) M0   M1   M2 | |eta  |   | M0 eta_prev / dt |
//! |     -M1'        M3   M4 | |beta | = |        F         |
//! |     -M2'        M5   M6 | |gamma|   |        0         |
//! ```

use crate::polyspace::EdgeBasis;
use crate::sparse::{CsrMatrix, SparseLu, Triplets};
use crate::wgops::{DofLayout, WgSpace};
use crate::{Error, Point, Result, Sym2};

/// Isotropic elasticity `C e = 2 mu e + lambda tr(e) I` in two dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsotropicLaw {
    pub mu: f64,
    pub lambda: f64,
}

impl Default for IsotropicLaw {
    fn default() -> Self {
        Self { mu: 1.0, lambda: 1.0 }
    }
}

impl IsotropicLaw {
    /// Rejects laws that are not positive definite (`mu > 0`, `mu + lambda > 0`).
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && mu + lambda > 0.0 && mu.is_finite() && lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("Lame constants mu={mu}, lambda={lambda} are not positive definite")));
        }
        Ok(Self { mu, lambda })
    }

    pub fn apply_c(&self, e: &Sym2) -> Sym2 {
        let tr = self.lambda * (e[0] + e[1]);
        [2.0 * self.mu * e[0] + tr, 2.0 * self.mu * e[1] + tr, 2.0 * self.mu * e[2]]
    }

    pub fn apply_c_inv(&self, s: &Sym2) -> Sym2 {
        let a = 1.0 / (2.0 * self.mu);
        let tr = self.trace_coupling() * (s[0] + s[1]);
        [a * s[0] - tr, a * s[1] - tr, a * s[2]]
    }

    /// `lambda / (2 mu (2 mu + 2 lambda))`, the trace part of `C^{-1}`.
    fn trace_coupling(&self) -> f64 {
        self.lambda / (2.0 * self.mu * (2.0 * self.mu + 2.0 * self.lambda))
    }

    /// Bounds `(m0, m1)` with `m0 |t|^2 <= C^{-1} t : t <= m1 |t|^2`.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let a = 1.0 / (2.0 * self.mu + 2.0 * self.lambda);
        let b = 1.0 / (2.0 * self.mu);
        (a.min(b), a.max(b))
    }
}

/// The seven sparse blocks, each in block-local indexing.
#[derive(Clone, Debug)]
pub struct SystemBlocks {
    pub layout: DofLayout,
    /// stress x stress
    pub m0: CsrMatrix,
    /// stress x velocity
    pub m1: CsrMatrix,
    /// stress x trace
    pub m2: CsrMatrix,
    /// velocity x velocity
    pub m3: CsrMatrix,
    /// velocity x trace
    pub m4: CsrMatrix,
    /// trace x velocity
    pub m5: CsrMatrix,
    /// trace x trace
    pub m6: CsrMatrix,
}

impl SystemBlocks {
    /// `||sigma_h||_a^2 = a_h(sigma_h, sigma_h)`.
    pub fn a_norm_sq(&self, eta: &[f64]) -> f64 {
        self.m0.bilinear(eta, eta)
    }

    pub fn a_h(&self, eta_s: &[f64], eta_t: &[f64]) -> f64 {
        self.m0.bilinear(eta_t, eta_s)
    }

    pub fn b_h(&self, eta: &[f64], beta: &[f64], gamma: &[f64]) -> f64 {
        -self.m1.bilinear(eta, beta) - self.m2.bilinear(eta, gamma)
    }

    pub fn s_h(&self, v: (&[f64], &[f64]), w: (&[f64], &[f64])) -> f64 {
        self.m3.bilinear(w.0, v.0) + self.m4.bilinear(w.0, v.1) + self.m5.bilinear(w.1, v.0) + self.m6.bilinear(w.1, v.1)
    }
}

/// Assembles all blocks on `space` for the law `law`.
pub fn assemble_blocks(space: &WgSpace, law: &IsotropicLaw) -> SystemBlocks {
    let l = &space.layout;
    let (ns, nv, nt) = (l.num_stress(), l.num_velocity(), l.num_trace());
    let mut m0 = Triplets::new(ns, ns);
    let mut m1 = Triplets::new(ns, nv);
    let mut m2 = Triplets::new(ns, nt);
    let mut m3 = Triplets::new(nv, nv);
    let mut m4 = Triplets::new(nv, nt);
    let mut m6 = Triplets::new(nt, nt);

    let diag = 1.0 / (2.0 * law.mu) - law.trace_coupling();
    let off = -law.trace_coupling();
    let shear = 1.0 / law.mu;
    let tb = EdgeBasis { degree: space.k };
    let rule = &space.edge_rule;

    for lc in &space.cells {
        let cell = lc.cell;
        let sd = lc.stress_dim();
        let vd = lc.velocity_dim();
        let td = lc.trace_dim();

        // a_h: C^{-1} applied to each tensor basis function, paired through
        // s : t = s11 t11 + s22 t22 + 2 s12 t12
        let m = lc.stress.mass.matrix();
        for a in 0..sd {
            for b in 0..sd {
                let v = m[a * sd + b];
                let (i0, j0) = (l.stress(cell, 0, a), l.stress(cell, 0, b));
                let (i1, j1) = (l.stress(cell, 1, a), l.stress(cell, 1, b));
                m0.push(i0, j0, diag * v);
                m0.push(i1, j1, diag * v);
                m0.push(i0, j1, off * v);
                m0.push(i1, j0, off * v);
                m0.push(l.stress(cell, 2, a), l.stress(cell, 2, b), shear * v);
            }
        }

        // (psi_j e_r, div Phi_a)
        let mut local = vec![0.0; 3 * sd * 2 * vd];
        let mut dphi = vec![[0.0; 2]; sd];
        for (q, (x, w)) in lc.stress.quad.points.iter().zip(&lc.stress.quad.weights).enumerate() {
            lc.stress.basis.grad_into(*x, &mut dphi);
            let psi = &lc.velocity.values[q * vd..(q + 1) * vd];
            for (a, g) in dphi.iter().enumerate() {
                // divergence of the basis tensor for each component, per row r
                let div = [[g[0], 0.0], [0.0, g[1]], [g[1], g[0]]];
                for comp in 0..3 {
                    for r in 0..2 {
                        if div[comp][r] == 0.0 {
                            continue;
                        }
                        let row = (comp * sd + a) * 2 * vd + r * vd;
                        for (j, p) in psi.iter().enumerate() {
                            local[row + j] += w * p * div[comp][r];
                        }
                    }
                }
            }
        }
        for comp in 0..3 {
            for a in 0..sd {
                for r in 0..2 {
                    for j in 0..vd {
                        m1.push(l.stress(cell, comp, a), l.velocity(cell, r, j), local[(comp * sd + a) * 2 * vd + r * vd + j]);
                    }
                }
            }
        }

        let mut phi = vec![0.0; sd];
        let mut psi = vec![0.0; vd];
        let mut chi = vec![0.0; td];
        for le in &lc.edges {
            let slot = l.edge_slot[le.edge];
            let n = le.normal;
            let alpha = 1.0 / le.length;
            // p[m * vd + j] = <chi_m, psi_j>_E
            let mut p = vec![0.0; td * vd];
            // t[(comp * sd + a) * 2 * td + r * td + m] = <chi_m, (Phi_a n)_r>_E
            let mut t = vec![0.0; 3 * sd * 2 * td];
            for (s, w) in rule.nodes.iter().zip(&rule.weights) {
                let x: Point = space.mesh.edge_point(le.edge, *s);
                let w = w * le.length;
                lc.stress.basis.eval_into(x, &mut phi);
                lc.velocity.basis.eval_into(x, &mut psi);
                tb.eval_into(*s, &mut chi);
                for (mi, c) in chi.iter().enumerate() {
                    for (j, ps) in psi.iter().enumerate() {
                        p[mi * vd + j] += w * c * ps;
                    }
                }
                if slot.is_some() {
                    for (a, f) in phi.iter().enumerate() {
                        let traction = [[f * n[0], 0.0], [0.0, f * n[1]], [f * n[1], f * n[0]]];
                        for comp in 0..3 {
                            for r in 0..2 {
                                let base = (comp * sd + a) * 2 * td + r * td;
                                for (mi, c) in chi.iter().enumerate() {
                                    t[base + mi] += w * c * traction[comp][r];
                                }
                            }
                        }
                    }
                }
            }

            // alpha <Q_b psi_i, Q_b psi_j>_E = alpha (P' m_E^{-1} P)_{ij}
            let es = &space.edges[le.edge];
            let mut minv_p = p.clone();
            let mut col = vec![0.0; td];
            for j in 0..vd {
                for mi in 0..td {
                    col[mi] = p[mi * vd + j];
                }
                es.mass.solve_in_place(&mut col);
                for mi in 0..td {
                    minv_p[mi * vd + j] = col[mi];
                }
            }
            for i in 0..vd {
                for j in 0..vd {
                    let v: f64 = (0..td).map(|mi| p[mi * vd + i] * minv_p[mi * vd + j]).sum();
                    for r in 0..2 {
                        m3.push(l.velocity(cell, r, i), l.velocity(cell, r, j), alpha * v);
                    }
                }
            }

            let Some(slot) = slot else { continue };
            let em = es.mass.matrix();
            for r in 0..2 {
                for mi in 0..td {
                    let ti = l.trace(slot, r, mi);
                    for j in 0..vd {
                        m4.push(l.velocity(cell, r, j), ti, -alpha * p[mi * vd + j]);
                    }
                    for mj in 0..td {
                        m6.push(ti, l.trace(slot, r, mj), alpha * em[mi * td + mj]);
                    }
                    for comp in 0..3 {
                        for a in 0..sd {
                            m2.push(l.stress(cell, comp, a), ti, -t[(comp * sd + a) * 2 * td + r * td + mi]);
                        }
                    }
                }
            }
        }
    }

    let m4 = m4.to_csr();
    let m5 = m4.transpose();
    SystemBlocks { layout: l.clone(), m0: m0.to_csr(), m1: m1.to_csr(), m2: m2.to_csr(), m3: m3.to_csr(), m4, m5, m6: m6.to_csr() }
}

/// The assembled per-step matrix for one `dt`, factored once.
#[derive(Debug)]
pub struct StepMatrix {
    pub dt: f64,
    pub matrix: CsrMatrix,
    pub lu: SparseLu,
}

impl StepMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.lu.solve(rhs)
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        self.lu.solve_in_place(rhs)
    }
}

/// Builds the global step matrix for `dt` without factoring it.
pub fn step_matrix(blocks: &SystemBlocks, dt: f64) -> CsrMatrix {
    let l = &blocks.layout;
    let (v0, t0) = (l.velocity_offset(), l.trace_offset());
    let n = l.total();
    let mut t = Triplets::new(n, n);
    t.push_block(&blocks.m0, 0, 0, 1.0 / dt + 1.0);
    t.push_block(&blocks.m1, 0, v0, 1.0);
    t.push_block(&blocks.m2, 0, t0, 1.0);
    t.push_block(&blocks.m1.transpose(), v0, 0, -1.0);
    t.push_block(&blocks.m3, v0, v0, 1.0);
    t.push_block(&blocks.m4, v0, t0, 1.0);
    t.push_block(&blocks.m2.transpose(), t0, 0, -1.0);
    t.push_block(&blocks.m5, t0, v0, 1.0);
    t.push_block(&blocks.m6, t0, t0, 1.0);
    t.to_csr()
}

/// Assembles and factors the step matrix; a singular matrix is an error.
pub fn assemble_step_matrix(blocks: &SystemBlocks, dt: f64) -> Result<StepMatrix> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("time step must be positive, got {dt}")));
    }
    let matrix = step_matrix(blocks, dt);
    let lu = SparseLu::factor(&matrix)?;
    Ok(StepMatrix { dt, matrix, lu })
}

/// Velocity moments `(f, psi_j e_r)` of a vector field, in `beta` indexing.
pub fn velocity_moments(space: &WgSpace, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let l = &space.layout;
    let mut out = vec![0.0; l.num_velocity()];
    for lc in &space.cells {
        let values: Vec<[f64; 2]> = lc.data_quad.points.iter().map(|x| f(*x)).collect();
        for r in 0..2 {
            let b = crate::wgops::data_moments(&lc.velocity.basis, &lc.data_quad, |q| values[q][r]);
            out[l.velocity_range(lc.cell, r)].copy_from_slice(&b);
        }
    }
    out
}

/// Full-length right-hand side carrying only the load `(f(., t), w0)`.
pub fn assemble_load(space: &WgSpace, f: impl Fn(Point, f64) -> [f64; 2], t: f64) -> Vec<f64> {
    let l = &space.layout;
    let mut rhs = vec![0.0; l.total()];
    let v = velocity_moments(space, |x| f(x, t));
    rhs[l.velocity_offset()..l.trace_offset()].copy_from_slice(&v);
    rhs
}
