//! Backward Euler time stepping and the discrete energy ledger.
//!
//! Each step solves the factored step matrix against
//! `(M0 eta_prev / dt, F^n, 0)`. Testing the three block rows with the new
//! solution and summing gives, after multiplication by `2 dt`,
//!
//! ```text
//! |s^n - s^{n-1}|_a^2 + |s^n|_a^2 - |s^{n-1}|_a^2 + 2dt |s^n|_a^2 + 2dt s_h(v^n, v^n) = 2dt (f^n, v0^n)
//! ```
//!
//! which the ledger accumulates step by step.

use crate::system::{assemble_step_matrix, velocity_moments, StepMatrix, SystemBlocks};
use crate::wgops::WgSpace;
use crate::{Error, Point, Result, Sym2};

/// Discrete solution `(eta, beta, gamma)` at `t_n = n dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub eta: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub step: usize,
    pub time: f64,
}

/// `sigma_h^0 = Q_k^0 psi0`; velocities start at zero.
pub fn initial_state(space: &WgSpace, psi0: impl Fn(Point) -> Sym2) -> State {
    let l = &space.layout;
    State { eta: space.project_stress(psi0), beta: vec![0.0; l.num_velocity()], gamma: vec![0.0; l.num_trace()], step: 0, time: 0.0 }
}

/// Body force, given by its velocity moments at each step time.
pub enum Forcing<'a> {
    None,
    /// `f(x, t) = factor(t) g(x)`, with the moments of `g` computed once.
    Separable {
        load: Vec<f64>,
        factor: Box<dyn Fn(f64) -> f64 + 'a>,
    },
    /// Moments recomputed from `f(x, t)` every step.
    General(Box<dyn Fn(Point, f64) -> [f64; 2] + 'a>),
}

impl<'a> Forcing<'a> {
    pub fn separable(space: &WgSpace, g: impl Fn(Point) -> [f64; 2], factor: impl Fn(f64) -> f64 + 'a) -> Self {
        Forcing::Separable { load: velocity_moments(space, g), factor: Box::new(factor) }
    }

    /// Velocity moments `(f(., t), psi)` written into `out`.
    pub fn moments_into(&self, space: &WgSpace, t: f64, out: &mut [f64]) {
        match self {
            Forcing::None => out.fill(0.0),
            Forcing::Separable { load, factor } => {
                let c = factor(t);
                out.iter_mut().zip(load).for_each(|(o, l)| *o = c * l);
            }
            Forcing::General(f) => out.copy_from_slice(&velocity_moments(space, |x| f(x, t))),
        }
    }
}

/// Energy terms of one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LedgerEntry {
    /// `||sigma^n - sigma^{n-1}||_a^2`
    pub increment: f64,
    /// `||sigma^n||_a^2`
    pub energy: f64,
    /// `s_h(v^n, v^n)`
    pub stabilization: f64,
    /// `(f^n, v0^n)`
    pub work: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    pub dt: f64,
    /// `||sigma^0||_a^2`
    pub initial_energy: f64,
    pub entries: Vec<LedgerEntry>,
}

impl EnergyLedger {
    /// Residual of the summed identity after `j` steps, relative to its
    /// largest term (zero when every term vanishes).
    pub fn residual_at(&self, j: usize) -> f64 {
        let dt = self.dt;
        let e = &self.entries[..j];
        let terms = [
            e.iter().map(|x| x.increment).sum::<f64>(),
            e.last().map_or(self.initial_energy, |x| x.energy),
            2.0 * dt * e.iter().map(|x| x.energy).sum::<f64>(),
            2.0 * dt * e.iter().map(|x| x.stabilization).sum::<f64>(),
            -self.initial_energy,
            -2.0 * dt * e.iter().map(|x| x.work).sum::<f64>(),
        ];
        let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            0.0
        } else {
            terms.iter().sum::<f64>().abs() / scale
        }
    }
}

/// Largest relative residual of the energy identity over all partial sums.
pub fn check_energy_identity(ledger: &EnergyLedger) -> f64 {
    (1..=ledger.entries.len()).map(|j| ledger.residual_at(j)).fold(0.0, f64::max)
}

/// Size and timing-independent counters of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolverStats {
    pub unknowns: usize,
    pub nonzeros: usize,
    pub steps: usize,
}

/// A time loop over one factored step matrix.
pub struct Simulation<'a> {
    pub space: &'a WgSpace,
    pub blocks: &'a SystemBlocks,
    pub matrix: StepMatrix,
    pub state: State,
    pub ledger: EnergyLedger,
    forcing: Forcing<'a>,
    rhs: Vec<f64>,
    load: Vec<f64>,
}

impl<'a> Simulation<'a> {
    pub fn new(space: &'a WgSpace, blocks: &'a SystemBlocks, dt: f64, forcing: Forcing<'a>, initial: State) -> Result<Self> {
        let l = &space.layout;
        if initial.eta.len() != l.num_stress() || initial.beta.len() != l.num_velocity() || initial.gamma.len() != l.num_trace() {
            return Err(Error::InvalidConfig("initial state does not match the space layout".into()));
        }
        let matrix = assemble_step_matrix(blocks, dt)?;
        let ledger = EnergyLedger { dt, initial_energy: blocks.a_norm_sq(&initial.eta), entries: Vec::new() };
        Ok(Self { space, blocks, matrix, state: initial, ledger, forcing, rhs: vec![0.0; l.total()], load: vec![0.0; l.num_velocity()] })
    }

    pub fn dt(&self) -> f64 {
        self.matrix.dt
    }

    pub fn stats(&self) -> SolverStats {
        SolverStats { unknowns: self.matrix.dim(), nonzeros: self.matrix.matrix.nnz(), steps: self.state.step }
    }

    /// Advances one step and appends its ledger entry.
    pub fn step(&mut self) -> Result<()> {
        let l = &self.space.layout;
        let dt = self.dt();
        let n = self.state.step + 1;
        let t = n as f64 * dt;
        let (v0, t0) = (l.velocity_offset(), l.trace_offset());

        self.blocks.m0.mul_vec_into(&self.state.eta, &mut self.rhs[..v0]);
        self.rhs[..v0].iter_mut().for_each(|r| *r /= dt);
        self.forcing.moments_into(self.space, t, &mut self.load);
        self.rhs[v0..t0].copy_from_slice(&self.load);
        self.rhs[t0..].fill(0.0);
        self.matrix.solve_in_place(&mut self.rhs);
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Factorization(format!("non-finite solution at step {n}")));
        }

        let eta = &self.rhs[..v0];
        let beta = &self.rhs[v0..t0];
        let gamma = &self.rhs[t0..];
        let diff: Vec<f64> = eta.iter().zip(&self.state.eta).map(|(a, b)| a - b).collect();
        self.ledger.entries.push(LedgerEntry {
            increment: self.blocks.a_norm_sq(&diff),
            energy: self.blocks.a_norm_sq(eta),
            stabilization: self.blocks.s_h((beta, gamma), (beta, gamma)),
            work: self.load.iter().zip(beta).map(|(f, v)| f * v).sum(),
        });
        self.state.eta.copy_from_slice(eta);
        self.state.beta.copy_from_slice(beta);
        self.state.gamma.copy_from_slice(gamma);
        self.state.step = n;
        self.state.time = t;
        Ok(())
    }

    /// Runs `steps` steps, calling `observe` after each one.
    pub fn run(&mut self, steps: usize, mut observe: impl FnMut(&State) -> Result<()>) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
            observe(&self.state)?;
        }
        Ok(())
    }
}

/// Number of uniform steps of size `dt` covering `[0, t_final]`; errors unless
/// `t_final / dt` is an integer.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && t_final > 0.0 && dt.is_finite() && t_final.is_finite()) {
        return Err(Error::InvalidConfig(format!("need positive T and dt, got T={t_final}, dt={dt}")));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final || n < 1.0 {
        return Err(Error::InvalidConfig(format!("dt={dt} does not divide T={t_final}")));
    }
    Ok(n as usize)
}
