//! Weak Galerkin finite elements for the quasistatic Maxwell viscoelastic
//! model in velocity-stress form.
//!
//! The discretization uses piecewise `P_k` stresses, piecewise `P_{k+1}`
//! interior velocities and `P_k` velocity traces on interior edges, with a
//! backward Euler time loop whose step matrix is factored once and reused.
//!
//! Module map:
//!
//! * [`mesh`]: uniform triangulations of the unit square
//! * [`polyspace`]: scaled monomial bases, quadrature and L2 projections
//! * [`wgops`]: discrete weak gradient / strain / divergence and the DOF layout
//! * [`system`]: constitutive law, block assembly, step matrix and load vector
//! * [`evolve`]: time loop and discrete energy ledger
//! * [`mms`]: manufactured solutions and error norms
//! * [`study`]: convergence studies and CSV / markdown reports
//! * [`vtk`]: legacy ASCII VTK output

pub mod error;
pub mod evolve;
pub mod mesh;
pub mod mms;
pub mod polyspace;
pub mod sparse;
pub mod study;
pub mod system;
pub mod vtk;
pub mod wgops;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// Symmetric 2x2 tensor stored as `(s11, s22, s12)`.
///
/// The Frobenius inner product of two such tensors is
/// `s11*t11 + s22*t22 + 2*s12*t12`.
pub type Sym2 = [f64; 3];

/// Frobenius inner product `s : t` of two symmetric tensors.
#[inline]
pub fn sym_dot(s: &Sym2, t: &Sym2) -> f64 {
    s[0] * t[0] + s[1] * t[1] + 2.0 * s[2] * t[2]
}
