//! Manufactured solutions on the unit square and discrete error norms.
//!
//! Both cases separate in time: the velocity is `e^{-t} V(x)`, the stress
//! `t e^{-t} S(x)` and the body force `t e^{-t} G(x)`, with `S = C eps(V)`.
//! The forcing is stored in closed form (derived symbolically offline) and
//! checked in the tests against a finite-difference divergence of the stress.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::polyspace::QuadratureRule;
use crate::system::IsotropicLaw;
use crate::wgops::WgSpace;
use crate::{sym_dot, Error, Point, Result, Sym2};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Example {
    /// Polynomial velocity built from `p(s) = s^2 (1 - s)^2`.
    #[default]
    Polynomial,
    /// Velocity `sin(pi x) sin(pi y) (1, 1)`.
    Trig,
}

impl Example {
    pub const ALL: [Example; 2] = [Example::Polynomial, Example::Trig];

    pub fn as_str(self) -> &'static str {
        match self {
            Example::Polynomial => "polynomial",
            Example::Trig => "trig",
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "polynomial" | "poly" => Ok(Example::Polynomial),
            "trig" | "trigonometric" => Ok(Example::Trig),
            other => Err(Error::InvalidConfig(format!("unknown example '{other}' (expected polynomial or trig)"))),
        }
    }
}

/// An exact solution of the model with `mu = lambda = 1` and zero initial stress.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub example: Example,
    pub law: IsotropicLaw,
}

pub fn case_polynomial() -> ManufacturedCase {
    ManufacturedCase { example: Example::Polynomial, law: IsotropicLaw::default() }
}

pub fn case_trig() -> ManufacturedCase {
    ManufacturedCase { example: Example::Trig, law: IsotropicLaw::default() }
}

impl From<Example> for ManufacturedCase {
    fn from(example: Example) -> Self {
        ManufacturedCase { example, law: IsotropicLaw::default() }
    }
}

fn p(s: f64) -> f64 {
    s * s * (1.0 - s) * (1.0 - s)
}

fn dp(s: f64) -> f64 {
    2.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
}

fn ddp(s: f64) -> f64 {
    12.0 * s * s - 12.0 * s + 2.0
}

impl ManufacturedCase {
    pub fn name(&self) -> &'static str {
        self.example.as_str()
    }

    /// `"polynomial"` for a `C^inf` polynomial field, `"analytic"` otherwise.
    pub fn smoothness(&self) -> &'static str {
        match self.example {
            Example::Polynomial => "polynomial",
            Example::Trig => "analytic",
        }
    }

    pub fn stress_time_factor(t: f64) -> f64 {
        t * (-t).exp()
    }

    pub fn velocity_time_factor(t: f64) -> f64 {
        (-t).exp()
    }

    /// `V` with `v = e^{-t} V`.
    pub fn velocity_profile(&self, x: Point) -> [f64; 2] {
        let [a, b] = x;
        match self.example {
            Example::Polynomial => [p(a) * dp(b), p(b) * dp(a)],
            Example::Trig => {
                let s = (PI * a).sin() * (PI * b).sin();
                [s, s]
            }
        }
    }

    /// Row-major gradient `[dV1/dx, dV1/dy, dV2/dx, dV2/dy]`.
    pub fn velocity_profile_gradient(&self, x: Point) -> [f64; 4] {
        let [a, b] = x;
        match self.example {
            Example::Polynomial => [dp(a) * dp(b), p(a) * ddp(b), p(b) * ddp(a), dp(a) * dp(b)],
            Example::Trig => {
                let (sa, ca) = (PI * a).sin_cos();
                let (sb, cb) = (PI * b).sin_cos();
                let (gx, gy) = (PI * ca * sb, PI * sa * cb);
                [gx, gy, gx, gy]
            }
        }
    }

    /// `eps(V)`.
    pub fn strain_profile(&self, x: Point) -> Sym2 {
        let g = self.velocity_profile_gradient(x);
        [g[0], g[3], 0.5 * (g[1] + g[2])]
    }

    /// `S` with `sigma = t e^{-t} S`.
    pub fn stress_profile(&self, x: Point) -> Sym2 {
        let [a, b] = x;
        match self.example {
            Example::Polynomial => {
                let d = 4.0 * dp(a) * dp(b);
                [d, d, p(a) * ddp(b) + p(b) * ddp(a)]
            }
            Example::Trig => {
                let (sa, ca) = (PI * a).sin_cos();
                let (sb, cb) = (PI * b).sin_cos();
                [PI * (3.0 * ca * sb + sa * cb), PI * (3.0 * sa * cb + ca * sb), PI * (sa * cb + ca * sb)]
            }
        }
    }

    /// `G = -div S`, so that `f = t e^{-t} G`.
    pub fn forcing_profile(&self, x: Point) -> [f64; 2] {
        let [a, b] = x;
        match self.example {
            Example::Polynomial => {
                let g1 = -4.0
                    * (2.0 * b - 1.0)
                    * (3.0 * a.powi(4) - 6.0 * a.powi(3) + 30.0 * a * a * b * b - 30.0 * a * a * b + 3.0 * a * a - 30.0 * a * b * b
                        + 30.0 * a * b
                        + 5.0 * b * b
                        - 5.0 * b);
                let g2 = -4.0
                    * (2.0 * a - 1.0)
                    * (30.0 * a * a * b * b - 30.0 * a * a * b + 5.0 * a * a - 30.0 * a * b * b + 30.0 * a * b - 5.0 * a + 3.0 * b.powi(4) - 6.0 * b.powi(3)
                        + 3.0 * b * b);
                [g1, g2]
            }
            Example::Trig => {
                let g = -PI * PI * (3.0 * (PI * (a + b)).cos() - (PI * (a - b)).cos());
                [g, g]
            }
        }
    }

    pub fn displacement(&self, x: Point, t: f64) -> [f64; 2] {
        let v = self.velocity_profile(x);
        let e = -(-t).exp();
        [e * v[0], e * v[1]]
    }

    pub fn velocity(&self, x: Point, t: f64) -> [f64; 2] {
        let v = self.velocity_profile(x);
        let e = Self::velocity_time_factor(t);
        [e * v[0], e * v[1]]
    }

    pub fn strain_rate(&self, x: Point, t: f64) -> Sym2 {
        self.strain_profile(x).map(|c| Self::velocity_time_factor(t) * c)
    }

    pub fn stress(&self, x: Point, t: f64) -> Sym2 {
        self.stress_profile(x).map(|c| Self::stress_time_factor(t) * c)
    }

    pub fn forcing(&self, x: Point, t: f64) -> [f64; 2] {
        let g = self.forcing_profile(x);
        let e = Self::stress_time_factor(t);
        [e * g[0], e * g[1]]
    }

    /// `sigma(., 0)`, identically zero for both cases.
    pub fn initial_stress(&self, x: Point) -> Sym2 {
        self.stress(x, 0.0)
    }
}

/// Errors of a discrete solution at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    /// `||sigma - sigma_h||_0 / ||sigma||_0`.
    pub stress: f64,
    /// `||eps(v) - eps_h(v_h0)||_0 / ||eps(v)||_0`.
    pub strain: f64,
    /// `sqrt(dt)` times [`ErrorReport::strain`].
    pub strain_scaled: f64,
    /// `||v - v_h0||_0 / ||v||_0`.
    pub velocity: f64,
    /// Set when some exact norm vanished and the corresponding entry is an
    /// absolute error instead of a relative one.
    pub absolute: bool,
}

/// Error norms at time `t` using the cells' data quadrature.
pub fn error_norms(space: &WgSpace, eta: &[f64], beta: &[f64], case: &ManufacturedCase, t: f64, dt: f64) -> ErrorReport {
    error_norms_with_rule(space, eta, beta, case, t, dt, None)
}

/// As [`error_norms`], optionally with an explicit quadrature rule.
pub fn error_norms_with_rule(
    space: &WgSpace,
    eta: &[f64],
    beta: &[f64],
    case: &ManufacturedCase,
    t: f64,
    dt: f64,
    rule: Option<&QuadratureRule>,
) -> ErrorReport {
    let l = &space.layout;
    // [error, exact] squared sums for stress, strain, velocity
    let mut acc = [[0.0f64; 2]; 3];
    for lc in &space.cells {
        let owned;
        let quad = match rule {
            Some(r) => {
                owned = r.on_cell(&space.mesh, lc.cell);
                &owned
            }
            None => &lc.data_quad,
        };
        let s = |c| &eta[l.stress_range(lc.cell, c)];
        let v = |r| &beta[l.velocity_range(lc.cell, r)];
        for (x, w) in quad.points.iter().zip(&quad.weights) {
            let x = *x;
            let sig = case.stress(x, t);
            let sh = [0, 1, 2].map(|c| lc.stress.eval(s(c), x));
            let ds = [0, 1, 2].map(|c| sig[c] - sh[c]);
            acc[0][0] += w * sym_dot(&ds, &ds);
            acc[0][1] += w * sym_dot(&sig, &sig);

            let eps = case.strain_rate(x, t);
            let g0 = lc.velocity.basis.grad_coeffs(v(0), x);
            let g1 = lc.velocity.basis.grad_coeffs(v(1), x);
            let eh = [g0[0], g1[1], 0.5 * (g0[1] + g1[0])];
            let de = [0, 1, 2].map(|c| eps[c] - eh[c]);
            acc[1][0] += w * sym_dot(&de, &de);
            acc[1][1] += w * sym_dot(&eps, &eps);

            let vel = case.velocity(x, t);
            let vh = [lc.velocity.eval(v(0), x), lc.velocity.eval(v(1), x)];
            acc[2][0] += w * ((vel[0] - vh[0]).powi(2) + (vel[1] - vh[1]).powi(2));
            acc[2][1] += w * (vel[0] * vel[0] + vel[1] * vel[1]);
        }
    }
    let mut absolute = false;
    let [stress, strain, velocity] = acc.map(|[e, n]| {
        if n > 0.0 {
            (e / n).sqrt()
        } else {
            absolute = true;
            e.sqrt()
        }
    });
    ErrorReport { stress, strain, strain_scaled: dt.sqrt() * strain, velocity, absolute }
}

/// `log(e_coarse / e_fine) / log(ratio)`.
pub fn observed_order(e_coarse: f64, e_fine: f64, ratio: f64) -> Result<f64> {
    for e in [e_coarse, e_fine] {
        if !(e > 0.0) {
            return Err(Error::NonPositiveError(e));
        }
    }
    if !(ratio > 0.0 && ratio != 1.0) {
        return Err(Error::InvalidConfig(format!("refinement ratio {ratio} must be positive and not 1")));
    }
    Ok((e_coarse / e_fine).ln() / ratio.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_uniform_mesh, Pattern};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(n: usize, seed: u64) -> Vec<(Point, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| ([rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)], rng.gen_range(0.0..2.0))).collect()
    }

    #[test]
    fn constitutive_law_is_satisfied() {
        for case in [case_polynomial(), case_trig()] {
            for (x, t) in samples(100, 1) {
                let s = case.stress(x, t);
                // d/dt (t e^{-t}) = (1 - t) e^{-t}
                let st = case.stress_profile(x).map(|c| (1.0 - t) * (-t).exp() * c);
                let ce = case.law.apply_c(&case.strain_rate(x, t));
                for c in 0..3 {
                    assert!((s[c] + st[c] - ce[c]).abs() <= 1e-10, "{} {c}", case.name());
                }
            }
        }
    }

    #[test]
    fn forcing_is_minus_divergence_of_stress() {
        let h = 1e-5;
        for case in [case_polynomial(), case_trig()] {
            for (x, t) in samples(50, 2) {
                let d = |dir: usize, comp: usize| {
                    let mut a = x;
                    let mut b = x;
                    a[dir] += h;
                    b[dir] -= h;
                    (case.stress(a, t)[comp] - case.stress(b, t)[comp]) / (2.0 * h)
                };
                let div = [d(0, 0) + d(1, 2), d(0, 2) + d(1, 1)];
                let f = case.forcing(x, t);
                for r in 0..2 {
                    assert!((f[r] + div[r]).abs() <= 1e-8 * (1.0 + f[r].abs()), "{} {r}: {} vs {}", case.name(), f[r], -div[r]);
                }
            }
        }
    }

    #[test]
    fn velocity_gradient_matches_finite_differences() {
        let h = 1e-6;
        for case in [case_polynomial(), case_trig()] {
            for (x, _) in samples(30, 3) {
                let g = case.velocity_profile_gradient(x);
                for dir in 0..2 {
                    let mut a = x;
                    let mut b = x;
                    a[dir] += h;
                    b[dir] -= h;
                    for r in 0..2 {
                        let fd = (case.velocity_profile(a)[r] - case.velocity_profile(b)[r]) / (2.0 * h);
                        assert!((fd - g[2 * r + dir]).abs() <= 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_values_and_initial_stress_vanish() {
        for case in [case_polynomial(), case_trig()] {
            for s in [0.0, 0.13, 0.5, 0.77, 1.0] {
                for x in [[s, 0.0], [s, 1.0], [0.0, s], [1.0, s]] {
                    for t in [0.0, 0.4, 1.0] {
                        assert!(case.velocity(x, t).iter().all(|v| v.abs() <= 1e-12));
                        assert!(case.displacement(x, t).iter().all(|v| v.abs() <= 1e-12));
                    }
                }
                assert_eq!(case.initial_stress([s, 0.3]), [0.0; 3]);
            }
        }
    }

    #[test]
    fn printed_stress_formulas() {
        let case = case_polynomial();
        let q = |s: f64| 2.0 * s.powi(3) - 3.0 * s * s + s;
        for (x, t) in samples(20, 4) {
            let [a, b] = x;
            let e = t * (-t).exp();
            let s = case.stress(x, t);
            assert!((s[0] - 16.0 * e * q(a) * q(b)).abs() < 1e-13);
            assert!((s[1] - 16.0 * e * q(a) * q(b)).abs() < 1e-13);
            let s12 = 2.0 * e * (p(a) * (6.0 * b * b - 6.0 * b + 1.0) + p(b) * (6.0 * a * a - 6.0 * a + 1.0));
            assert!((s[2] - s12).abs() < 1e-13);
            let u = case.displacement(x, t);
            assert!((u[0] + (-t).exp() * p(a) * (4.0 * b.powi(3) - 6.0 * b * b + 2.0 * b)).abs() < 1e-14);
        }
    }

    #[test]
    fn example_names_round_trip() {
        for e in Example::ALL {
            assert_eq!(e.as_str().parse::<Example>().unwrap(), e);
        }
        assert!("cubic".parse::<Example>().is_err());
    }

    #[test]
    fn observed_order_examples() {
        assert!((observed_order(0.04, 0.01, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((observed_order(3.3882e-02, 8.7967e-03, 2.0).unwrap() - 1.95).abs() < 5e-3);
        assert!((observed_order(6.7960e-02, 3.2583e-02, 2.0).unwrap() - 1.06).abs() < 5e-3);
        assert!(observed_order(0.0, 1.0, 2.0).is_err());
        assert!(observed_order(1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn errors_of_projected_fields_are_projection_errors() {
        let case = case_trig();
        let ws = WgSpace::new(build_uniform_mesh(4, Pattern::DiagonalNe).unwrap(), 2).unwrap();
        let t = 1.0;
        let eta = ws.project_stress(|x| case.stress(x, t));
        let (beta, _) = ws.interpolate_velocity(|x| case.velocity(x, t));
        let r = error_norms(&ws, &eta, &beta, &case, t, 0.01);
        assert!(!r.absolute);
        assert!(r.stress > 0.0 && r.stress < 0.05);
        assert!(r.velocity < 0.01);
        assert!((r.strain_scaled - 0.1 * r.strain).abs() < 1e-15);

        // a case replaced by its own discrete fields has zero error
        let poly = ManufacturedCase { example: Example::Polynomial, law: IsotropicLaw::default() };
        let zero = vec![0.0; eta.len()];
        let r0 = error_norms(&ws, &zero, &vec![0.0; beta.len()], &poly, 0.0, 0.01);
        assert!(r0.absolute);
        assert_eq!(r0.stress, 0.0);
    }

    #[test]
    fn error_quadrature_is_converged() {
        for (case, k) in [(case_polynomial(), 1), (case_trig(), 2)] {
            let ws = WgSpace::new(build_uniform_mesh(8, Pattern::DiagonalNe).unwrap(), k).unwrap();
            let t = 1.0;
            let eta = ws.project_stress(|x| case.stress(x, t));
            let (beta, _) = ws.interpolate_velocity(|x| case.velocity(x, t));
            let base = error_norms(&ws, &eta, &beta, &case, t, 1.0);
            let rule = QuadratureRule::triangle(QuadratureRule::for_data(k).degree + 2);
            let fine = error_norms_with_rule(&ws, &eta, &beta, &case, t, 1.0, Some(&rule));
            for (a, b) in [(base.stress, fine.stress), (base.strain, fine.strain), (base.velocity, fine.velocity)] {
                assert!((a - b).abs() <= 1e-3 * b, "{a} {b}");
            }
        }
    }
}
