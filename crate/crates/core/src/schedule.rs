//! Coupling schedules `t ↦ (a, b, ȧ, ḃ)` and their cost accounting.
//!
//! * Linear: straight interpolation from `(α, 0)` to `(0, α)` over `[0, T]`.
//! * Local: `a + b = α` with the crossing rate slaved to the gap so that
//!   `θ̇ = ε(λ₊−λ₋)/2` holds pointwise; window `[0, 2√(n−1)/(αε)]`.
//! * Parallel: the couplings ride the ellipse of constant gap `2β/√n`,
//!   parametrized by a sigmoid `F(t)` (tanh or erf) and truncated to the
//!   symmetric window `[−rT∥/2, rT∥/2]` without clamping `F` at the edges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analytics;
use crate::error::{Error, Result};
use crate::model::{CouplingPoint, SearchInstance};
use crate::numeric::sampled_max;

/// Number of uniform samples used before refining a peak.
const PEAK_SAMPLES: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Linear,
    Local,
    Parallel,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Linear, Strategy::Local, Strategy::Parallel];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Linear => "linear",
            Strategy::Local => "local",
            Strategy::Parallel => "parallel",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sigmoid `F` driving the parallel schedule along its ellipse.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    #[default]
    Tanh,
    Erf,
}

impl Shape {
    /// `(F(x), dF/dx)`.
    fn eval(self, x: f64) -> (f64, f64) {
        match self {
            Shape::Tanh => {
                let f = x.tanh();
                let sech = 1.0 / x.cosh();
                (f, sech * sech)
            }
            Shape::Erf => (
                libm::erf(x),
                std::f64::consts::FRAC_2_SQRT_PI * (-x * x).exp(),
            ),
        }
    }
}

/// Anything that can be propagated: a time window and couplings on it.
pub trait Coupling {
    /// `(t_i, t_f)` with `t_f > t_i`.
    fn window(&self) -> (f64, f64);

    fn point(&self, t: f64) -> CouplingPoint;

    /// Energy scale (`α` or `β`) used to normalize boundary residuals.
    fn scale(&self) -> f64;

    /// Closed-form prediction of the final loss, where one exists.
    fn analytic_loss(&self) -> Option<f64> {
        None
    }

    /// Closed-form peak coupling to report next to the sampled one.
    fn reference_a_peak(&self) -> Option<f64> {
        None
    }

    /// `|b(t_i)| + |a(t_f)|`, relative to [`Coupling::scale`].
    fn boundary_residual(&self) -> f64 {
        let (ti, tf) = self.window();
        (self.point(ti).b.abs() + self.point(tf).a.abs()) / self.scale()
    }
}

/// One of the three search schedules bound to a database size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    strategy: Strategy,
    scale: f64,
    epsilon: Option<f64>,
    t_char: f64,
    r: Option<f64>,
    shape: Shape,
    window: (f64, f64),
    n: u64,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::param(
            name,
            format!("must be finite and positive, got {value}"),
        ))
    }
}

pub fn linear_schedule(alpha: f64, t_total: f64, inst: &SearchInstance) -> Result<Schedule> {
    let alpha = positive("alpha", alpha)?;
    let t_total = positive("T", t_total)?;
    Ok(Schedule {
        strategy: Strategy::Linear,
        scale: alpha,
        epsilon: None,
        t_char: t_total,
        r: None,
        shape: Shape::default(),
        window: (0.0, t_total),
        n: inst.n(),
    })
}

pub fn local_schedule(alpha: f64, epsilon: f64, inst: &SearchInstance) -> Result<Schedule> {
    let alpha = positive("alpha", alpha)?;
    let epsilon = positive("epsilon", epsilon)?;
    let t_local = 2.0 * ((inst.n() - 1) as f64).sqrt() / (alpha * epsilon);
    Ok(Schedule {
        strategy: Strategy::Local,
        scale: alpha,
        epsilon: Some(epsilon),
        t_char: t_local,
        r: None,
        shape: Shape::default(),
        window: (0.0, t_local),
        n: inst.n(),
    })
}

pub fn parallel_schedule(
    beta: f64,
    t_par: f64,
    r: f64,
    shape: Shape,
    inst: &SearchInstance,
) -> Result<Schedule> {
    let beta = positive("beta", beta)?;
    let t_par = positive("T", t_par)?;
    let r = positive("r", r)?;
    let half = 0.5 * r * t_par;
    Ok(Schedule {
        strategy: Strategy::Parallel,
        scale: beta,
        epsilon: None,
        t_char: t_par,
        r: Some(r),
        shape,
        window: (-half, half),
        n: inst.n(),
    })
}

impl Schedule {
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// `α` for linear and local schedules, `β` for parallel ones.
    pub fn alpha_or_beta(&self) -> f64 {
        self.scale
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// `T_linear`, `T_local` or `T∥`.
    pub fn t_char(&self) -> f64 {
        self.t_char
    }

    pub fn r(&self) -> Option<f64> {
        self.r
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Inverse scaled duration `γ = √n/(βT∥)` of a parallel schedule.
    pub fn gamma(&self) -> Option<f64> {
        match self.strategy {
            Strategy::Parallel => Some((self.n as f64).sqrt() / (self.scale * self.t_char)),
            _ => None,
        }
    }

    /// Attach an adiabaticity parameter as metadata (linear/parallel runs).
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if self.strategy == Strategy::Local {
            return Err(Error::param(
                "epsilon",
                "fixed by construction for the local schedule",
            ));
        }
        self.epsilon = Some(positive("epsilon", epsilon)?);
        Ok(self)
    }

    /// True when `ε = 1/(2p)` for an integer `p`, where the local loss
    /// vanishes only through fine tuning.
    pub fn non_robust_epsilon(&self) -> bool {
        self.strategy == Strategy::Local
            && self.epsilon.is_some_and(analytics::is_fine_tuned_epsilon)
    }

    fn linear_point(&self, t: f64) -> CouplingPoint {
        let (ti, tf) = self.window;
        let rate = self.scale / self.t_char;
        CouplingPoint::new(rate * (tf - t), rate * (t - ti), -rate, rate)
    }

    fn local_point(&self, t: f64) -> CouplingPoint {
        let (ti, tf) = self.window;
        let alpha = self.scale;
        let n = self.n as f64;
        let s = (2.0 * t - ti - tf) / self.t_char;
        // n(1 − (n−1)s²/n) written so that s = ±1 gives exactly 1.
        let d = n * (1.0 - s) * (1.0 + s) + s * s;
        let a = 0.5 * alpha * (1.0 - s / d.sqrt());
        let a_dot = -alpha * n / (self.t_char * d * d.sqrt());
        CouplingPoint::new(a, alpha - a, a_dot, -a_dot)
    }

    fn parallel_point(&self, t: f64) -> CouplingPoint {
        let beta = self.scale;
        let n = self.n as f64;
        let k = (n - 1.0) / n;
        let inv_sqrt_n = 1.0 / n.sqrt();
        let (f, df) = self.shape.eval(t / self.t_char);
        let f_dot = df / self.t_char;
        let root = (1.0 - k * f * f).sqrt();
        let root_dot = -k * f * f_dot / root;
        CouplingPoint::new(
            beta * (root - f * inv_sqrt_n),
            beta * (root + f * inv_sqrt_n),
            beta * (root_dot - f_dot * inv_sqrt_n),
            beta * (root_dot + f_dot * inv_sqrt_n),
        )
    }
}

impl Coupling for Schedule {
    fn window(&self) -> (f64, f64) {
        self.window
    }

    fn point(&self, t: f64) -> CouplingPoint {
        match self.strategy {
            Strategy::Linear => self.linear_point(t),
            Strategy::Local => self.local_point(t),
            Strategy::Parallel => self.parallel_point(t),
        }
    }

    fn scale(&self) -> f64 {
        self.scale
    }

    fn analytic_loss(&self) -> Option<f64> {
        match (self.strategy, self.shape) {
            (Strategy::Local, _) => Some(analytics::local_loss_exact(self.epsilon?, self.n)),
            (Strategy::Parallel, Shape::Tanh) => Some(analytics::parallel_loss_asymptotic(
                self.scale,
                self.t_char,
                self.n,
            )),
            _ => None,
        }
    }

    fn reference_a_peak(&self) -> Option<f64> {
        match self.strategy {
            Strategy::Parallel => {
                let n = self.n as f64;
                Some(self.scale * (n - 2.0) / (n * (n - 1.0)).sqrt())
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub a_peak: f64,
    pub t_eff: f64,
    pub cost: f64,
    /// Closed-form peak value `β(n−2)/√(n(n−1))` quoted for the parallel
    /// schedule; shown alongside the sampled maximum, never used for `cost`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_a_peak: Option<f64>,
}

/// Peak coupling times effective duration. The peak is sampled densely over
/// the window and refined by golden-section search; `t_eff` is the full
/// window length (`rT∥` for parallel schedules).
pub fn cost<C: Coupling + ?Sized>(schedule: &C) -> CostReport {
    let (ti, tf) = schedule.window();
    let (_, a_peak) = sampled_max(|t| schedule.point(t).a, ti, tf, PEAK_SAMPLES);
    let t_eff = tf - ti;
    CostReport {
        a_peak,
        t_eff,
        cost: a_peak * t_eff,
        reference_a_peak: schedule.reference_a_peak(),
    }
}

/// `γ = εr/2`: the parallel schedule's `γ` at which its cost matches the
/// local schedule with adiabaticity `ε` (large-n matching).
pub fn equal_cost_gamma(epsilon: f64, r: f64) -> f64 {
    0.5 * epsilon * r
}

/// `T∥` solving `βrT∥ = 2(n−1)√n/((n−2)ε)`.
pub fn equal_cost_parallel_duration(epsilon: f64, r: f64, beta: f64, n: u64) -> Result<f64> {
    positive("epsilon", epsilon)?;
    positive("r", r)?;
    positive("beta", beta)?;
    if n <= 2 {
        return Err(Error::ExactDegenerateN);
    }
    let nf = n as f64;
    Ok(2.0 * (nf - 1.0) * nf.sqrt() / ((nf - 2.0) * epsilon * beta * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eigensystem, theta_dot};
    use crate::numeric::linspace;
    use approx::assert_relative_eq;

    fn inst(n: u64) -> SearchInstance {
        SearchInstance::new(n, 0).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        let i = inst(20);
        assert!(linear_schedule(0.0, 1.0, &i).is_err());
        assert!(linear_schedule(1.0, -1.0, &i).is_err());
        assert!(local_schedule(1.0, 0.0, &i).is_err());
        assert!(local_schedule(f64::NAN, 0.1, &i).is_err());
        assert!(parallel_schedule(1.0, 1.0, 0.0, Shape::Tanh, &i).is_err());
        assert!(parallel_schedule(1.0, f64::INFINITY, 8.0, Shape::Tanh, &i).is_err());
    }

    #[test]
    fn linear_values() {
        let s = linear_schedule(1.0, 1.0, &inst(20)).unwrap();
        let p0 = s.point(0.0);
        let p1 = s.point(1.0);
        let ph = s.point(0.5);
        assert_eq!((p0.a, p0.b, p1.a, p1.b), (1.0, 0.0, 0.0, 1.0));
        assert_eq!((ph.a, ph.b), (0.5, 0.5));
        assert_eq!((ph.a_dot, ph.b_dot), (-1.0, 1.0));
        let c = cost(&linear_schedule(1.0, 10.0, &inst(20)).unwrap());
        assert_relative_eq!(c.cost, 10.0, epsilon = 1e-12);
        assert_eq!(c.reference_a_peak, None);
    }

    #[test]
    fn local_values() {
        let s = local_schedule(1.0, 1.0 / 11.0, &inst(20)).unwrap();
        assert_relative_eq!(s.t_char(), 22.0 * 19f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(s.t_char(), 95.89, epsilon = 1e-2);
        let (ti, tf) = s.window();
        let start = s.point(ti);
        let end = s.point(tf);
        assert_eq!((start.a, start.b), (1.0, 0.0));
        assert_eq!((end.a, end.b), (0.0, 1.0));
        let mid = s.point(0.5 * (ti + tf));
        assert_relative_eq!(mid.a, 0.5, epsilon = 1e-15);
        assert_relative_eq!(mid.b, 0.5, epsilon = 1e-15);
        assert_eq!(s.boundary_residual(), 0.0);

        let c = cost(&s);
        assert_relative_eq!(c.cost, 2.0 * 19f64.sqrt() * 11.0, max_relative = 1e-12);
    }

    #[test]
    fn local_matches_rate_equation() {
        // ȧ = −(α²ε/2)(n/√(n−1))[1 − 4((n−1)/n)(a/α)(1 − a/α)]^{3/2}
        for &(alpha, eps, n) in &[(1.0, 1.0 / 11.0, 20u64), (2.5, 0.3, 7), (0.5, 0.05, 300)] {
            let s = local_schedule(alpha, eps, &inst(n)).unwrap();
            let nf = n as f64;
            let (ti, tf) = s.window();
            for t in linspace(ti, tf, 101) {
                let p = s.point(t);
                let x = p.a / alpha;
                let q = 1.0 - 4.0 * (nf - 1.0) / nf * x * (1.0 - x);
                let rate = -0.5 * alpha * alpha * eps * nf / (nf - 1.0).sqrt() * q.powf(1.5);
                assert_relative_eq!(p.a_dot, rate, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn parallel_values() {
        let i = inst(20);
        let s = parallel_schedule(1.0, 4.7, 8.0, Shape::Tanh, &i).unwrap();
        assert_eq!(s.window(), (-18.8, 18.8));
        let apex = s.point(0.0);
        assert_eq!((apex.a, apex.b), (1.0, 1.0));
        let e = eigensystem(&apex, &i).unwrap();
        assert_relative_eq!(e.gap, 2.0 / 20f64.sqrt(), epsilon = 1e-15);

        // untruncated start: F = −1 in double precision
        let far = parallel_schedule(1.0, 1.0, 80.0, Shape::Tanh, &i).unwrap();
        let p = far.point(far.window().0);
        assert_relative_eq!(p.a, 2.0 / 20f64.sqrt(), epsilon = 1e-15);
        assert!(p.b.abs() < 1e-15);

        // truncation leaves a residual coupling at the edges
        assert!(s.boundary_residual() > 0.0);
    }

    #[test]
    fn parallel_peak_by_dense_sampling() {
        let i = inst(20);
        let s = parallel_schedule(1.0, 7.99, 12.0, Shape::Tanh, &i).unwrap();
        let c = cost(&s);
        let exact = (20.0f64 / 19.0).sqrt();
        assert_relative_eq!(c.a_peak, exact, max_relative = 1e-10);
        assert_relative_eq!(c.a_peak, 1.0260, epsilon = 1e-4);
        assert_relative_eq!(c.t_eff, 12.0 * 7.99, epsilon = 1e-12);
        assert_relative_eq!(c.cost, 98.4, epsilon = 0.05);
        assert_relative_eq!(
            c.reference_a_peak.unwrap(),
            18.0 / 380f64.sqrt(),
            epsilon = 1e-15
        );

        // the peak sits at F = −1/√(n−1)
        let (ti, tf) = s.window();
        let (tp, _) = crate::numeric::sampled_max(|t| s.point(t).a, ti, tf, 4001);
        assert_relative_eq!((tp / 7.99).tanh(), -1.0 / 19f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn gamma_helpers() {
        assert_relative_eq!(
            equal_cost_gamma(1.0 / 11.0, 12.0),
            6.0 / 11.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            equal_cost_gamma(1.0 / 11.0, 8.0),
            4.0 / 11.0,
            epsilon = 1e-15
        );
        for r in [3.0, 8.0, 12.5] {
            assert_relative_eq!(equal_cost_gamma(2.0 / r, r), 1.0, epsilon = 1e-15);
        }
        assert_eq!(
            equal_cost_parallel_duration(0.1, 8.0, 1.0, 2),
            Err(Error::ExactDegenerateN)
        );
        let t = equal_cost_parallel_duration(0.1, 8.0, 1.0, 20).unwrap();
        assert_relative_eq!(
            8.0 * t,
            2.0 * 19.0 * 20f64.sqrt() / (18.0 * 0.1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn theta_dot_is_finite_at_local_endpoints() {
        let i = inst(20);
        let s = local_schedule(1.0, 0.2, &i).unwrap();
        let (ti, tf) = s.window();
        for t in [ti, tf] {
            let p = s.point(t);
            let e = eigensystem(&p, &i).unwrap();
            assert_relative_eq!(
                theta_dot(&p, &i).unwrap(),
                0.2 * e.gap / 2.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn fine_tuned_epsilon_flag() {
        let i = inst(20);
        assert!(local_schedule(1.0, 0.5, &i).unwrap().non_robust_epsilon());
        assert!(local_schedule(1.0, 0.125, &i).unwrap().non_robust_epsilon());
        assert!(!local_schedule(1.0, 1.0 / 11.0, &i)
            .unwrap()
            .non_robust_epsilon());
    }

    #[test]
    fn erf_shape_stays_on_ellipse() {
        let i = inst(50);
        let s = parallel_schedule(1.0, 3.0, 8.0, Shape::Erf, &i).unwrap();
        let (ti, tf) = s.window();
        for t in linspace(ti, tf, 57) {
            let e = eigensystem(&s.point(t), &i).unwrap();
            assert_relative_eq!(e.gap, 2.0 / 50f64.sqrt(), max_relative = 1e-12);
        }
        assert_eq!(s.analytic_loss(), None);
    }
}
