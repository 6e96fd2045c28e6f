//! Time propagation of the search dynamics.
//!
//! The reduced propagator advances the `(|u⟩, |m⟩)` amplitudes with the
//! exponential midpoint rule: each step applies the exact unitary
//! `exp(−i·H(t+dt/2)·dt)`, written in closed form through the decomposition
//! `H = mean·1 + Δσz + Ωσx`. The full-space oracle integrates the
//! n-dimensional equation with classic fourth-order Runge–Kutta, using the
//! rank-two structure of the Hamiltonian for the matrix–vector products.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{eigensystem, reduced_hamiltonian, theta_dot, EigenSystem, SearchInstance};
use crate::schedule::{cost, Coupling};

/// Largest tolerated `|‖ψ‖ − 1|` for the reduced propagator.
pub const REDUCED_NORM_TOL: f64 = 1e-9;
/// Largest tolerated `|‖ψ‖ − 1|` for the full-space oracle.
pub const FULL_NORM_TOL: f64 = 1e-7;
pub const MIN_STEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub c_u: Complex64,
    pub c_m: Complex64,
}

impl TwoLevelState {
    pub fn new(c_u: Complex64, c_m: Complex64) -> Self {
        Self { c_u, c_m }
    }

    pub fn basis_u() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn basis_m() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// The uniform superposition `|w⟩`.
    pub fn uniform(inst: &SearchInstance) -> Self {
        let (u, m) = inst.uniform_amplitudes();
        Self::new(Complex64::new(u, 0.0), Complex64::new(m, 0.0))
    }

    /// The upper instantaneous eigenstate `|+⟩`.
    pub fn eigen_plus(eig: &EigenSystem) -> Self {
        let (u, m) = eig.plus();
        Self::new(Complex64::new(u, 0.0), Complex64::new(m, 0.0))
    }

    pub fn norm(&self) -> f64 {
        (self.c_u.norm_sqr() + self.c_m.norm_sqr()).sqrt()
    }

    /// `(|c_u|², |c_m|²)`.
    pub fn populations(&self) -> (f64, f64) {
        (self.c_u.norm_sqr(), self.c_m.norm_sqr())
    }

    /// `(|⟨+|ψ⟩|², |⟨−|ψ⟩|²)`.
    pub fn eigen_populations(&self, eig: &EigenSystem) -> (f64, f64) {
        let (pu, pm) = eig.plus();
        let (mu, mm) = eig.minus();
        (
            (self.c_u * pu + self.c_m * pm).norm_sqr(),
            (self.c_u * mu + self.c_m * mm).norm_sqr(),
        )
    }

    /// Apply `exp(−i·H·dt)` for the reduced Hamiltonian `H`.
    fn evolve(&mut self, mean: f64, delta: f64, omega: f64, dt: f64) {
        let g = delta.hypot(omega);
        let phi = g * dt;
        let cos = phi.cos();
        // sin(g·dt)/g, continuous at g = 0
        let sinc = if g == 0.0 { dt } else { phi.sin() / g };
        let phase = Complex64::from_polar(1.0, -mean * dt);
        let minus_i_sinc = Complex64::new(0.0, -sinc);
        let (u, m) = (self.c_u, self.c_m);
        self.c_u = phase * (u * cos + minus_i_sinc * (u * delta + m * omega));
        self.c_m = phase * (m * cos + minus_i_sinc * (u * omega - m * delta));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub p_u: f64,
    pub p_m: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

pub const TRAJECTORY_HEADER: &str =
    "t,a,b,lambda_plus,lambda_minus,theta,theta_dot,p_u,p_m,p_plus,p_minus,norm";

/// Twelve significant digits in scientific notation.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRAJECTORY_HEADER}")?;
        for s in &self.samples {
            let row = [
                s.t,
                s.a,
                s.b,
                s.lambda_plus,
                s.lambda_minus,
                s.theta,
                s.theta_dot,
                s.p_u,
                s.p_m,
                s.p_plus,
                s.p_minus,
                s.norm,
            ]
            .map(format_sig12);
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub p_m_final: f64,
    /// `1 − |⟨+|ψ(t_f)⟩|²`, the population that left the followed eigenstate.
    pub p_loss: f64,
    pub cost: f64,
    pub t_eff: f64,
    /// `(|b(t_i)| + |a(t_f)|)/scale`; nonzero only for truncated schedules.
    pub boundary_residual: f64,
    pub analytic_loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagateOptions {
    pub steps: usize,
    /// Record every `stride`-th step; the first and last steps are always kept.
    pub stride: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            steps: 200_000,
            stride: 100,
        }
    }
}

impl PropagateOptions {
    pub fn with_steps(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }
}

fn sample_at<C: Coupling + ?Sized>(
    schedule: &C,
    inst: &SearchInstance,
    t: f64,
    state: &TwoLevelState,
) -> Result<TrajectorySample> {
    let point = schedule.point(t);
    let eig = eigensystem(&point, inst)?;
    let (p_u, p_m) = state.populations();
    let (p_plus, p_minus) = state.eigen_populations(&eig);
    Ok(TrajectorySample {
        t,
        a: point.a,
        b: point.b,
        lambda_plus: eig.lambda_plus,
        lambda_minus: eig.lambda_minus,
        theta: eig.theta,
        theta_dot: theta_dot(&point, inst)?,
        p_u,
        p_m,
        p_plus,
        p_minus,
        norm: state.norm(),
    })
}

/// Integrate the reduced dynamics from `|w⟩` across the schedule window.
pub fn propagate<C: Coupling + ?Sized>(
    schedule: &C,
    inst: &SearchInstance,
    opts: PropagateOptions,
) -> Result<(Trajectory, RunResult)> {
    if opts.steps < MIN_STEPS {
        return Err(Error::param(
            "steps",
            format!("need at least {MIN_STEPS}, got {}", opts.steps),
        ));
    }
    let stride = opts.stride.max(1);
    let (ti, tf) = schedule.window();
    let dt = (tf - ti) / opts.steps as f64;

    let mut state = TwoLevelState::uniform(inst);
    let mut trajectory = Trajectory {
        samples: Vec::with_capacity(opts.steps / stride + 2),
    };
    trajectory
        .samples
        .push(sample_at(schedule, inst, ti, &state)?);

    for k in 0..opts.steps {
        let t_mid = ti + (k as f64 + 0.5) * dt;
        let point = schedule.point(t_mid);
        if point.a == 0.0 && point.b == 0.0 {
            return Err(Error::DegeneratePoint { a: 0.0, b: 0.0 });
        }
        let h = reduced_hamiltonian(&point, inst);
        state.evolve(h.mean, h.delta, h.omega, dt);

        let done = k + 1;
        let t = if done == opts.steps {
            tf
        } else {
            ti + done as f64 * dt
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > REDUCED_NORM_TOL {
            return Err(Error::NonUnit { norm, t });
        }
        if done % stride == 0 || done == opts.steps {
            trajectory
                .samples
                .push(sample_at(schedule, inst, t, &state)?);
        }
    }

    let last = *trajectory
        .last()
        .expect("trajectory holds at least the initial sample");
    let report = cost(schedule);
    let result = RunResult {
        p_m_final: last.p_m,
        p_loss: (1.0 - last.p_plus).clamp(0.0, 1.0),
        cost: report.cost,
        t_eff: report.t_eff,
        boundary_residual: schedule.boundary_residual(),
        analytic_loss: schedule.analytic_loss(),
        notes: Vec::new(),
    };
    Ok((trajectory, result))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullRunResult {
    pub p_m_final: f64,
    pub norm_drift: f64,
}

/// `H·ψ` for `H = a|w⟩⟨w| + b|m⟩⟨m|`, written into `out`.
fn apply_full(a: f64, b: f64, marked: usize, psi: &[Complex64], out: &mut [Complex64]) {
    let n = psi.len() as f64;
    let projected = psi.iter().sum::<Complex64>() * (a / n);
    out.fill(projected);
    out[marked] += psi[marked] * b;
}

/// Brute-force oracle: fourth-order Runge–Kutta in the full computational basis.
pub fn propagate_full<C: Coupling + ?Sized>(
    schedule: &C,
    inst: &SearchInstance,
    steps: usize,
    cap: usize,
) -> Result<FullRunResult> {
    if inst.n() > cap as u64 {
        return Err(Error::OracleSizeExceeded { n: inst.n(), cap });
    }
    if steps < MIN_STEPS {
        return Err(Error::param(
            "steps",
            format!("need at least {MIN_STEPS}, got {steps}"),
        ));
    }
    let dim = inst.n() as usize;
    let marked = inst.marked() as usize;
    let (ti, tf) = schedule.window();
    let dt = (tf - ti) / steps as f64;
    let minus_i = Complex64::new(0.0, -1.0);

    let mut psi = vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim];
    let mut stage = vec![Complex64::default(); dim];
    let mut scratch = vec![Complex64::default(); dim];
    let mut acc = vec![Complex64::default(); dim];

    // k = −i·H(t)·y, accumulated into `acc` with the RK4 weights
    let derivative = |t: f64, y: &[Complex64], out: &mut [Complex64]| {
        let p = schedule.point(t);
        apply_full(p.a, p.b, marked, y, out);
        out.iter_mut().for_each(|v| *v *= minus_i);
    };

    for k in 0..steps {
        let t = ti + k as f64 * dt;
        derivative(t, &psi, &mut stage);
        acc.copy_from_slice(&stage);

        // k2 and k3 both sit at the half step
        for _ in 0..2 {
            for ((s, &y), &kv) in scratch.iter_mut().zip(&psi).zip(stage.iter()) {
                *s = y + kv * (0.5 * dt);
            }
            derivative(t + 0.5 * dt, &scratch, &mut stage);
            for (a, &kv) in acc.iter_mut().zip(stage.iter()) {
                *a += kv * 2.0;
            }
        }

        for ((s, &y), &kv) in scratch.iter_mut().zip(&psi).zip(stage.iter()) {
            *s = y + kv * dt;
        }
        derivative(t + dt, &scratch, &mut stage);
        for ((y, &a), &kv) in psi.iter_mut().zip(acc.iter()).zip(stage.iter()) {
            *y += (a + kv) * (dt / 6.0);
        }
    }

    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let norm_drift = (norm - 1.0).abs();
    if norm_drift > FULL_NORM_TOL {
        return Err(Error::NonUnit { norm, t: tf });
    }
    Ok(FullRunResult {
        p_m_final: psi[marked].norm_sqr(),
        norm_drift,
    })
}

/// Population of `|−⟩` under the local schedule at rescaled time
/// `τ = ∫(λ₊−λ₋)/2 dt`: `ε²/(1+ε²) · sin²(√(1+ε²)·τ)`.
pub fn local_analytic_state(tau: f64, epsilon: f64) -> f64 {
    let e2 = epsilon * epsilon;
    e2 / (1.0 + e2) * ((1.0 + e2).sqrt() * tau).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingPoint;
    use crate::schedule::{linear_schedule, local_schedule, parallel_schedule, Shape};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    struct Constant {
        a: f64,
        b: f64,
        duration: f64,
    }

    impl Coupling for Constant {
        fn window(&self) -> (f64, f64) {
            (0.0, self.duration)
        }
        fn point(&self, _: f64) -> CouplingPoint {
            CouplingPoint::stationary(self.a, self.b)
        }
        fn scale(&self) -> f64 {
            1.0
        }
    }

    fn inst(n: u64, m: u64) -> SearchInstance {
        SearchInstance::new(n, m).unwrap()
    }

    #[test]
    fn evolve_matches_dense_exponential() {
        // compare with a Taylor series of exp(−iHdt) summed to convergence
        let (mean, delta, omega, dt) = (0.3, -0.7, 0.45, 0.9);
        let h = [[mean + delta, omega], [omega, mean - delta]];
        let mut term = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut sum = term;
        for k in 1..60 {
            let next = [
                (term[0] * h[0][0] + term[1] * h[0][1]) * Complex64::new(0.0, -dt / k as f64),
                (term[0] * h[1][0] + term[1] * h[1][1]) * Complex64::new(0.0, -dt / k as f64),
            ];
            term = next;
            sum[0] += term[0];
            sum[1] += term[1];
        }
        let mut s = TwoLevelState::basis_u();
        s.evolve(mean, delta, omega, dt);
        assert!((s.c_u - sum[0]).norm() < 1e-14);
        assert!((s.c_m - sum[1]).norm() < 1e-14);
    }

    #[test]
    fn uniform_state_is_stationary_without_b() {
        let i = inst(20, 3);
        let c = Constant {
            a: 0.8,
            b: 0.0,
            duration: 50.0,
        };
        let (traj, res) = propagate(
            &c,
            &i,
            PropagateOptions {
                steps: 5000,
                stride: 50,
            },
        )
        .unwrap();
        for s in &traj.samples {
            assert!((s.p_plus - 1.0).abs() < 1e-12);
        }
        assert!(res.p_loss < 1e-12);
        assert_relative_eq!(res.p_m_final, 1.0 / 20.0, epsilon = 1e-12);

        let full = propagate_full(&c, &i, 5000, 512).unwrap();
        assert_relative_eq!(full.p_m_final, 1.0 / 20.0, epsilon = 1e-12);
    }

    #[test]
    fn trajectory_bookkeeping() {
        let i = inst(20, 0);
        let s = local_schedule(1.0, 0.2, &i).unwrap();
        let (traj, _) = propagate(
            &s,
            &i,
            PropagateOptions {
                steps: 1000,
                stride: 300,
            },
        )
        .unwrap();
        // 0, 300, 600, 900, 1000
        assert_eq!(traj.len(), 5);
        assert_eq!(traj.samples[0].t, 0.0);
        assert_eq!(traj.last().unwrap().t, s.window().1);
        assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t));
        for x in &traj.samples {
            assert!((x.p_u + x.p_m - x.norm * x.norm).abs() < 1e-12);
            assert!((x.norm - 1.0).abs() < 1e-12);
        }
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TRAJECTORY_HEADER);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 12);
        assert_eq!(first[1], "1.00000000000e0");
    }

    #[test]
    fn rejects_too_few_steps_and_large_oracles() {
        let i = inst(20, 0);
        let s = local_schedule(1.0, 0.2, &i).unwrap();
        assert!(propagate(&s, &i, PropagateOptions::with_steps(999)).is_err());
        let big = inst(1000, 0);
        let s = local_schedule(1.0, 0.2, &big).unwrap();
        assert_eq!(
            propagate_full(&s, &big, 2000, 512),
            Err(Error::OracleSizeExceeded { n: 1000, cap: 512 })
        );
    }

    #[test]
    fn degenerate_schedule_fails() {
        let c = Constant {
            a: 0.0,
            b: 0.0,
            duration: 1.0,
        };
        assert!(matches!(
            propagate(&c, &inst(4, 0), PropagateOptions::with_steps(1000)),
            Err(Error::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn oracle_agrees_on_small_instance() {
        let i = inst(4, 2);
        let s = local_schedule(1.0, 0.2, &i).unwrap();
        let (_, reduced) = propagate(&s, &i, PropagateOptions::default()).unwrap();
        let full = propagate_full(&s, &i, 200_000, 512).unwrap();
        assert!((reduced.p_m_final - full.p_m_final).abs() < 1e-8);
    }

    #[test]
    fn marked_index_does_not_matter() {
        let s = |i: &SearchInstance| parallel_schedule(1.0, 3.0, 8.0, Shape::Tanh, i).unwrap();
        let base = inst(16, 0);
        let (_, r0) = propagate(&s(&base), &base, PropagateOptions::with_steps(20_000)).unwrap();
        for m in [5, 15] {
            let i = inst(16, m);
            let (_, r) = propagate(&s(&i), &i, PropagateOptions::with_steps(20_000)).unwrap();
            assert!((r.p_m_final - r0.p_m_final).abs() <= 1e-12);
        }
    }

    #[test]
    fn linear_schedule_respects_budget() {
        let i = inst(20, 0);
        let eps = 1.0 / 11.0;
        let s = linear_schedule(1.0, 440.0, &i).unwrap();
        let (_, r) = propagate(&s, &i, PropagateOptions::default()).unwrap();
        assert!(r.p_loss < eps * eps, "loss {}", r.p_loss);
        assert!((r.p_loss - (1.0 - r.p_m_final)).abs() < 1e-9);
    }

    #[test]
    fn analytic_state_examples() {
        assert_eq!(local_analytic_state(0.0, 0.3), 0.0);
        let eps = 0.3f64;
        assert!(local_analytic_state(PI / (1.0 + eps * eps).sqrt(), eps) < 1e-30);
        let tau = 19f64.sqrt().atan() * 11.0;
        assert_relative_eq!(
            local_analytic_state(tau, 1.0 / 11.0),
            4.616_88e-3,
            epsilon = 1e-8
        );
    }
}
