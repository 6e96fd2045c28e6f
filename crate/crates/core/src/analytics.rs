//! Closed-form and asymptotic loss formulas, cost bounds and the global
//! adiabaticity diagnostic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{eigensystem, theta_dot, SearchInstance};
use crate::numeric::{linspace, sampled_max, sampled_min};
use crate::schedule::Coupling;

/// A loss estimate with its regime of validity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossPrediction {
    pub exact: Option<f64>,
    pub asymptotic: f64,
    pub regime_note: String,
}

/// Final loss of the local schedule, exact for every `n`:
/// `ε²/(1+ε²) · sin²(√(1+ε²)/ε · arctan√(n−1))`.
pub fn local_loss_exact(epsilon: f64, n: u64) -> f64 {
    let e2 = epsilon * epsilon;
    let phase = (1.0 + e2).sqrt() / epsilon * ((n - 1) as f64).sqrt().atan();
    e2 / (1.0 + e2) * phase.sin().powi(2)
}

/// Large-n, small-ε limit `ε² sin²(π/(2ε))`.
pub fn local_loss_asymptotic(epsilon: f64) -> f64 {
    epsilon * epsilon * (PI / (2.0 * epsilon)).sin().powi(2)
}

/// Upper envelope `ε²` of the local loss.
pub fn local_loss_envelope(epsilon: f64) -> f64 {
    epsilon * epsilon
}

/// Rescaled time `τ(t_f) = arctan(√(n−1))/ε` accumulated by the local schedule.
pub fn local_final_tau(epsilon: f64, n: u64) -> f64 {
    ((n - 1) as f64).sqrt().atan() / epsilon
}

/// Whether `ε = 1/(2p)` for a positive integer `p`.
pub fn is_fine_tuned_epsilon(epsilon: f64) -> bool {
    let p = 0.5 / epsilon;
    p >= 0.5 && (p - p.round()).abs() < 1e-9 * p.max(1.0)
}

pub fn local_loss(epsilon: f64, n: u64) -> LossPrediction {
    let regime_note = if is_fine_tuned_epsilon(epsilon) {
        "large-N; fine-tuned epsilon=1/(2p), non-robust"
    } else {
        "large-N, small-epsilon"
    };
    LossPrediction {
        exact: Some(local_loss_exact(epsilon, n)),
        asymptotic: local_loss_asymptotic(epsilon),
        regime_note: regime_note.to_owned(),
    }
}

fn sech2(x: f64) -> f64 {
    let s = 1.0 / x.cosh();
    s * s
}

/// Large-n loss of the untruncated tanh parallel schedule, `sech²(πT∥β/√n)`.
pub fn parallel_loss_asymptotic(beta: f64, t_par: f64, n: u64) -> f64 {
    sech2(PI * t_par * beta / (n as f64).sqrt())
}

/// The two equivalent large-n parallel loss forms in terms of `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelLossForms {
    /// `sech²(π/γ)`
    pub sech2: f64,
    /// `4·exp(−2π/γ)`
    pub exp_form: f64,
    pub gamma: f64,
}

impl ParallelLossForms {
    /// The search is efficient for `1/γ ≥ 1`; beyond that the formula is
    /// outside the adiabatic regime.
    pub fn is_adiabatic(&self) -> bool {
        self.gamma <= 1.0
    }
}

pub fn parallel_loss_gamma(gamma: f64) -> ParallelLossForms {
    ParallelLossForms {
        sech2: sech2(PI / gamma),
        exp_form: 4.0 * (-2.0 * PI / gamma).exp(),
        gamma,
    }
}

pub fn parallel_loss(beta: f64, t_par: f64, n: u64) -> LossPrediction {
    let gamma = (n as f64).sqrt() / (beta * t_par);
    let regime_note = if gamma <= 1.0 {
        "large-N"
    } else {
        "large-N; non-adiabatic gamma > 1"
    };
    LossPrediction {
        exact: None,
        asymptotic: parallel_loss_asymptotic(beta, t_par, n),
        regime_note: regime_note.to_owned(),
    }
}

/// Minimum `αT_linear` for the linear schedule to stay adiabatic: `2n/ε`.
pub fn linear_cost_bound(epsilon: f64, n: u64) -> f64 {
    2.0 * n as f64 / epsilon
}

/// Outcome of the global adiabaticity condition `max θ̇ < ε·min(λ₊−λ₋)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityReport {
    pub holds: bool,
    pub max_theta_dot: f64,
    pub min_gap: f64,
    /// `max θ̇ / (ε·min gap/2)`; the condition holds when below 1.
    pub global_ratio: f64,
    /// `max_t θ̇(t) / (ε·gap(t)/2)`, the pointwise version (1 for the local schedule).
    pub pointwise_ratio: f64,
}

pub fn adiabaticity_check<C: Coupling + ?Sized>(
    schedule: &C,
    inst: &SearchInstance,
    epsilon: f64,
    samples: usize,
) -> Result<AdiabaticityReport> {
    if samples < 1000 {
        return Err(Error::param(
            "samples",
            format!("need at least 1000, got {samples}"),
        ));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::param(
            "epsilon",
            format!("must be positive, got {epsilon}"),
        ));
    }
    let (ti, tf) = schedule.window();
    // Surface degenerate points before handing infallible closures to the optimizers.
    for t in linspace(ti, tf, samples) {
        eigensystem(&schedule.point(t), inst)?;
    }
    let rate = |t: f64| theta_dot(&schedule.point(t), inst).map_or(f64::INFINITY, f64::abs);
    let gap = |t: f64| eigensystem(&schedule.point(t), inst).map_or(0.0, |e| e.gap);

    let (_, max_theta_dot) = sampled_max(rate, ti, tf, samples);
    let (_, min_gap) = sampled_min(gap, ti, tf, samples);
    let (_, pointwise_ratio) = sampled_max(|t| rate(t) / (0.5 * epsilon * gap(t)), ti, tf, samples);
    let global_ratio = max_theta_dot / (0.5 * epsilon * min_gap);
    Ok(AdiabaticityReport {
        holds: global_ratio < 1.0,
        max_theta_dot,
        min_gap,
        global_ratio,
        pointwise_ratio,
    })
}
