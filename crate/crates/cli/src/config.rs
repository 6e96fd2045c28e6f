//! Run and sweep configuration: the JSON/flag surface and its resolution
//! into a concrete schedule.

use std::path::PathBuf;

use adiasearch::analytics::linear_cost_bound;
use adiasearch::{
    equal_cost_gamma, linear_schedule, local_schedule, parallel_schedule, Schedule, SearchInstance,
    Shape, Strategy,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_R: f64 = 8.0;
pub const DEFAULT_STEPS: usize = 200_000;

fn default_r() -> f64 {
    DEFAULT_R
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

/// One propagation. `alpha` applies to linear and local runs, `beta` to
/// parallel ones; both default to 1.
///
/// The duration is fixed by the first applicable field:
/// * linear: `T`, else the adiabatic bound `2n/(αε)` from `epsilon`;
/// * local: always derived from `epsilon`;
/// * parallel: `T`, else `√n/(βγ)` from `gamma`, else the equal-cost `γ = εr/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub n: u64,
    #[serde(default)]
    pub marked: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub shape: Shape,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(strategy: Strategy, n: u64) -> Self {
        Self {
            strategy,
            n,
            marked: 0,
            alpha: None,
            beta: None,
            epsilon: None,
            t: None,
            gamma: None,
            r: DEFAULT_R,
            shape: Shape::default(),
            steps: DEFAULT_STEPS,
            output: None,
            seed: 0,
        }
    }

    pub fn instance(&self) -> Result<SearchInstance> {
        Ok(SearchInstance::new(self.n, self.marked)?)
    }

    /// Check field consistency and build the schedule.
    pub fn schedule(&self, inst: &SearchInstance) -> Result<Schedule> {
        let reject = |present: bool, field: &str| -> Result<()> {
            if present {
                Err(CliError::config(format!(
                    "`{field}` does not apply to the {} strategy",
                    self.strategy
                )))
            } else {
                Ok(())
            }
        };
        match self.strategy {
            Strategy::Linear => {
                reject(self.beta.is_some(), "beta")?;
                reject(self.gamma.is_some(), "gamma")?;
                let alpha = self.alpha.unwrap_or(1.0);
                let schedule = match (self.t, self.epsilon) {
                    (Some(t), _) => linear_schedule(alpha, t, inst)?,
                    (None, Some(eps)) => {
                        linear_schedule(alpha, linear_cost_bound(eps, inst.n()) / alpha, inst)?
                    }
                    (None, None) => {
                        return Err(CliError::config("linear strategy needs `T` or `epsilon`"))
                    }
                };
                match self.epsilon {
                    Some(eps) => Ok(schedule.with_epsilon(eps)?),
                    None => Ok(schedule),
                }
            }
            Strategy::Local => {
                reject(self.beta.is_some(), "beta")?;
                reject(self.gamma.is_some(), "gamma")?;
                reject(self.t.is_some(), "T")?;
                let eps = self
                    .epsilon
                    .ok_or_else(|| CliError::config("local strategy needs `epsilon`"))?;
                Ok(local_schedule(self.alpha.unwrap_or(1.0), eps, inst)?)
            }
            Strategy::Parallel => {
                reject(self.alpha.is_some(), "alpha")?;
                let beta = self.beta.unwrap_or(1.0);
                let given = [
                    self.t.is_some(),
                    self.gamma.is_some(),
                    self.epsilon.is_some(),
                ];
                if given.iter().filter(|&&g| g).count() > 1 {
                    return Err(CliError::config(
                        "parallel strategy takes exactly one of `T`, `gamma`, `epsilon`",
                    ));
                }
                let gamma = self
                    .gamma
                    .or(self.epsilon.map(|eps| equal_cost_gamma(eps, self.r)));
                let t_par = match (self.t, gamma) {
                    (Some(t), _) => t,
                    (None, Some(g)) if g.is_finite() && g > 0.0 => {
                        (inst.n() as f64).sqrt() / (beta * g)
                    }
                    (None, Some(g)) => {
                        return Err(CliError::config(format!(
                            "`gamma` must be finite and positive, got {g}"
                        )))
                    }
                    (None, None) => {
                        return Err(CliError::config(
                            "parallel strategy needs `T`, `gamma` or `epsilon`",
                        ))
                    }
                };
                Ok(parallel_schedule(beta, t_par, self.r, self.shape, inst)?)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let inst = self.instance()?;
        self.schedule(&inst).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// `1/γ` of a parallel schedule.
    InvGamma,
    /// Database size.
    N,
    Epsilon,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::InvGamma => "inv_gamma",
            SweepVariable::N => "n",
            SweepVariable::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub fixed: RunConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(CliError::config("sweep `values` is empty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("sweep `values` must be finite"));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config(
                "sweep `values` must be strictly increasing",
            ));
        }
        if self.variable == SweepVariable::InvGamma && self.fixed.strategy != Strategy::Parallel {
            return Err(CliError::config(
                "sweeping `inv_gamma` needs the parallel strategy",
            ));
        }
        if self.variable == SweepVariable::N
            && self.values.iter().any(|&v| v.fract() != 0.0 || v < 2.0)
        {
            return Err(CliError::config(
                "sweep values for `n` must be integers >= 2",
            ));
        }
        Ok(())
    }

    /// The run configuration at sweep value `x`.
    pub fn point(&self, x: f64) -> RunConfig {
        let mut cfg = self.fixed.clone();
        match self.variable {
            SweepVariable::InvGamma => {
                cfg.gamma = Some(1.0 / x);
                cfg.t = None;
                cfg.epsilon = None;
            }
            SweepVariable::N => cfg.n = x as u64,
            SweepVariable::Epsilon => {
                cfg.epsilon = Some(x);
                if cfg.strategy != Strategy::Local {
                    cfg.t = None;
                    cfg.gamma = None;
                }
            }
        }
        cfg
    }
}

/// Default `n` grid: 40 log-spaced sizes in `[10, 1000]`, rounded and deduplicated.
pub fn default_n_values() -> Vec<f64> {
    let mut values: Vec<f64> = adiasearch::numeric::logspace(10.0, 1000.0, 40)
        .into_iter()
        .map(f64::round)
        .collect();
    values.dedup();
    values
}
