use std::path::Path;

use adiasearch::{
    propagate, Coupling, PropagateOptions, RunResult, Schedule, Shape, Strategy, Trajectory,
};

use super::{to_json, write_file};
use crate::config::RunConfig;
use crate::error::Result;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const RESULT_FILE: &str = "result.json";

/// Rows kept in the trajectory CSV for a default-resolution run.
const TRAJECTORY_ROWS: usize = 2000;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub schedule: Schedule,
    pub trajectory: Trajectory,
    pub result: RunResult,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let inst = cfg.instance()?;
    let schedule = cfg.schedule(&inst)?;
    let opts = PropagateOptions {
        steps: cfg.steps,
        stride: (cfg.steps / TRAJECTORY_ROWS).max(1),
    };
    let (trajectory, mut result) = propagate(&schedule, &inst, opts)?;
    result.notes = notes(&schedule);
    Ok(RunOutcome {
        schedule,
        trajectory,
        result,
    })
}

fn notes(schedule: &Schedule) -> Vec<String> {
    let mut notes = Vec::new();
    if schedule.non_robust_epsilon() {
        notes.push("epsilon = 1/(2p): the vanishing loss relies on fine tuning".to_owned());
    }
    if schedule.strategy() == Strategy::Parallel {
        if schedule.gamma().is_some_and(|g| g > 1.0) {
            notes.push("gamma > 1: outside the adiabatic regime".to_owned());
        }
        if schedule.shape() == Shape::Erf {
            notes.push("no closed-form loss for the erf shape".to_owned());
        }
        if schedule.boundary_residual() > 1e-6 {
            notes.push("truncated window: couplings do not reach their end values".to_owned());
        }
    }
    notes
}

/// Write `trajectory.csv` and `result.json` into `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    write_file(&dir.join(TRAJECTORY_FILE), |out| {
        outcome.trajectory.write_csv(out)
    })?;
    let json = to_json(&outcome.result)?;
    write_file(&dir.join(RESULT_FILE), |out| out.write_all(json.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_run_keeps_trajectory_short() {
        let mut cfg = RunConfig::new(Strategy::Parallel, 20);
        cfg.t = Some(4.7);
        let out = run(&cfg).unwrap();
        assert_eq!(out.trajectory.len(), TRAJECTORY_ROWS + 1);
        assert!((out.result.p_m_final - 0.995).abs() < 1e-3);
        assert!(out.result.notes.iter().any(|n| n.starts_with("truncated")));
    }

    #[test]
    fn fine_tuned_epsilon_is_flagged() {
        let mut cfg = RunConfig::new(Strategy::Local, 20);
        cfg.epsilon = Some(0.25);
        cfg.steps = 20_000;
        let out = run(&cfg).unwrap();
        assert_eq!(out.result.notes.len(), 1);
    }
}
