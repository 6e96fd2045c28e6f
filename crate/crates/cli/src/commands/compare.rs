use adiasearch::{
    equal_cost_parallel_duration, local_schedule, parallel_schedule, propagate, PropagateOptions,
    RunResult, SearchInstance, Shape,
};
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Local schedule against the parallel schedule of equal cost, both at unit
/// coupling scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub n: u64,
    pub epsilon: f64,
    pub r: f64,
    /// `T∥` from `βrT∥ = 2(n−1)√n/((n−2)ε)` with `β = 1`.
    pub t_parallel: f64,
    /// `√n/T∥` of the matched parallel schedule.
    pub gamma: f64,
    pub local: RunResult,
    pub parallel: RunResult,
    /// Parallel cost over local cost.
    pub cost_ratio: f64,
    /// Parallel loss over local loss.
    pub loss_ratio: f64,
}

pub fn compare(epsilon: f64, r: f64, n: u64, shape: Shape, steps: usize) -> Result<CompareReport> {
    let inst = SearchInstance::new(n, 0)?;
    let t_parallel = equal_cost_parallel_duration(epsilon, r, 1.0, n)?;
    let local = local_schedule(1.0, epsilon, &inst)?;
    let parallel = parallel_schedule(1.0, t_parallel, r, shape, &inst)?;
    let opts = PropagateOptions {
        steps,
        stride: steps,
    };
    let (_, local_run) = propagate(&local, &inst, opts)?;
    let (_, parallel_run) = propagate(&parallel, &inst, opts)?;
    Ok(CompareReport {
        n,
        epsilon,
        r,
        t_parallel,
        gamma: parallel.gamma().unwrap_or(f64::NAN),
        cost_ratio: parallel_run.cost / local_run.cost,
        loss_ratio: parallel_run.p_loss / local_run.p_loss,
        local: local_run,
        parallel: parallel_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CliError;

    #[test]
    fn n2_is_refused() {
        let err = compare(1.0 / 11.0, 12.0, 2, Shape::Tanh, 10_000).unwrap_err();
        assert!(matches!(
            err,
            CliError::Core(adiasearch::Error::ExactDegenerateN)
        ));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn fig4_point() {
        let report = compare(1.0 / 11.0, 12.0, 20, Shape::Tanh, 50_000).unwrap();
        assert!(report.loss_ratio < 0.1);
        assert!((report.local.cost - 2.0 * 19f64.sqrt() * 11.0).abs() < 1e-6);
        assert!(report.parallel.boundary_residual > 0.0);
    }
}
