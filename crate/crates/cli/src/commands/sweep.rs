use std::io::Write;

use adiasearch::analytics::{local_loss_asymptotic, local_loss_exact, parallel_loss_gamma};
use adiasearch::propagator::format_sig12;
use adiasearch::{propagate, PropagateOptions, Schedule, Shape, Strategy};
use rayon::prelude::*;

use crate::config::SweepSpec;
use crate::error::Result;

pub const SWEEP_HEADER: [&str; 6] = [
    "x",
    "loss_numeric",
    "loss_analytic_exact",
    "loss_analytic_asymptotic",
    "cost",
    "error",
];

/// One sweep point. Failed points carry only `x` and `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub loss_numeric: Option<f64>,
    pub loss_analytic_exact: Option<f64>,
    pub loss_analytic_asymptotic: Option<f64>,
    pub cost: Option<f64>,
    pub error: Option<String>,
}

/// Closed-form `(exact, asymptotic)` losses where the strategy has them.
pub fn analytic_losses(schedule: &Schedule) -> (Option<f64>, Option<f64>) {
    match (schedule.strategy(), schedule.epsilon(), schedule.gamma()) {
        (Strategy::Local, Some(eps), _) => (
            Some(local_loss_exact(eps, schedule.n())),
            Some(local_loss_asymptotic(eps)),
        ),
        (Strategy::Parallel, _, Some(gamma)) if schedule.shape() == Shape::Tanh => {
            let forms = parallel_loss_gamma(gamma);
            (Some(forms.sech2), Some(forms.exp_form))
        }
        _ => (None, None),
    }
}

fn evaluate(spec: &SweepSpec, x: f64) -> SweepRow {
    let attempt = || -> Result<SweepRow> {
        let cfg = spec.point(x);
        let inst = cfg.instance()?;
        let schedule = cfg.schedule(&inst)?;
        let (_, result) = propagate(
            &schedule,
            &inst,
            PropagateOptions {
                steps: cfg.steps,
                stride: cfg.steps,
            },
        )?;
        let (exact, asymptotic) = analytic_losses(&schedule);
        Ok(SweepRow {
            x,
            loss_numeric: Some(result.p_loss),
            loss_analytic_exact: exact,
            loss_analytic_asymptotic: asymptotic,
            cost: Some(result.cost),
            error: None,
        })
    };
    attempt().unwrap_or_else(|e| SweepRow {
        x,
        loss_numeric: None,
        loss_analytic_exact: None,
        loss_analytic_asymptotic: None,
        cost: None,
        error: Some(e.to_string()),
    })
}

/// Evaluate every sweep point concurrently; rows come back in `x` order.
/// `threads = None` uses the global pool.
pub fn sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let job = || spec.values.par_iter().map(|&x| evaluate(spec, x)).collect();
    match threads {
        None => Ok(job()),
        Some(count) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build()
                .map_err(|e| crate::error::CliError::config(format!("threads: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SWEEP_HEADER)?;
    let cell = |v: Option<f64>| v.map(format_sig12).unwrap_or_default();
    for row in rows {
        writer.write_record([
            format_sig12(row.x),
            cell(row.loss_numeric),
            cell(row.loss_analytic_exact),
            cell(row.loss_analytic_asymptotic),
            cell(row.cost),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{RunConfig, SweepVariable};

    #[test]
    fn failing_point_does_not_abort() {
        let mut fixed = RunConfig::new(Strategy::Local, 20);
        fixed.marked = 15;
        fixed.epsilon = Some(0.2);
        fixed.steps = 5_000;
        let spec = SweepSpec {
            variable: SweepVariable::N,
            values: vec![10.0, 20.0],
            fixed,
        };
        let rows = sweep(&spec, Some(2)).unwrap();
        assert!(rows[0]
            .error
            .as_deref()
            .unwrap()
            .contains("invalid search instance"));
        assert!(rows[1].error.is_none());
        assert!(rows[1].loss_numeric.is_some());

        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "x,loss_numeric,loss_analytic_exact,loss_analytic_asymptotic,cost,error"
        );
        assert!(lines.next().unwrap().starts_with("1.00000000000e1,,,,,"));
    }

    #[test]
    fn analytic_columns_follow_strategy() {
        let inst = adiasearch::SearchInstance::new(20, 0).unwrap();
        let local = adiasearch::local_schedule(1.0, 1.0 / 11.0, &inst).unwrap();
        let (exact, asym) = analytic_losses(&local);
        assert!((exact.unwrap() - 4.616_88e-3).abs() < 1e-8);
        assert!((asym.unwrap() - 1.0 / 121.0).abs() < 1e-12);

        let par =
            adiasearch::parallel_schedule(1.0, 20f64.sqrt(), 12.0, Shape::Tanh, &inst).unwrap();
        let (exact, asym) = analytic_losses(&par);
        assert!((exact.unwrap() - 7.44e-3).abs() < 1e-5);
        assert!((asym.unwrap() - 7.47e-3).abs() < 1e-5);

        let lin = adiasearch::linear_schedule(1.0, 440.0, &inst).unwrap();
        assert_eq!(analytic_losses(&lin), (None, None));
    }
}
