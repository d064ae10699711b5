//! Runs a validated scenario through either route and renders the outputs.

use std::fmt::Write as _;

use optojc_core::evolution::{AnalyticPlan, AnalyticRun, ObservableKind, ObservableSet};
use optojc_core::model::{validate_scenario, Scenario, ValidatedScenario};
use optojc_core::oracle::{observables_numeric, propagate, OracleOptions, PropagationRun};
use rayon::prelude::*;

use crate::compare::{ComparisonReport, Thresholds};
use crate::config::Mode;
use crate::error::{HarnessError, Result};

pub fn validate(s: &Scenario) -> Result<ValidatedScenario> {
    let vs = validate_scenario(s).map_err(|e| HarnessError::core("validation", e))?;
    for w in vs.warnings() {
        log::warn!("{}: {w}", vs.label());
    }
    Ok(vs)
}

/// Analytic route with the dressing and every ladder solved concurrently.
pub fn solve_analytic(vs: &ValidatedScenario) -> Result<AnalyticRun> {
    let err = |e| HarnessError::core("dressing", e);
    let plan = AnalyticPlan::new(vs).map_err(err)?;
    let ms = plan.required_ladders();
    let (dressing, ladders) = rayon::join(
        || plan.solve_dressing(),
        || {
            ms.par_iter()
                .map(|&m| plan.solve_ladder(m))
                .collect::<Result<Vec<_>, _>>()
        },
    );
    let (dressing, ladders) = (dressing.map_err(err)?, ladders.map_err(err)?);
    plan.finish(dressing, ladders)
        .map_err(|e| HarnessError::core("analytic-evolution", e))
}

pub fn analytic_observables(vs: &ValidatedScenario) -> Result<(AnalyticRun, ObservableSet)> {
    let run = solve_analytic(vs)?;
    let obs = run
        .observables()
        .map_err(|e| HarnessError::core("analytic-evolution", e))?;
    Ok((run, obs))
}

pub fn numeric_observables(
    vs: &ValidatedScenario,
    opts: OracleOptions,
) -> Result<(PropagationRun, ObservableSet)> {
    let run = propagate(vs, opts).map_err(|e| HarnessError::core("oracle-evolution", e))?;
    let obs = observables_numeric(&run).map_err(|e| HarnessError::core("oracle-evolution", e))?;
    Ok((run, obs))
}

/// Files produced by one run, keyed by suffix (e.g. `pe.csv`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub report: Option<ComparisonReport>,
}

/// 17 significant digits, round-trip exact.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn single_csv(times: &[f64], values: &[f64]) -> String {
    let mut s = String::with_capacity(48 * times.len() + 8);
    s.push_str("t,value\n");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(s, "{},{}", fmt_value(*t), fmt_value(*v));
    }
    s
}

pub fn compare_csv(times: &[f64], a: &[f64], b: &[f64]) -> String {
    let mut s = String::with_capacity(100 * times.len() + 32);
    s.push_str("t,analytic,numeric,abs_err\n");
    for ((t, x), y) in times.iter().zip(a).zip(b) {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_value(*t),
            fmt_value(*x),
            fmt_value(*y),
            fmt_value((x - y).abs())
        );
    }
    s
}

fn csv_name(kind: ObservableKind) -> String {
    format!("{}.csv", kind.name())
}

fn single_files(obs: &ObservableSet) -> Vec<(String, String)> {
    obs.series()
        .map(|s| (csv_name(s.kind), single_csv(&s.times, &s.values)))
        .collect()
}

/// Runs `mode` on a scenario and renders every output file in memory.
pub fn execute(s: &Scenario, mode: Mode, thresholds: &Thresholds) -> Result<RunOutput> {
    let vs = validate(s)?;
    match mode {
        Mode::Analytic => {
            let (_, obs) = analytic_observables(&vs)?;
            Ok(RunOutput {
                files: single_files(&obs),
                report: None,
            })
        }
        Mode::Numeric => {
            let (_, obs) = numeric_observables(&vs, OracleOptions::default())?;
            Ok(RunOutput {
                files: single_files(&obs),
                report: None,
            })
        }
        Mode::Compare => {
            // Analytic first: it is cheap and fails fast.
            let (arun, a) = analytic_observables(&vs)?;
            let (nrun, n) = numeric_observables(&vs, OracleOptions::default())?;
            let mut report = ComparisonReport::build(vs.label(), &a, &n, thresholds)
                .map_err(|e| HarnessError::core("harness-cli", e))?;
            report.notes.push(format!(
                "oracle norm drift {:.3e} at dt {}",
                nrun.norm_drift, nrun.dt
            ));
            report.notes.push(format!(
                "truncation: cavity {} mirror {}; analytic ladder samples from direct propagator: {}",
                nrun.trunc.n_cav,
                nrun.trunc.n_mech,
                arun.singular_samples()
            ));
            let mut files = Vec::new();
            for kind in ObservableKind::ALL {
                if let (Some(x), Some(y)) = (a.get(kind), n.get(kind)) {
                    files.push((csv_name(kind), compare_csv(&x.times, &x.values, &y.values)));
                }
            }
            files.push(("report.txt".to_string(), report.render()));
            Ok(RunOutput {
                files,
                report: Some(report),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_format_round_trips() {
        for x in [
            0.0,
            1.0,
            -0.1,
            4.000000000000001,
            1e-300,
            std::f64::consts::PI,
        ] {
            let s = fmt_value(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_value(4.0), "4.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let s = single_csv(&[0.0, 0.5], &[1.0, 2.0]);
        assert_eq!(s, "t,value\n0.0000000000000000e0,1.0000000000000000e0\n5.0000000000000000e-1,2.0000000000000000e0\n");
        let c = compare_csv(&[0.0], &[1.0], &[1.25]);
        assert!(c.starts_with("t,analytic,numeric,abs_err\n"));
        assert!(c.ends_with(",2.5000000000000000e-1\n"));
    }
}
