//! Running a configuration over its sweep grid and folding the results into
//! one report.

use indexmap::IndexMap;
use rayon::prelude::*;
use serde_json::Value;

use hm_lab_core::Error;

use crate::commands::{self, Outcome, Settings};
use crate::config::{Command, RunConfig, SweepParam};
use crate::report::{num, Check, Report};

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Core(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Report, RunError> {
    let settings = Settings { tol: cfg.tolerances, r: cfg.r, cc: cfg.cc };
    let values = match &cfg.sweep {
        Some(s) => s.values(),
        None => vec![f64::NAN],
    };
    let params = values
        .iter()
        .map(|&v| if cfg.sweep.is_some() { cfg.params_at(v) } else { Ok(cfg.params.clone()) })
        .collect::<Result<Vec<_>, _>>()
        .map_err(RunError::Usage)?;
    // collect keeps sweep order whatever the completion order
    let outcomes: Vec<Result<Outcome, Error>> =
        params.par_iter().map(|p| commands::run(cfg.command, p, &settings)).collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut checks = if outcomes.len() == 1 {
        outcomes[0].checks.clone()
    } else {
        worst_checks(outcomes.iter().map(|o| o.checks.as_slice()))
    };
    if cfg.command == Command::Compare && cfg.sweep.as_ref().map(|s| s.param) == Some(SweepParam::A) {
        let ratios: Vec<f64> = outcomes.iter().map(|o| o.row["ratio"].as_f64().unwrap_or(f64::NAN)).collect();
        checks.push(ratio_peak(&values, &ratios));
    }
    Ok(Report {
        params: report_params(cfg),
        results: outcomes.into_iter().map(|o| o.row).collect(),
        checks,
    })
}

fn report_params(cfg: &RunConfig) -> IndexMap<String, Value> {
    let p = &cfg.params;
    let t = &cfg.tolerances;
    let mut m = IndexMap::new();
    m.insert("command".into(), Value::from(cfg.command.name()));
    m.insert("n".into(), Value::from(p.n));
    m.insert("ell".into(), num(p.ell));
    m.insert("a".into(), num(p.a));
    m.insert("r0".into(), num(p.r0));
    m.insert("lambda".into(), Value::Array(cfg.lambda.iter().map(|&x| num(x)).collect()));
    m.insert("G".into(), num(p.g_newton));
    m.insert("sweep".into(), cfg.sweep.as_ref().map(|s| Value::from(s.spec())).unwrap_or(Value::Null));
    m.insert("tol_fd".into(), num(t.tol_fd));
    m.insert("tol_extrap".into(), num(t.tol_extrap));
    m.insert("root_tol".into(), num(t.root_tol));
    m.insert("r".into(), cfg.r.map(num).unwrap_or(Value::Null));
    m.insert("cc".into(), cfg.cc.map(num).unwrap_or(Value::Null));
    m
}

/// Per check name, the failing entry with the largest deviation if any
/// point failed, else the largest deviation overall.
pub fn worst_checks<'a>(per_point: impl Iterator<Item = &'a [Check]>) -> Vec<Check> {
    let mut worst: IndexMap<String, Check> = IndexMap::new();
    for checks in per_point {
        for c in checks {
            match worst.get_mut(&c.name) {
                None => {
                    worst.insert(c.name.clone(), c.clone());
                }
                Some(w) => {
                    let key = |x: &Check| (!x.pass, x.deviation_f64());
                    let (a, b) = (key(c), key(w));
                    if a.0 & !b.0 || (a.0 == b.0 && a.1 > b.1) {
                        *w = c.clone();
                    }
                }
            }
        }
    }
    worst.into_values().collect()
}

/// The ratio rises to its maximum at the grid point nearest `a = 0` and
/// falls after it.
fn ratio_peak(a: &[f64], ratio: &[f64]) -> Check {
    let peak = (0..ratio.len()).fold(0, |best, i| if ratio[i] > ratio[best] { i } else { best });
    let mut violation: f64 = 0.0;
    for i in 0..ratio.len().saturating_sub(1) {
        let step = ratio[i + 1] - ratio[i];
        violation = violation.max(if i < peak { -step } else { step });
    }
    let min_abs = a.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let reference = if (a[peak].abs() - min_abs).abs() <= 1e-12 {
        a[peak]
    } else {
        *a.iter().find(|x| x.abs() == min_abs).unwrap()
    };
    let dev = (a[peak] - reference).abs() + violation.max(0.0);
    let ok = dev <= 1e-12 && ratio.iter().all(|r| r.is_finite());
    Check::new("compare.ratio_peak_at_a0", a[peak], reference, dev, ok)
}
