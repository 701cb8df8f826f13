//! Command-line plumbing shared by the binary: configuration, dispatch and
//! reporting. Exit codes are 0 (pass), 1 (fail) and 2 (invalid input or I/O).

pub mod config;
pub mod report;
pub mod tasks;

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{Map, Value};
use thiserror::Error;

pub use config::{parse_config_file, Format, RunConfig, Task};
pub use report::{Bound, Residual, ResidualSummary, VerificationReport};
pub use tasks::{run_task, TaskOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn assemble(c: &RunConfig, outcome: TaskOutcome, started: Instant) -> VerificationReport {
    let TaskOutcome {
        params,
        results,
        checks,
        mut warnings,
    } = outcome;
    let residuals = ResidualSummary::new(checks);
    if residuals.checks.is_empty() {
        warnings.push("no checks were run; pass is vacuous".into());
    }
    VerificationReport {
        task: c.task.name().to_string(),
        params,
        results,
        pass: residuals.all_ok(),
        residuals,
        runtime_ms: if c.timing { started.elapsed().as_millis() as u64 } else { 0 },
        version: VERSION.to_string(),
        command: c.command.clone(),
        warnings,
    }
}

/// Runs the configured task. `all` runs every task with its own defaults,
/// passing down seed, window, order and ħ; sub-tasks run concurrently and
/// are reported in a fixed order.
pub fn run(c: &RunConfig) -> Result<VerificationReport, HarnessError> {
    c.validate()?;
    let started = Instant::now();
    if c.task != Task::All {
        let outcome = run_task(c)?;
        return Ok(assemble(c, outcome, started));
    }
    let subs: Vec<RunConfig> = Task::SUITE
        .iter()
        .map(|&task| RunConfig {
            task,
            seed: c.seed,
            window: c.window,
            order: c.order,
            hbar: c.hbar.clone(),
            timing: c.timing,
            ..RunConfig::new(task)
        })
        .collect();
    let reports: Vec<VerificationReport> = subs.par_iter().map(run).collect::<Result<_, _>>()?;
    let mut params = Map::new();
    params.insert("seed".into(), c.seed.into());
    params.insert("tasks".into(), Task::SUITE.iter().map(|t| Value::from(t.name())).collect());
    let mut outcome = TaskOutcome {
        params,
        ..Default::default()
    };
    for r in reports {
        outcome.checks.extend(r.residuals.checks.iter().map(|chk| Residual {
            name: format!("{}: {}", r.task, chk.name),
            ..chk.clone()
        }));
        outcome.warnings.extend(r.warnings.iter().map(|w| format!("{}: {w}", r.task)));
        outcome
            .results
            .push(serde_json::to_value(&r).expect("reports serialize"));
    }
    Ok(assemble(c, outcome, started))
}

/// Runs, writes the report to the configured output (stdout if unset) and
/// returns the exit code.
pub fn run_and_emit(c: &RunConfig, stdout: &mut dyn std::io::Write) -> Result<i32, HarnessError> {
    let report = run(c)?;
    let text = report.emit(c.format)?;
    match &c.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| HarnessError::Io(e.to_string()))?,
    }
    Ok(if report.pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commute_small_passes_and_round_trips() {
        let mut c = RunConfig::new(Task::Commute);
        c.n = Some(1);
        c.timing = false;
        let r = run(&c).unwrap();
        assert!(r.pass);
        assert_eq!(r.runtime_ms, 0);
        assert_eq!(r.residuals.count, 3);
        let text = r.emit(Format::Text).unwrap();
        assert_eq!(VerificationReport::from_text(&text).unwrap(), r);
        let json = r.emit(Format::Json).unwrap();
        assert_eq!(VerificationReport::from_json(&json).unwrap(), r);
    }

    #[test]
    fn vacuous_pass_is_flagged() {
        let c = RunConfig::new(Task::ClassicalLimit);
        let r = assemble(&c, TaskOutcome::default(), Instant::now());
        assert!(r.pass);
        assert!(r.warnings.iter().any(|w| w.contains("vacuous")));
    }

    #[test]
    fn bad_sizes_are_input_errors() {
        let mut c = RunConfig::new(Task::Critical);
        c.n = Some(2);
        c.lambda = Some(vec![crate::algebra::rat(1, 2), crate::algebra::rat(-1, 2)]);
        assert!(matches!(run(&c), Err(HarnessError::InvalidInput(_))));
        c.lambda = Some(vec![crate::algebra::rat(1, 2), crate::algebra::rat(-1, 2), crate::algebra::rat(0, 1)]);
        c.q = Some(vec![crate::algebra::rat(1, 1)]);
        assert!(matches!(run(&c), Err(HarnessError::InvalidInput(_))));
    }
}
