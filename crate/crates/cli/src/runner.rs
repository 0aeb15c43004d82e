//! Running checks and sweeps, optionally spreading runs over threads.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use ltlcheck_core::checker::{run_once, CheckError, CheckOptions, CheckResult, RunResult};
use ltlcheck_core::speclang::{CheckConfig, ElaboratedSpec};
use serde::{Deserialize, Serialize};

use crate::transport::Connector;

/// Runs `property` `options.budget.runs` times on up to `jobs` threads.
/// Each run opens its own executor session; results are ordered by run
/// index whatever order they finish in.
pub fn check_property(
    spec: &ElaboratedSpec,
    check: &CheckConfig,
    property: &str,
    connector: &Connector,
    seed: u64,
    options: &CheckOptions,
    jobs: usize,
) -> Result<CheckResult, CheckError> {
    let runs = options.budget.runs as u64;
    let next = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let results: Mutex<Vec<Result<RunResult, (u64, CheckError)>>> = Mutex::new(Vec::new());
    let worker = || loop {
        if stop.load(Ordering::SeqCst) {
            break;
        }
        let run = next.fetch_add(1, Ordering::SeqCst);
        if run >= runs {
            break;
        }
        let result = connector
            .connect()
            .map_err(CheckError::from)
            .and_then(|conn| run_once(spec, check, property, conn, seed, run, options))
            .map_err(|e| (run, e));
        let failed = match &result {
            Ok(r) => r.verdict.is_failure() && options.fail_fast,
            Err(_) => true,
        };
        if failed {
            stop.store(true, Ordering::SeqCst);
        }
        results.lock().expect("no worker panics while holding the lock").push(result);
    };
    std::thread::scope(|s| {
        for _ in 1..jobs.max(1) {
            s.spawn(worker);
        }
        worker();
    });

    let mut done = Vec::new();
    let mut first_error: Option<(u64, CheckError)> = None;
    for r in results.into_inner().expect("workers finished") {
        match r {
            Ok(r) => done.push(r),
            Err((run, e)) if first_error.as_ref().is_none_or(|(r0, _)| run < *r0) => first_error = Some((run, e)),
            Err(_) => {}
        }
    }
    if let Some((_, e)) = first_error {
        return Err(e);
    }
    done.sort_by_key(|r| r.run);
    if options.fail_fast {
        // Runs that raced past the first failure are dropped so the result
        // does not depend on scheduling.
        if let Some(i) = done.iter().position(|r| r.verdict.is_failure()) {
            done.truncate(i + 1);
        }
    }
    Ok(CheckResult::new(property.to_string(), done))
}

/// Every `(check, property)` pair of a spec, in declaration order.
pub fn checked_properties(spec: &ElaboratedSpec) -> Vec<(&CheckConfig, &str)> {
    spec.checks.iter().flat_map(|c| c.properties.iter().map(move |p| (c, p.as_str()))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub subscript: u32,
    /// Fraction of sessions in which some property failed.
    pub detection_rate: f64,
    /// Mean number of requests per session, summed over properties.
    pub mean_actions: f64,
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub subscripts: Vec<u32>,
    /// Only these properties; all checked properties if `None`.
    pub properties: Option<Vec<String>>,
    pub hard_cap_factor: usize,
    pub jobs: usize,
}

/// Detection statistics for each default subscript. Session `i` consists
/// of run `i` of every selected property. The hard cap of each row is
/// `hard_cap_factor` times the larger of the soft budget and the subscript,
/// so that high subscripts are not cut short by a budget sized for low ones.
pub fn sweep(
    compile: impl Fn(u32) -> Result<ElaboratedSpec, ltlcheck_core::speclang::SpecError>,
    connector: &Connector,
    plan: &SweepPlan,
    seed: u64,
    options: &CheckOptions,
) -> Result<Vec<SweepRow>, SweepError> {
    let SweepPlan { subscripts, properties, hard_cap_factor, jobs } = plan;
    let (hard_cap_factor, jobs, properties) = (*hard_cap_factor, *jobs, properties.as_deref());
    let mut rows = Vec::new();
    let sessions = options.budget.runs;
    for &n in subscripts.iter() {
        let spec = compile(n)?;
        let mut options = *options;
        options.budget.hard_cap = hard_cap_factor.saturating_mul(options.budget.max_actions.max(n as usize + 1));
        let options = &options;
        let mut detected = vec![false; sessions];
        let mut actions = 0usize;
        for (check, property) in checked_properties(&spec) {
            if properties.is_some_and(|ps| !ps.iter().any(|p| p == property)) {
                continue;
            }
            let result = check_property(&spec, check, property, connector, seed, options, jobs)?;
            for r in &result.runs {
                detected[r.run as usize] |= r.verdict.is_failure();
                actions += r.actions_taken;
            }
        }
        let hits = detected.iter().filter(|d| **d).count();
        rows.push(SweepRow {
            subscript: n,
            detection_rate: hits as f64 / sessions.max(1) as f64,
            mean_actions: actions as f64 / sessions.max(1) as f64,
        });
    }
    Ok(rows)
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Spec(#[from] ltlcheck_core::speclang::SpecError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("subscript,detection_rate,mean_actions\n");
    for r in rows {
        out.push_str(&format!("{},{:.4},{:.2}\n", r.subscript, r.detection_rate, r.mean_actions));
    }
    out
}
