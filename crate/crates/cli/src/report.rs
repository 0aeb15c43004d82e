//! Human-readable and machine-readable check reports.

use std::collections::BTreeMap;
use std::fmt::Write;

use ltlcheck_core::checker::{Cause, CheckResult, Overall, RunResult, RunVerdict, TraceEntry};
use serde::{Deserialize, Serialize};

/// The machine report of one `check` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub results: Vec<PropertyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Overall,
    pub seed: u64,
    pub runs: Vec<RunResult>,
}

impl Report {
    pub fn new(seed: u64, results: Vec<CheckResult>) -> Self {
        let results = results
            .into_iter()
            .map(|r| PropertyReport { property: r.property, verdict: r.overall, seed, runs: r.runs })
            .collect();
        Report { seed, results }
    }

    pub fn overall(&self) -> Overall {
        let verdicts = self.results.iter().map(|r| r.verdict);
        if verdicts.clone().any(|v| v == Overall::Fail) {
            Overall::Fail
        } else if verdicts.clone().any(|v| v == Overall::Inconclusive) {
            Overall::Inconclusive
        } else {
            Overall::Pass
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn human(&self) -> String {
        let mut out = format!("seed {}\n", self.seed);
        for p in &self.results {
            human_property(&mut out, p);
        }
        out
    }
}

fn human_property(out: &mut String, p: &PropertyReport) {
    let label = match p.verdict {
        Overall::Pass => "pass",
        Overall::Fail => "FAIL",
        Overall::Inconclusive => "inconclusive",
    };
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in &p.runs {
        *counts.entry(r.verdict.to_string()).or_default() += 1;
    }
    let summary: Vec<String> = counts.iter().map(|(v, n)| format!("{} {}", n, v)).collect();
    let _ = writeln!(out, "{}: {} ({} runs: {})", p.property, label, p.runs.len(), summary.join(", "));

    for r in p.runs.iter().filter(|r| r.verdict == RunVerdict::Inconclusive) {
        let why = r.reason.map(|r| format!(" ({:?})", r)).unwrap_or_default();
        let _ = writeln!(out, "  run {}: inconclusive{} after {} actions", r.run, why, r.actions_taken);
    }
    let failing: Vec<&RunResult> = p.runs.iter().filter(|r| r.verdict.is_failure()).collect();
    if let Some(first) = failing.first() {
        if failing.len() > 1 {
            let others: Vec<String> = failing[1..].iter().map(|r| r.run.to_string()).collect();
            let _ = writeln!(out, "  also failing: runs {}", others.join(", "));
        }
        counterexample(out, first);
    }
}

fn counterexample(out: &mut String, r: &RunResult) {
    let at = r.decided_at.map(|i| format!(" at state {}", i)).unwrap_or_default();
    let _ = writeln!(
        out,
        "  run {} (seed {}): {}{} after {} actions",
        r.run, r.seed, r.verdict, at, r.actions_taken
    );
    let _ = writeln!(out, "  trace:");
    let mut previous: Option<&TraceEntry> = None;
    for (i, e) in r.trace.iter().enumerate() {
        let marker = if r.decided_at == Some(i) { "  <- property decided here" } else { "" };
        let _ = writeln!(out, "    {:>3}  {}{}", i, describe(&e.cause), marker);
        for line in field_diff(previous, e) {
            let _ = writeln!(out, "           {}", line);
        }
        previous = Some(e);
    }
}

fn describe(cause: &Cause) -> String {
    match cause {
        Cause::InitialEvent { event, matched } | Cause::EventOccurred { event, matched } => {
            format!("{} (event {})", matched.join(" "), event)
        }
        Cause::ActionPerformed { action, descriptor } => format!("{} ({})", action, descriptor),
        Cause::TimedOut { action: Some(a) } => format!("{} timed out", a),
        Cause::TimedOut { action: None } => "waited".to_string(),
    }
}

fn field_diff(previous: Option<&TraceEntry>, e: &TraceEntry) -> Vec<String> {
    let fields = &e.state.fields;
    match previous {
        None => fields.iter().map(|(k, v)| format!("{} = {}", k, v)).collect(),
        Some(p) => {
            let before = &p.state.fields;
            let mut lines = Vec::new();
            for (k, v) in fields {
                match before.get(k) {
                    Some(old) if old == v => {}
                    Some(old) => lines.push(format!("{}: {} -> {}", k, old, v)),
                    None => lines.push(format!("{}: (absent) -> {}", k, v)),
                }
            }
            for k in before.keys().filter(|k| !fields.contains_key(*k)) {
                lines.push(format!("{}: {} -> (absent)", k, before[k]));
            }
            lines
        }
    }
}

