use std::path::PathBuf;
use std::process::{Command, Output};

use ltlcheck::report::Report;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn ltlcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlcheck")).args(args).current_dir(root()).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn correct_egg_timer_passes() {
    let o = ltlcheck(&["check", "specs/eggtimer.strom", "--executor", "model:models/eggtimer.json", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("seed 42\n"));
}

#[test]
fn tick_mutant_fails_with_a_counterexample() {
    let o = ltlcheck(&["check", "specs/eggtimer.strom", "--executor", "model:models/eggtimer_mut_tick.json", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("safety: FAIL"), "{}", out);
    assert!(out.contains("tick? (event changed(\"#remaining\"))  <- property decided here"), "{}", out);
}

#[test]
fn missing_model_is_a_configuration_error() {
    let o = ltlcheck(&["check", "specs/eggtimer.strom", "--executor", "model:models/missing.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn invalid_model_reports_its_path() {
    let dir = std::env::temp_dir().join(format!("ltlcheck-model-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let model = dir.join("bad.json");
    std::fs::write(&model, r##"{"state":{"#a.text":"x"},"actions":{"click#a":{"effects":{"#b.text":"1"}}}}"##).unwrap();
    let o = ltlcheck(&["check", "specs/eggtimer.strom", "--executor", &format!("model:{}", model.display())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/actions/click#a/effects/#b.text"));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(ltlcheck(&["check", "specs/eggtimer.strom"]).status.code(), Some(3));
    assert_eq!(ltlcheck(&["check", "specs/eggtimer.strom", "--executor", "ftp:x"]).status.code(), Some(3));
    assert_eq!(ltlcheck(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_dumps() {
    let dir = std::env::temp_dir().join(format!("ltlcheck-parse-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.strom");
    std::fs::write(&empty, "").unwrap();
    let o = ltlcheck(&["parse", empty.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), ""));
    let o = ltlcheck(&["parse", empty.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap(), serde_json::json!({"items": []}));

    let bad = dir.join("bad.strom");
    std::fs::write(&bad, "let ok = 1;\nlet x = ;").unwrap();
    let o = ltlcheck(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:9"));
}

#[test]
fn printed_specs_parse_to_the_same_output() {
    for spec in ["specs/eggtimer.strom", "specs/eggtimer_small.strom", "specs/todomvc_lite.strom"] {
        let printed = stdout(&ltlcheck(&["parse", spec]));
        let path = std::env::temp_dir().join(format!("ltlcheck-reprint-{}.strom", std::process::id()));
        std::fs::write(&path, &printed).unwrap();
        assert_eq!(stdout(&ltlcheck(&["parse", path.to_str().unwrap()])), printed, "{}", spec);
    }
}

#[test]
fn deps_of_the_egg_timer() {
    let o = ltlcheck(&["deps", "specs/eggtimer.strom", "safety"]);
    assert_eq!(stdout(&o), "#remaining.text\n#toggle.text\n");
    let o = ltlcheck(&["deps", "specs/eggtimer.strom", "safety", "--format", "machine"]);
    assert_eq!(stdout(&o).trim(), r##"["#remaining.text","#toggle.text"]"##);
    assert_eq!(ltlcheck(&["deps", "specs/eggtimer.strom", "nope"]).status.code(), Some(3));
}

#[test]
fn machine_report_matches_golden() {
    let o = ltlcheck(&[
        "check",
        "specs/eggtimer_small.strom",
        "--executor",
        "model:models/eggtimer_small_mut_tick.json",
        "--property",
        "safety",
        "--runs",
        "2",
        "--max-actions",
        "5",
        "--seed",
        "42",
        "--format",
        "machine",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let golden = std::fs::read_to_string(root().join("crates/cli/tests/golden/eggtimer_small_mut_tick_seed42.json")).unwrap();
    assert_eq!(stdout(&o), golden);
    let report: Report = serde_json::from_str(&golden).unwrap();
    assert_eq!(report.results[0].property, "safety");
    assert_eq!(report.to_json() + "\n", golden);
}

#[test]
fn jobs_do_not_change_results() {
    let args = |jobs: &'static str| {
        ltlcheck(&[
            "check",
            "specs/todomvc_lite.strom",
            "--executor",
            "model:models/todomvc_lite_bug7.json",
            "--runs",
            "8",
            "--seed",
            "5",
            "--default-subscript",
            "20",
            "--format",
            "machine",
            "--jobs",
            jobs,
        ])
    };
    assert_eq!(stdout(&args("1")), stdout(&args("4")));
}

#[test]
fn fail_fast_stops_at_the_first_failure() {
    let o = ltlcheck(&[
        "check",
        "specs/eggtimer_small.strom",
        "--executor",
        "model:models/eggtimer_small_mut_tick.json",
        "--property",
        "safety",
        "--seed",
        "1",
        "--fail-fast",
        "--jobs",
        "3",
        "--format",
        "machine",
    ]);
    let report: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.results[0].runs.len(), 1);
}

#[test]
fn sweep_table_shape() {
    let o = ltlcheck(&[
        "sweep",
        "specs/todomvc_lite.strom",
        "--executor",
        "model:models/todomvc_lite_bug7.json",
        "--subscripts",
        "5",
        "--runs-per",
        "1",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "subscript,detection_rate,mean_actions");
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols[0], "5");
    let rate: f64 = cols[1].parse().unwrap();
    assert!((0.0..=1.0).contains(&rate));
}

#[test]
fn subprocess_executor_matches_in_process() {
    let serve = format!("exec:{} serve models/eggtimer_small.json", env!("CARGO_BIN_EXE_ltlcheck"));
    let common = ["check", "specs/eggtimer_small.strom", "--seed", "9", "--runs", "3", "--format", "machine"];
    let sub = ltlcheck(&[&common[..], &["--executor", &serve]].concat());
    let local = ltlcheck(&[&common[..], &["--executor", "model:models/eggtimer_small.json"]].concat());
    assert_eq!(sub.status.code(), Some(0), "{}", String::from_utf8_lossy(&sub.stderr));
    assert_eq!(stdout(&sub), stdout(&local));
}

#[test]
fn crashed_executor_is_reported() {
    let o = ltlcheck(&["check", "specs/eggtimer_small.strom", "--executor", "exec:exit 7", "--runs", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("executor"), "{}", String::from_utf8_lossy(&o.stderr));
}
