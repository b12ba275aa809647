use std::process::Command;

use fflab::harness::{find, oracle_constant, registry, trial_seed, BaselineStore, Params, Runner, Status, SweepSpec};
use fflab::Error;

fn fflab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fflab"))
}

#[test]
fn registry_ids_are_unique_and_findable() {
    let ids: Vec<&str> = registry().iter().map(|s| s.id).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), ids.len());
    assert_eq!(ids.len(), 39);
    for id in ids {
        assert_eq!(find(id).unwrap().id, id);
    }
    assert!(matches!(find("XX-9"), Err(Error::UnknownScenario(_))));
}

#[test]
fn trial_seeds_depend_on_every_input() {
    let s = trial_seed(1, "EN-2", 0);
    assert_eq!(s, trial_seed(1, "EN-2", 0));
    assert_ne!(s, trial_seed(2, "EN-2", 0));
    assert_ne!(s, trial_seed(1, "EN-3", 0));
    assert_ne!(s, trial_seed(1, "EN-2", 1));
}

#[test]
fn every_tracked_scenario_has_a_current_baseline() {
    let store = BaselineStore::embedded().unwrap();
    store.verify().unwrap();
    for sc in registry().iter().filter(|s| s.oracle.is_some()) {
        assert!(store.get(sc.id).is_some(), "{}", sc.id);
    }
}

#[test]
fn stale_oracle_hash_is_refused_before_running() {
    let mut store = BaselineStore::embedded().unwrap();
    let mut entry = oracle_constant("ST-1").unwrap();
    entry.oracle_hash = "0000".into();
    store.insert("ST-1", entry);
    assert!(matches!(Runner::new(store), Err(Error::OracleHashMismatch { .. })));
}

#[test]
fn missing_baseline_is_an_actionable_error() {
    let runner = Runner::new(BaselineStore::default()).unwrap();
    let err = runner.run("EN-2", Params { prime: 3, dim: 3, trials: 2 }, 0).unwrap_err();
    assert!(matches!(err, Error::MissingBaseline(_)));
    assert!(err.to_string().contains("baseline --regen"));
    // Exact scenarios need no baseline.
    let rep = runner.run("FT-2", Params { prime: 3, dim: 3, trials: 1 }, 0).unwrap();
    assert_eq!(rep.status, Status::Pass);
}

#[test]
fn empty_sweep_is_empty() {
    let sweep = Runner::with_embedded().unwrap().sweep(&SweepSpec::default()).unwrap();
    assert!(sweep.reports.is_empty());
    assert!(!sweep.failed());
}

#[test]
fn unsupported_parameters_are_skipped_in_sweeps() {
    let spec = SweepSpec {
        ids: vec!["FT-1".into()],
        primes: Some(vec![3]),
        dims: Some(vec![3, 4]),
        trials: None,
        seed: 0,
    };
    let sweep = Runner::with_embedded().unwrap().sweep(&spec).unwrap();
    assert_eq!(sweep.reports.len(), 1);
    assert_eq!(sweep.skipped.len(), 1);
}

#[test]
fn cli_list_and_table() {
    let out = fflab().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("KK-1") && text.contains("MAIN-1"));
    let out = fflab().arg("table").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["18/5", "9/4", "47/31", "not asymptotic"] {
        assert!(text.contains(needle), "{needle}");
    }
}

#[test]
fn cli_run_writes_a_versioned_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let status = fflab()
        .args(["run", "--scenario", "QF-1", "--prime", "5", "--dim", "2", "--out"])
        .arg(&path)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], "fflab-report/1");
    assert_eq!(v["status"], "pass");
}

#[test]
fn cli_exit_codes() {
    // Unknown scenario and a bad prime are configuration errors.
    assert_eq!(fflab().args(["run", "--scenario", "NOPE"]).output().unwrap().status.code(), Some(2));
    assert_eq!(
        fflab().args(["run", "--scenario", "FT-1", "--prime", "9"]).output().unwrap().status.code(),
        Some(2)
    );
    // A baseline file with a tiny constant makes the tracked scenario fail.
    let dir = tempfile::tempdir().unwrap();
    let mut store = BaselineStore::embedded().unwrap();
    let mut entry = oracle_constant("ST-1").unwrap();
    entry.constant = 1e-6;
    store.insert("ST-1", entry);
    let path = dir.path().join("b.json");
    store.save(&path).unwrap();
    let status = fflab()
        .args(["run", "--scenario", "ST-1", "--trials", "4", "--baselines"])
        .arg(&path)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn cli_sweep_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let status = fflab()
        .args(["sweep", "--ids", "FT-2,QF-3", "--primes", "3", "--no-timing", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(csv.starts_with("scenario,prime,dim,trials,seed,status,metric,runtime_ms\n"));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn baseline_regen_writes_a_fresh_store() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let status = fflab()
        .args(["baseline", "--regen", "--ids", "EN-2,KK-4", "--out"])
        .arg(&path)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let store = BaselineStore::load(&path).unwrap();
    store.verify().unwrap();
    assert_eq!(store.entries.len(), 2);
    assert_eq!(store.get("EN-2"), BaselineStore::embedded().unwrap().get("EN-2"));
}
