use std::collections::BTreeMap;

use curvlab::catalog;
use curvlab::parallel::Execution;
use curvlab::specfile::MetricSpec;
use curvlab::subject::Subject;
use curvlab::theorems::suites::{
    coincidence_family, invariance_family, separation, theorem_iff, COINCIDENCE_TOL,
};
use curvlab::theorems::{run_suite, Criterion, RunConfig, Suite, Verdict};

fn subjects(ids: &[&str]) -> Vec<Subject> {
    ids.iter()
        .map(|id| catalog::subject(id, &BTreeMap::new()).unwrap())
        .collect()
}

fn json(report: &impl serde::Serialize) -> String {
    serde_json::to_string(report).unwrap()
}

#[test]
fn sequential_and_parallel_reports_are_identical() {
    let subs = subjects(&["sphere3", "aniso4", "weyl_nonclosed4"]);
    let mut cfg = RunConfig::new(7, 3);
    let auto = run_suite(Suite::All, &subs, &cfg).unwrap();
    cfg.execution = Execution::Sequential;
    let seq = run_suite(Suite::All, &subs, &cfg).unwrap();
    assert_eq!(json(&auto), json(&seq));
    assert!(auto.passed(), "{}", auto.summary_table());
}

#[test]
fn reports_depend_on_the_seed() {
    let subs = subjects(&["sphere4"]);
    let a = run_suite(Suite::Coincidence, &subs, &RunConfig::new(1, 2)).unwrap();
    let b = run_suite(Suite::Coincidence, &subs, &RunConfig::new(2, 2)).unwrap();
    let c = run_suite(Suite::Coincidence, &subs, &RunConfig::new(1, 2)).unwrap();
    assert_ne!(json(&a), json(&b));
    assert_eq!(json(&a), json(&c));
}

#[test]
fn coincidence_fails_on_a_non_einstein_metric() {
    let s = &subjects(&["aniso4"])[0];
    let checks = coincidence_family(s, &RunConfig::new(42, 3));
    assert_eq!(checks[0].check_id, "coincidence");
    assert_eq!(checks[0].verdict, Verdict::Fail);
    assert_eq!(checks[1].verdict, Verdict::Skipped);
    assert_eq!(separation(s, &RunConfig::new(42, 3)).verdict, Verdict::Pass);
}

#[test]
fn tolerance_factor_scales_only_upper_bounds() {
    let s = &subjects(&["sphere4"])[0];
    let mut cfg = RunConfig::new(42, 2);
    cfg.tolerance_factor = Some(10.0);
    let c = &coincidence_family(s, &cfg)[0];
    assert_eq!(
        c.criterion,
        Criterion::AtMost {
            tolerance: 10.0 * COINCIDENCE_TOL
        }
    );
    let sep = separation(&subjects(&["aniso4"])[0], &cfg);
    assert!(matches!(sep.criterion, Criterion::AtLeast { tolerance, .. } if tolerance == 1e-5));
}

#[test]
fn rescaling_is_skipped_for_weyl_structures() {
    let s = &subjects(&["weyl_nonclosed4"])[0];
    let checks = invariance_family(s, &RunConfig::new(42, 2));
    let rescaling = checks
        .iter()
        .find(|c| c.check_id == "invariance_rescaling")
        .unwrap();
    assert_eq!(rescaling.verdict, Verdict::Skipped);
    assert!(checks
        .iter()
        .filter(|c| c.check_id != "invariance_rescaling")
        .all(|c| c.verdict == Verdict::Pass));
}

#[test]
fn untagged_spec_uses_the_biconditional() {
    // A conformally flat, non-Einstein metric: W ≠ C and Φ ≠ 0 together.
    let text = r#"{
        "label": "conformally flat bump",
        "dimension": 4,
        "coordinates": ["a", "b", "c", "d"],
        "metric": [
            ["exp(k*a*b)", "0", "0", "0"],
            ["0", "exp(k*a*b)", "0", "0"],
            ["0", "0", "exp(k*a*b)", "0"],
            ["0", "0", "0", "exp(k*a*b)"]
        ],
        "params": {"k": 0.8},
        "sample_box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]
    }"#;
    let spec = MetricSpec::from_json(text).unwrap();
    spec.validate().unwrap();
    let s = spec.to_subject("bump", &BTreeMap::new()).unwrap();
    assert!(s.classification.is_none());
    let check = theorem_iff(&s, &RunConfig::new(42, 5));
    assert_eq!(check.verdict, Verdict::Pass, "{check:?}");
    assert_eq!(check.points.len(), 5);
    let report = run_suite(Suite::All, &[s], &RunConfig::new(42, 3)).unwrap();
    assert!(report.checks.iter().any(|c| c.check_id == "theorem_iff"));
}

#[test]
fn every_catalog_entry_passes_the_full_suite() {
    let subs = catalog::all_subjects(&BTreeMap::new()).unwrap();
    let report = run_suite(Suite::All, &subs, &RunConfig::new(42, 2)).unwrap();
    assert!(report.passed(), "{}", report.summary_table());
    let record = report.transformation_convention.as_ref().unwrap();
    assert_eq!(record.variants.len(), 4);
}
