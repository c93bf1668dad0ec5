//! End-to-end acceptance run: executes every criterion of the suite at a
//! fixed seed, prints one line per criterion, and fails if any criterion
//! fails. A second pass at the same seed must serialize to identical
//! bytes.

use tshift::io::to_json_string;
use tshift::suite::run_acceptance_suite;

#[test]
fn acceptance_suite_passes_and_is_reproducible() {
    let report = run_acceptance_suite(42).expect("suite must run to completion");

    for c in &report.criteria {
        println!(
            "criterion {} ({}): {} — {}",
            c.id,
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        );
    }

    let rerun = run_acceptance_suite(42).expect("rerun must also complete");
    let bytes_a = to_json_string(&report).unwrap();
    let bytes_b = to_json_string(&rerun).unwrap();
    assert_eq!(bytes_a, bytes_b, "suite reports must be byte-identical across reruns");

    assert!(
        report.all_passed,
        "acceptance suite failed; see the per-criterion lines above"
    );
}
