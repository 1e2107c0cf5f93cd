//! Acceptance criteria 1-8, one test each. Every test writes a single
//! `[PASS]`/`[FAIL]` line straight to stderr, so it shows even when captured
//! output is hidden.

use std::io::Write;

use linunion::verify::{self, CriterionResult, SuiteConfig};

fn check(run: fn(&SuiteConfig) -> CriterionResult) {
    let r = run(&SuiteConfig::default());
    writeln!(std::io::stderr(), "{r}").unwrap();
    assert!(r.pass, "{r}");
}

#[test]
fn criterion_1_remark_tightness() {
    check(verify::remark_tightness);
}

#[test]
fn criterion_2_charging_certificate() {
    check(verify::charging_certificate);
}

#[test]
fn criterion_3_common_point_depth_bound() {
    check(verify::common_point_bound);
}

#[test]
fn criterion_4_union_complexity_invariant() {
    check(verify::kedem_invariant);
}

#[test]
fn criterion_5_edge_and_coloring_bounds() {
    check(verify::edge_and_coloring_bounds);
}

#[test]
fn criterion_6_sampling_chain() {
    check(verify::sampling_chain);
}

#[test]
fn criterion_7_oracle_equivalences() {
    check(verify::oracle_equivalences);
}

#[test]
fn criterion_8_depth_remark() {
    check(verify::depth_remark);
}
