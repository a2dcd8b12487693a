use std::sync::Arc;

use qfree_core::group::catalog;
use qfree_core::verify::{run_suite, Suite, UserCase, VerifyConfig};
use qfree_core::Error;

fn user(name: &str, gens: &[&str], spec: Option<Vec<(usize, usize)>>) -> VerifyConfig {
    let g = Arc::new(catalog::by_name(name).unwrap());
    let ids: Vec<usize> = gens.iter().map(|s| g.find(s).unwrap()).collect();
    let subgroup = g.subgroup_closure(&ids);
    VerifyConfig { case: Some(UserCase { group: g, subgroup, spec }), ..Default::default() }
}

#[test]
fn reports_are_reproducible_from_the_seed() {
    let config = VerifyConfig { seed: 11, ..Default::default() };
    let a = run_suite(Suite::Normalization, &config).unwrap();
    let b = run_suite(Suite::Normalization, &config).unwrap();
    let residuals = |r: &qfree_core::verify::VerificationReport| {
        r.checks.iter().map(|c| (c.id.clone(), c.pass, c.max_residual)).collect::<Vec<_>>()
    };
    assert_eq!(residuals(&a), residuals(&b));
    assert!(a.pass);
}

#[test]
fn normal_suites_reject_non_normal_cases() {
    let err = run_suite(Suite::CanonicalAction, &user("S3", &["(1 2)"], None)).unwrap_err();
    assert!(matches!(err, Error::NotNormal(_)));
}

#[test]
fn user_cases_run_through_the_non_normal_suites() {
    for suite in [Suite::FixedSetDisjointness, Suite::BundleDecomposition, Suite::FixedSetIdentity, Suite::AutIsomorphism] {
        let report = run_suite(suite, &user("D4", &["(1 3)"], Some(vec![(1, 2)]))).unwrap();
        assert!(report.pass, "{}", serde_json::to_string_pretty(&report).unwrap());
        assert!(!report.checks.is_empty());
    }
}

#[test]
fn a_tight_tolerance_is_honoured() {
    let config = VerifyConfig { tolerance: 1e-30, ..user("Z4", &["2"], None) };
    let report = run_suite(Suite::Representations, &config).unwrap();
    assert_eq!(report.tolerance, 1e-30);
    // floating point residuals cannot meet this bound
    assert!(!report.pass);
}
