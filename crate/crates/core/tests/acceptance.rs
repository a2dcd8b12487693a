//! Runs every acceptance criterion over the built-in catalog and prints one
//! PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use qfree_core::verify::{run_suite, Suite, VerificationReport, VerifyConfig};

const CRITERIA: [(&str, Suite); 11] = [
    ("representation completeness", Suite::Representations),
    ("canonical action axioms", Suite::CanonicalAction),
    ("automorphism exact sequence", Suite::ExactSequence),
    ("restriction to isotypic components", Suite::ComponentRestriction),
    ("cocycle normalization", Suite::Normalization),
    ("cocycle decompose/include round trip", Suite::CocycleRoundTrip),
    ("fixed-set disjointness and coverage", Suite::FixedSetDisjointness),
    ("bundle decomposition over conjugates", Suite::BundleDecomposition),
    ("fixed-set identity of the induced model", Suite::FixedSetIdentity),
    ("automorphism groups under induction", Suite::AutIsomorphism),
    ("reduction to the normalizer", Suite::ReductionRoundTrip),
];

fn summarize(report: &VerificationReport) -> String {
    let failed: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
    if failed.is_empty() {
        format!("{} checks, max residual {:.2e}", report.checks.len(), report.max_residual())
    } else {
        format!("{} of {} checks failed: {}", failed.len(), report.checks.len(), failed.join("; "))
    }
}

fn main() -> ExitCode {
    let config = VerifyConfig::default();
    let mut all_pass = true;
    for (i, (name, suite)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let report = match run_suite(*suite, &config) {
            Ok(r) => r,
            Err(e) => {
                println!("FAIL {} {name} [{}] (error: {e})", i + 1, suite.name());
                all_pass = false;
                continue;
            }
        };
        let verdict = if report.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {} {name} [{}] ({}, {:.1}s)",
            i + 1,
            suite.name(),
            summarize(&report),
            start.elapsed().as_secs_f64()
        );
        all_pass &= report.pass;
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
