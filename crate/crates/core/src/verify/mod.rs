//! Property suites run over the built-in catalog or a user-supplied case,
//! producing JSON reports.

mod cases;
mod normal;
mod reduction;
mod roundtrip;

pub use cases::{nonnormal_cases, normal_cases, restriction_models, standard_specs, NonNormalCase, NormalCase};
pub use roundtrip::{cocycle_round_trip, CoveringSummary, RoundTripReport};

use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};

pub const SCHEMA_VERSION: u32 = 1;

/// Residuals above this are written as this value so reports stay valid JSON.
pub const RESIDUAL_CEILING: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Representations,
    CanonicalAction,
    ExactSequence,
    ComponentRestriction,
    Normalization,
    CocycleRoundTrip,
    FixedSetDisjointness,
    BundleDecomposition,
    FixedSetIdentity,
    AutIsomorphism,
    ReductionRoundTrip,
    All,
}

impl Suite {
    pub const EACH: [Suite; 11] = [
        Suite::Representations,
        Suite::CanonicalAction,
        Suite::ExactSequence,
        Suite::ComponentRestriction,
        Suite::Normalization,
        Suite::CocycleRoundTrip,
        Suite::FixedSetDisjointness,
        Suite::BundleDecomposition,
        Suite::FixedSetIdentity,
        Suite::AutIsomorphism,
        Suite::ReductionRoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Representations => "representations",
            Suite::CanonicalAction => "canonical-action",
            Suite::ExactSequence => "exact-sequence",
            Suite::ComponentRestriction => "component-restriction",
            Suite::Normalization => "normalization",
            Suite::CocycleRoundTrip => "cocycle-round-trip",
            Suite::FixedSetDisjointness => "fixed-set-disjointness",
            Suite::BundleDecomposition => "bundle-decomposition",
            Suite::FixedSetIdentity => "fixed-set-identity",
            Suite::AutIsomorphism => "aut-isomorphism",
            Suite::ReductionRoundTrip => "reduction-round-trip",
            Suite::All => "all",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Suite::EACH.iter().map(|s| s.name()).chain(["all"]).collect()
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s}; expected one of {}", Suite::names().join(", "))))
    }
}

/// A case supplied on the command line instead of the catalog.
#[derive(Debug, Clone)]
pub struct UserCase {
    pub group: Arc<FiniteGroup>,
    pub subgroup: Subgroup,
    /// `(k, m_k)` pairs; the regular spec when absent.
    pub spec: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Identity-level tolerance; composite constructions get ten times this.
    pub tolerance: f64,
    pub case: Option<UserCase>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, tolerance: crate::tolerance::VERIFY, case: None }
    }
}

impl VerifyConfig {
    pub fn accept(&self) -> f64 {
        10.0 * self.tolerance
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement being checked.
    pub anchor: String,
    pub pass: bool,
    pub max_residual: f64,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// What a single check found.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub residual: f64,
    pub detail: Option<serde_json::Value>,
}

impl Outcome {
    pub fn new(pass: bool, residual: f64) -> Self {
        Outcome { pass, residual, detail: None }
    }

    /// Passes iff `residual <= tol` and `extra` holds.
    pub fn within(residual: f64, tol: f64, extra: bool) -> Self {
        Outcome::new(extra && residual <= tol, residual)
    }

    pub fn with(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

pub(crate) struct Recorder {
    checks: Vec<CheckRecord>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new() }
    }

    /// Runs `f`; an error becomes a failed check carrying the message.
    pub(crate) fn check(&mut self, id: impl Into<String>, anchor: &str, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let out = f();
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        let (pass, residual, detail) = match out {
            Ok(o) => (o.pass && !o.residual.is_nan(), o.residual, o.detail),
            Err(e) => (false, f64::INFINITY, Some(serde_json::json!({ "error": e.to_string() }))),
        };
        let max_residual = if residual.is_finite() { residual.abs().min(RESIDUAL_CEILING) } else { RESIDUAL_CEILING };
        self.checks.push(CheckRecord { id: id.into(), anchor: anchor.to_string(), pass, max_residual, elapsed_ms, detail });
    }
}

fn suite_rng(seed: u64, suite: Suite) -> ChaCha8Rng {
    let index = Suite::EACH.iter().position(|s| *s == suite).unwrap_or(0) as u64;
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index))
}

fn run_one(suite: Suite, config: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    let mut rng = suite_rng(config.seed, suite);
    match suite {
        Suite::Representations => normal::representations(config, rec, &mut rng),
        Suite::CanonicalAction => normal::canonical_action(config, rec),
        Suite::ExactSequence => normal::exact_sequence(config, rec, &mut rng),
        Suite::ComponentRestriction => normal::component_restriction(config, rec, &mut rng),
        Suite::Normalization => normal::normalization(config, rec, &mut rng),
        Suite::CocycleRoundTrip => normal::cocycle_round_trip(config, rec, &mut rng),
        Suite::FixedSetDisjointness => reduction::fixed_set_disjointness(config, rec),
        Suite::BundleDecomposition => reduction::bundle_decomposition(config, rec, &mut rng),
        Suite::FixedSetIdentity => reduction::fixed_set_identity(config, rec),
        Suite::AutIsomorphism => reduction::aut_isomorphism(config, rec, &mut rng),
        Suite::ReductionRoundTrip => reduction::reduction_round_trip(config, rec, &mut rng),
        Suite::All => {
            for s in Suite::EACH {
                let before = rec.checks.len();
                run_one(s, config, rec)?;
                for c in &mut rec.checks[before..] {
                    c.id = format!("{}/{}", s.name(), c.id);
                }
            }
            Ok(())
        }
    }
}

/// Runs a suite. Errors are reserved for unusable user input; failures of
/// the properties themselves are recorded in the report.
pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<VerificationReport> {
    let mut rec = Recorder::new();
    run_one(suite, config, &mut rec)?;
    let pass = !rec.checks.is_empty() && rec.checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        suite: suite.name().to_string(),
        seed: config.seed,
        tolerance: config.tolerance,
        checks: rec.checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain(&[Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nonsense".parse::<Suite>().is_err());
    }

    #[test]
    fn failing_and_erroring_checks_are_recorded() {
        let mut rec = Recorder::new();
        rec.check("ok", "x", || Ok(Outcome::within(1e-12, 1e-8, true)));
        rec.check("big", "x", || Ok(Outcome::within(1.0, 1e-8, true)));
        rec.check("err", "x", || Err(Error::ModelMismatch));
        rec.check("nan", "x", || Ok(Outcome::new(true, f64::NAN)));
        let pass: Vec<bool> = rec.checks.iter().map(|c| c.pass).collect();
        assert_eq!(pass, vec![true, false, false, false]);
        assert_eq!(rec.checks[2].max_residual, RESIDUAL_CEILING);
        assert!(serde_json::to_string(&rec.checks).is_ok());
    }
}
