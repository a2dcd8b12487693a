//! `qfree`: character tables, verification suites and cocycle round trips
//! from the command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qfree_core::cocycle::BaseComplex;
use qfree_core::group::{catalog, FiniteGroup};
use qfree_core::io::{self, character_table_json, load_cocycle, load_spec, parse_subgroup, read_json, CharacterTableJson};
use qfree_core::rep::irreducibles;
use qfree_core::verify::{cocycle_round_trip, run_suite, Suite, UserCase, VerifyConfig};
use qfree_core::Error;

/// Report written; a property or validation failed.
const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_HYPOTHESIS: u8 = 4;

#[derive(Parser)]
#[command(name = "qfree", version, about = "Equivariant bundles with quasi-free actions over finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Character table and irreducible degrees of a group.
    Irreps {
        /// Group file, or a catalog name such as S3.
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite over the catalog or one user case.
    Verify {
        /// Suite name, or `all`.
        suite: String,
        /// Group file or catalog name; requires --subgroup.
        #[arg(long)]
        group: Option<String>,
        /// Comma-separated generators of the stationary subgroup, as indices or labels.
        #[arg(long)]
        subgroup: Option<String>,
        /// Multiplicities as a JSON file `[[k, m], ...]` or inline `k:m,k:m`.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance for identities; composite constructions get ten times this.
        #[arg(long, default_value_t = qfree_core::tolerance::VERIFY)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate, decompose and reassemble an automorphism-valued cocycle.
    Roundtrip {
        #[arg(long)]
        cocycle: PathBuf,
        /// Overrides the complex named in the cocycle file.
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = qfree_core::tolerance::VERIFY)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConvergenceFailure(_)
        | Error::NonIntegralMultiplicity { .. }
        | Error::SingularBlock { .. }
        | Error::NoInvertibleIntertwiner { .. } => EXIT_NUMERIC,
        Error::PreconditionFailed(_)
        | Error::NotNormal(_)
        | Error::TrivialComponentPresent { .. }
        | Error::NotCompatible(_)
        | Error::ComponentsPermuted => EXIT_HYPOTHESIS,
        _ => EXIT_INPUT,
    }
}

/// A path if one exists, otherwise a catalog name.
fn load_group(arg: &str) -> Result<FiniteGroup, Error> {
    let path = Path::new(arg);
    if path.exists() {
        return io::load_group(path);
    }
    catalog::by_name(arg).ok_or_else(|| Error::InvalidInput(format!("{arg} is neither a file nor a catalog group")))
}

fn parse_spec(arg: &str) -> Result<Vec<(usize, usize)>, Error> {
    let path = Path::new(arg);
    if path.exists() {
        return load_spec(path);
    }
    arg.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, m) = pair
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("spec entry {pair} is not k:m")))?;
            let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad number in {pair}")));
            Ok((parse(k)?, parse(m)?))
        })
        .collect()
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, summary: &str) -> Result<(), Error> {
    match out {
        Some(p) => {
            io::write_json(p, value)?;
            print_line(summary)
        }
        None => print_line(&serde_json::to_string_pretty(value)?),
    }
}

/// Like `println!`, but a closed pipe is not an error.
fn print_line(text: &str) -> Result<(), Error> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct IrrepsReport {
    order: usize,
    degrees: Vec<usize>,
    orthonormality_residual: f64,
    character_table: CharacterTableJson,
}

fn cmd_irreps(group: &str, out: Option<&Path>) -> Result<u8, Error> {
    let g = Arc::new(load_group(group)?);
    let irr = irreducibles(&g)?;
    let report = IrrepsReport {
        order: g.order(),
        degrees: irr.table.degrees.clone(),
        orthonormality_residual: irr.table.orthonormality_residual(&g),
        character_table: character_table_json(&g, &irr.table),
    };
    emit(&report, out, &format!("{} irreducibles of a group of order {}", report.degrees.len(), report.order))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: &str,
    group: Option<&str>,
    subgroup: Option<&str>,
    spec: Option<&str>,
    seed: u64,
    tolerance: f64,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let suite: Suite = suite.parse()?;
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let case = match (group, subgroup) {
        (None, None) if spec.is_none() => None,
        (Some(g), Some(h)) => {
            let group = Arc::new(load_group(g)?);
            let subgroup = parse_subgroup(&group, h)?;
            let spec = spec.map(parse_spec).transpose()?;
            Some(UserCase { group, subgroup, spec })
        }
        _ => return Err(Error::InvalidInput("--group and --subgroup must be given together, and --spec needs both".into())),
    };
    let config = VerifyConfig { seed, tolerance, case };
    let report = run_suite(suite, &config)?;
    let failed = report.failures().count();
    let summary = format!(
        "{} {}: {} checks, {failed} failed, max residual {:.2e}",
        if report.pass { "PASS" } else { "FAIL" },
        report.suite,
        report.checks.len(),
        report.max_residual()
    );
    emit(&report, out, &summary)?;
    Ok(if report.pass { 0 } else { EXIT_FAILED })
}

fn cmd_roundtrip(cocycle: &Path, complex: Option<&Path>, seed: u64, tolerance: f64, out: Option<&Path>) -> Result<u8, Error> {
    let complex: Option<BaseComplex> = complex.map(read_json).transpose()?;
    let loaded = load_cocycle(cocycle, complex)?;
    let report = cocycle_round_trip(&loaded.model, &loaded.cocycle, seed, tolerance)?;
    let summary = match &report.covering {
        None => format!("FAIL: cocycle condition violated on {} triangles", report.validation.violations.len()),
        Some(c) => format!(
            "{}: covering with {} components over {} charts",
            if report.pass { "PASS" } else { "FAIL" },
            c.components,
            report.charts
        ),
    };
    emit(&report, out, &summary)?;
    Ok(if report.pass { 0 } else { EXIT_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Irreps { group, out } => cmd_irreps(group, out.as_deref()),
        Command::Verify { suite, group, subgroup, spec, seed, tolerance, out } => cmd_verify(
            suite,
            group.as_deref(),
            subgroup.as_deref(),
            spec.as_deref(),
            *seed,
            *tolerance,
            out.as_deref(),
        ),
        Command::Roundtrip { cocycle, complex, seed, tolerance, out } => {
            cmd_roundtrip(cocycle, complex.as_deref(), *seed, *tolerance, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_spec() {
        assert_eq!(parse_spec("1:2, 3:1").unwrap(), vec![(1, 2), (3, 1)]);
        assert!(parse_spec("1-2").is_err());
        assert!(parse_spec("1:x").is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::NotNormal("x".into())), EXIT_HYPOTHESIS);
        assert_eq!(exit_code(&Error::ConvergenceFailure("x".into())), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::InvalidInput("x".into())), EXIT_INPUT);
    }
}
