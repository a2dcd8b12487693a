use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use super::cases::{describe, nonnormal_cases, regular_pairs, NonNormalCase};
use super::{Outcome, Recorder, VerifyConfig};
use crate::error::Result;
use crate::group::{catalog, FiniteGroup, Subgroup};
use crate::linalg::{self, CMat};
use crate::model::{build_model, subgroup_irreps};
use crate::nonnormal::{
    check_fixconjugate, check_unique_maximal, decompose_bundle, is_quasi_free, round_trip_from_g, round_trip_from_n,
    verify_aut_isomorphism, verify_disjointness, verify_fixed_set_identity, BundleMap, EquivariantBundle, FiniteGSpace,
};

const DISJOINTNESS: &str = "fixed sets of distinct conjugates of H are disjoint and cover the base";
const OVERLAP: &str = "an extra point fixed by all of G is reported as an overlap";
const DECOMPOSITION: &str = "bundle splits over G/N(H) with g·(n·x) = (gng⁻¹)·(g·x) and quasi-free pieces";
const FIXED_SET: &str = "(GX(ρ))^{gHg⁻¹} is the copy N(gHg⁻¹)/gHg⁻¹ with no nonzero fixed vectors";
const AUT_ISOMORPHISM: &str = "restriction Aut_G(GX(ρ)) → Aut_N(H)(X(ρ)) is an isomorphism independent of representatives";
const REDUCTION: &str = "reduce and induce are inverse up to equivariant isomorphism";
const DEGENERATE: &str = "for normal H induction from N(H) = G is the identity";

const AUT_SAMPLES: usize = 50;

fn cases(config: &VerifyConfig) -> Result<Vec<NonNormalCase>> {
    let Some(case) = &config.case else { return nonnormal_cases() };
    let spec = match &case.spec {
        Some(s) => s.clone(),
        None => regular_pairs(&*subgroup_irreps(&case.group, &case.subgroup)?),
    };
    let c = NonNormalCase {
        name: describe(&case.group, &case.subgroup),
        group: case.group.clone(),
        subgroup: case.subgroup.clone(),
        spec,
    };
    c.gx()?;
    Ok(vec![c])
}

/// One entry per distinct `(G, H)`.
fn instances(config: &VerifyConfig) -> Result<Vec<NonNormalCase>> {
    let mut out: Vec<NonNormalCase> = Vec::new();
    for c in cases(config)? {
        if !out.iter().any(|x| x.group == c.group && x.subgroup == c.subgroup) {
            out.push(c);
        }
    }
    for c in &mut out {
        if let Some(i) = c.name.rfind(' ') {
            if config.case.is_none() {
                c.name.truncate(i);
            }
        }
    }
    Ok(out)
}

fn random_gauge<R: Rng>(bundle: &EquivariantBundle, rng: &mut R) -> Vec<CMat> {
    (0..bundle.base().points()).map(|p| linalg::random_invertible(bundle.dim(p), rng)).collect()
}

/// Points `tH` of `G/H` fixed by `K`, from `t⁻¹Kt ⊆ H` on representatives.
fn fixed_cosets(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Vec<usize> {
    let dec = g.coset_decomposition(h);
    (0..dec.len())
        .filter(|&c| {
            let t = dec.representative(c);
            k.elements().iter().all(|&x| h.contains(g.mul(g.mul(g.inv(t), x), t)))
        })
        .collect()
}

pub(super) fn fixed_set_disjointness(config: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    for inst in instances(config)? {
        let (g, h) = (&inst.group, &inst.subgroup);
        let gx = inst.gx()?;
        rec.check(inst.name.clone(), DISJOINTNESS, || {
            let mut failures = Vec::new();
            let cosets = FiniteGSpace::cosets(g.clone(), h);
            let gx_base = gx.bundle().base();
            for (label, space) in [("cosets", &cosets), ("model", gx_base)] {
                let cover = check_fixconjugate(space, h);
                let disjoint = verify_disjointness(space, h);
                if !cover.covers {
                    failures.push(format!("{label}: {} uncovered points", cover.uncovered.len()));
                }
                if !disjoint.disjoint {
                    failures.push(format!("{label}: {} overlaps", disjoint.overlaps.len()));
                }
                if !check_unique_maximal(space, h)? {
                    failures.push(format!("{label}: H is not the unique maximal isotropy class"));
                }
            }
            let n = g.normalizer(h);
            for (_, k) in g.conjugation_classes_of(h) {
                let found = cosets.fixed_points(&k);
                if found != fixed_cosets(g, h, &k) {
                    failures.push(format!("fixed set of {} differs from the coset oracle", describe(g, &k)));
                }
                if found.len() != n.order() / h.order() {
                    failures.push(format!("fixed set of {} has {} points", describe(g, &k), found.len()));
                }
            }
            Ok(Outcome::new(failures.is_empty(), 0.0).with(json!({
                "conjugates": g.order() / n.order(),
                "points": cosets.points(),
                "failures": failures,
            })))
        });
        rec.check(format!("{} with a fixed point", inst.name), OVERLAP, || {
            let bigger = FiniteGSpace::cosets(g.clone(), h).disjoint_union(&FiniteGSpace::point(g.clone()))?;
            let report = verify_disjointness(&bigger, h);
            let conjugates = g.conjugation_classes_of(h).len();
            let expected_overlaps = conjugates * (conjugates - 1) / 2;
            let detected = report.overlaps.len() == expected_overlaps && !check_unique_maximal(&bigger, h)?;
            Ok(Outcome::new(detected, 0.0).with(json!({ "overlaps": report.overlaps.len(), "expected": expected_overlaps })))
        });
    }
    Ok(())
}

pub(super) fn bundle_decomposition<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let accept = config.accept();
    for case in cases(config)? {
        rec.check(case.name.clone(), DECOMPOSITION, || {
            let gx = case.gx()?;
            let (xi, _) = gx.bundle().gauge(&random_gauge(gx.bundle(), rng))?;
            let comps = decompose_bundle(&xi, &case.subgroup)?;
            let expected = case.group.order() / case.group.normalizer(&case.subgroup).order();
            let mut seen: Vec<usize> = comps.iter().flat_map(|c| c.points.iter().copied()).collect();
            seen.sort_unstable();
            let partition = seen == (0..xi.base().points()).collect::<Vec<_>>();
            let mut worst: f64 = 0.0;
            let mut base_exact = true;
            for c in &comps {
                let chk = c.check_witness(&comps[0]);
                base_exact &= chk.base_exact && chk.min_singular > crate::tolerance::INVERTIBLE;
                worst = worst.max(chk.fiber_residual);
            }
            let quasi_free = comps.iter().all(is_quasi_free);
            Ok(Outcome::within(worst, accept, comps.len() == expected && partition && base_exact && quasi_free).with(json!({
                "components": comps.len(),
                "expected": expected,
                "partition": partition,
                "base_exact": base_exact,
                "quasi_free": quasi_free,
            })))
        });
    }
    Ok(())
}

pub(super) fn fixed_set_identity(config: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    for case in cases(config)? {
        rec.check(case.name.clone(), FIXED_SET, || {
            let report = verify_fixed_set_identity(&case.gx()?);
            let pass = report.pass;
            Ok(Outcome::new(pass, 0.0).with(serde_json::to_value(&report)?))
        });
    }
    Ok(())
}

pub(super) fn aut_isomorphism<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let accept = config.accept();
    for case in cases(config)? {
        rec.check(case.name.clone(), AUT_ISOMORPHISM, || {
            let gx = case.gx()?;
            let report = verify_aut_isomorphism(&gx, AUT_SAMPLES, rng)?;
            Ok(Outcome::within(report.max_residual(), accept, true).with(serde_json::to_value(report)?))
        });
    }
    Ok(())
}

pub(super) fn reduction_round_trip<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let accept = config.accept();
    for case in cases(config)? {
        rec.check(case.name.clone(), REDUCTION, || {
            let gx = case.gx()?;
            let (xi, _) = gx.bundle().gauge(&random_gauge(gx.bundle(), rng))?;
            let inner = EquivariantBundle::from_model(&gx.inner);
            let (zeta, _) = inner.gauge(&random_gauge(&inner, rng))?;
            let from_g = round_trip_from_g(&xi, &case.subgroup)?;
            let from_n = round_trip_from_n(case.group.clone(), &case.subgroup, &zeta)?;
            Ok(Outcome::within(
                from_g.fiber_residual.max(from_n.fiber_residual),
                accept,
                from_g.base_exact && from_n.base_exact,
            )
            .with(json!({ "induce_after_reduce": from_g, "reduce_after_induce": from_n })))
        });
    }
    if config.case.is_some() {
        return Ok(());
    }
    let s3 = Arc::new(catalog::s3());
    let a3 = s3.subgroup_closure(&[s3.find("(1 2 3)").expect("catalog label")]);
    let d4 = Arc::new(catalog::d4());
    let center = d4.subgroup_closure(&[d4.find("(1 3)(2 4)").expect("catalog label")]);
    for (name, g, h) in [("S3/A3", s3, a3), ("D4/center", d4, center)] {
        rec.check(format!("{name} normal"), DEGENERATE, || {
            let spec = regular_pairs(&*subgroup_irreps(&g, &h)?);
            let direct = EquivariantBundle::from_model(&build_model(g.clone(), h.clone(), &spec)?);
            let irreps = subgroup_irreps(&g, &h)?;
            let gx = crate::nonnormal::build_gx(g.clone(), &h, crate::model::RepSpec::from_pairs(irreps, &spec)?)?;
            let identity = BundleMap::identity(&direct).check(&direct, gx.bundle());
            let (xi, _) = direct.gauge(&random_gauge(&direct, rng))?;
            let from_g = round_trip_from_g(&xi, &h)?;
            let from_n = round_trip_from_n(g.clone(), &h, &xi)?;
            let residual = identity.fiber_residual.max(from_g.fiber_residual).max(from_n.fiber_residual);
            let exact = gx.induced.components() == 1 && identity.base_exact && from_g.base_exact && from_n.base_exact;
            Ok(Outcome::within(residual, accept, exact).with(json!({ "components": gx.induced.components() })))
        });
    }
    Ok(())
}
