use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use super::cases::{describe, normal_cases, regular_pairs, restriction_models, NormalCase};
use super::{Outcome, Recorder, VerifyConfig};
use crate::aut::{in_image_of_i, lift, phi, restrict_to_components, verify_exact_sequence, AutElement, BlockTuple};
use crate::cocycle::{
    decompose, discrete_cohomologous, extract_multiplicity_cocycles, include, is_compatible, multiplicity_cocycle_residual,
    normalize_transitions, random_gauge, random_normalized_vect, BaseComplex, ComponentAutGroup, EdgeCocycle,
};
use crate::error::{Error, Result};
use crate::group::{catalog, FiniteGroup, GroupHomomorphism};
use crate::linalg;
use crate::model::{subgroup_irreps, CanonicalModel};
use crate::rep::{irreducibles, isotypic_decompose, multiplicity, unitarize, Representation};

const REPRESENTATIONS: &str = "Σ d_k² = |H|, orthonormal character rows, isotypic decomposition of conjugated direct sums";
const CANONICAL_ACTION: &str = "canonical action satisfies the action axioms on G × G × G₀ and every stabilizer equals H";
const EXACT_SEQUENCE: &str = "exact sequence 1 → ∏GL(F_k) → Aut_G(X_ρ) → G₀ → 1";
const OBSTRUCTION: &str = "a translation lifts iff conjugation by it preserves the multiplicities";
const REASSEMBLY: &str = "restriction to isotypic components is injective";
const CLASSIFICATION: &str = "component tuples assemble iff their base translations agree";
const NORMALIZATION: &str = "compatible component cocycles normalize to a common discrete part by a coboundary";
const INCOMPATIBLE: &str = "component cocycles with non-conjugate holonomies are rejected";
const ROUND_TRIP: &str = "decompose ∘ include recovers discrete and vector data up to coboundary";
const COVERING: &str = "covering components equal orbits of the holonomy subgroup";

const CONJUGATED_SUMS: usize = 20;
const EXACT_SAMPLES: usize = 50;
const REASSEMBLY_SAMPLES: usize = 50;
const CLASSIFICATION_SAMPLES: usize = 50;
const NORMALIZATION_SAMPLES: usize = 20;
const INCOMPATIBLE_INSTANCES: usize = 10;
const ROUND_TRIP_INSTANCES: usize = 20;

/// The user case as a normal case, or `None` to use the catalog.
fn user_normal_case(config: &VerifyConfig) -> Result<Option<NormalCase>> {
    let Some(case) = &config.case else { return Ok(None) };
    if !case.group.is_normal(&case.subgroup) {
        return Err(Error::NotNormal(format!("subgroup of order {}", case.subgroup.order())));
    }
    let spec = match &case.spec {
        Some(s) => s.clone(),
        None => regular_pairs(&*subgroup_irreps(&case.group, &case.subgroup)?),
    };
    let c = NormalCase {
        name: describe(&case.group, &case.subgroup),
        group: case.group.clone(),
        subgroup: case.subgroup.clone(),
        spec,
    };
    c.model()?;
    Ok(Some(c))
}

fn cases_or_user(config: &VerifyConfig, catalog: impl FnOnce() -> Result<Vec<NormalCase>>) -> Result<Vec<NormalCase>> {
    match user_normal_case(config)? {
        Some(c) => Ok(vec![c]),
        None => catalog(),
    }
}

pub(super) fn representations<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let groups: Vec<(String, Arc<FiniteGroup>)> = match &config.case {
        Some(c) => vec![
            ("G".to_string(), c.group.clone()),
            (format!("H={}", describe(&c.group, &c.subgroup)), Arc::new(c.subgroup.to_group(&c.group))),
        ],
        None => catalog::all().into_iter().map(|(n, g)| (n.to_string(), Arc::new(g))).collect(),
    };
    let tol = config.tolerance;
    let accept = config.accept();
    for (name, g) in groups {
        let irreps = match irreducibles(&g) {
            Ok(i) => i,
            Err(e) => {
                rec.check(format!("{name}/irreducibles"), REPRESENTATIONS, || Err(e));
                continue;
            }
        };
        rec.check(format!("{name}/degrees"), REPRESENTATIONS, || {
            let sum = irreps.table.sum_of_squared_degrees();
            let hom = irreps.reps.iter().map(|r| r.homomorphism_residual().max(r.unitarity_residual())).fold(0.0, f64::max);
            Ok(Outcome::within(hom, tol, sum == g.order())
                .with(json!({ "degrees": irreps.table.degrees, "sum_of_squares": sum, "order": g.order() })))
        });
        rec.check(format!("{name}/orthonormality"), REPRESENTATIONS, || {
            Ok(Outcome::within(irreps.table.orthonormality_residual(&g), tol, true))
        });
        rec.check(format!("{name}/isotypic"), REPRESENTATIONS, || {
            let mut worst: f64 = 0.0;
            let mut mismatches = 0;
            for i in 0..CONJUGATED_SUMS {
                let mut m: Vec<usize> = (0..irreps.len()).map(|_| rng.random_range(0..3)).collect();
                if m.iter().all(|&x| x == 0) {
                    m[rng.random_range(0..irreps.len())] = 1;
                }
                let parts: Vec<&Representation> =
                    m.iter().enumerate().flat_map(|(k, &mk)| std::iter::repeat_n(&irreps.reps[k], mk)).collect();
                let sum = Representation::direct_sum(&parts)?;
                let n = sum.degree();
                let rep = if i % 2 == 0 {
                    sum.conjugate_by(&linalg::random_unitary(n, rng))?
                } else {
                    let skew = sum.conjugate_by(&linalg::random_invertible(n, rng))?;
                    unitarize(g.clone(), skew.matrices().to_vec())?
                };
                let dec = isotypic_decompose(&rep, &irreps)?;
                if dec.multiplicities(&irreps) != m {
                    mismatches += 1;
                }
                for (k, &mk) in m.iter().enumerate() {
                    if multiplicity(&rep, &irreps, k)?.0 != mk {
                        mismatches += 1;
                    }
                }
                worst = worst.max(dec.round_trip_residual(&rep, &irreps));
            }
            Ok(Outcome::within(worst, accept, mismatches == 0)
                .with(json!({ "sums": CONJUGATED_SUMS, "multiplicity_mismatches": mismatches })))
        });
    }
    Ok(())
}

pub(super) fn canonical_action(config: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    let accept = config.accept();
    for case in cases_or_user(config, normal_cases)? {
        rec.check(case.name.clone(), CANONICAL_ACTION, || {
            let model = case.model()?;
            let residual = model.action_residual();
            let bad: Vec<usize> = (0..model.base_points()).filter(|&p| model.stabilizer(p) != case.subgroup).collect();
            Ok(Outcome::within(residual, accept, bad.is_empty()).with(json!({
                "base_points": model.base_points(),
                "fiber_dim": model.fiber_dim(),
                "wrong_stabilizers": bad,
            })))
        });
    }
    Ok(())
}

/// Whether conjugation by `g` preserves the multiplicities of the fiber
/// representation, decided on characters of the pulled-back representation.
fn conjugation_preserves(model: &CanonicalModel, g: usize) -> Result<bool> {
    let grp = model.group();
    let sub = model.subgroup();
    let hgroup = model.spec().group().clone();
    let fiber = Representation::new(hgroup.clone(), (0..sub.order()).map(|h| model.spec().matrix(h)).collect())?;
    let map = sub
        .elements()
        .iter()
        .map(|&h| sub.local_index(grp.mul(grp.mul(grp.inv(g), h), g)).expect("normal subgroup"))
        .collect();
    let twisted = fiber.pullback(&GroupHomomorphism::new((*hgroup).clone(), (*hgroup).clone(), map)?)?;
    let irreps = model.spec().irreps();
    for (k, &m) in model.spec().multiplicities().iter().enumerate() {
        if multiplicity(&twisted, irreps, k)?.0 != m {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(super) fn exact_sequence<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let accept = config.accept();
    for case in cases_or_user(config, normal_cases)? {
        let model = match case.model() {
            Ok(m) => m,
            Err(e) => {
                rec.check(case.name.clone(), EXACT_SEQUENCE, || Err(e));
                continue;
            }
        };
        let preserving = (0..model.base_points())
            .map(|a| conjugation_preserves(&model, model.cosets().representative(a)))
            .collect::<Result<Vec<bool>>>()?;
        if preserving.iter().all(|&p| p) {
            rec.check(case.name.clone(), EXACT_SEQUENCE, || {
                let report = verify_exact_sequence(&model, EXACT_SAMPLES, rng);
                Ok(Outcome::within(report.max_residual(), accept, report.exact()).with(serde_json::to_value(&report)?))
            });
        } else {
            rec.check(format!("{} obstruction", case.name), OBSTRUCTION, || {
                let report = verify_exact_sequence(&model, EXACT_SAMPLES, rng);
                let mut disagreements = Vec::new();
                let mut obstructed = Vec::new();
                for (a, &preserves) in preserving.iter().enumerate() {
                    let lifted = match lift(&model, a, rng) {
                        Ok(_) => true,
                        Err(Error::NoInvertibleIntertwiner { .. }) => false,
                        Err(e) => return Err(e),
                    };
                    if !lifted {
                        obstructed.push(a);
                    }
                    if lifted != preserves {
                        disagreements.push(a);
                    }
                }
                let residual = report.phi_residual.max(report.kernel_residual).max(report.lift_residual);
                Ok(Outcome::within(residual, accept, report.phi_injective && report.kernel_ok && disagreements.is_empty())
                    .with(json!({
                        "surjective": false,
                        "obstructed_translations": obstructed,
                        "disagreements": disagreements,
                        "phi_injective": report.phi_injective,
                        "kernel_ok": report.kernel_ok,
                    })))
            });
        }
    }
    Ok(())
}

/// A random tuple of component automorphisms over a common translation
/// `a`, each twisted by a random block.
fn compatible_tuple<R: Rng>(group: &ComponentAutGroup, a: usize, rng: &mut R) -> Result<Vec<AutElement>> {
    group
        .components
        .iter()
        .map(|cm| lift(cm, a, rng)?.compose(&phi(cm, &BlockTuple::random(cm, rng))?))
        .collect()
}

fn pick<R: Rng>(elems: &[usize], rng: &mut R) -> usize {
    elems[rng.random_range(0..elems.len())]
}

pub(super) fn component_restriction<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let accept = config.accept();
    let cases = cases_or_user(config, restriction_models)?;
    let mut groups = Vec::new();
    for case in &cases {
        groups.push((case.name.clone(), ComponentAutGroup::new(case.model()?)));
    }

    for (name, group) in &groups {
        rec.check(format!("{name}/reassembly"), REASSEMBLY, || {
            let common = group.common_liftable();
            let mut worst: f64 = 0.0;
            for _ in 0..REASSEMBLY_SAMPLES {
                let a = pick(common.elements(), rng);
                let x = lift(&group.model, a, rng)?.compose(&phi(&group.model, &BlockTuple::random(&group.model, rng))?)?;
                let back = in_image_of_i(&group.model, &restrict_to_components(&x)?)?
                    .ok_or_else(|| Error::PreconditionFailed("restriction did not reassemble".into()))?;
                worst = worst.max(back.distance(&x));
            }
            Ok(Outcome::within(worst, accept, true).with(json!({ "samples": REASSEMBLY_SAMPLES })))
        });
    }

    rec.check("classification", CLASSIFICATION, || {
        let mut worst: f64 = 0.0;
        let mut wrong = 0;
        let mut compatible = 0;
        for i in 0..CLASSIFICATION_SAMPLES {
            let group = &groups[i % groups.len()].1;
            let a = pick(group.common_liftable().elements(), rng);
            let tuple = compatible_tuple(group, a, rng)?;
            match in_image_of_i(&group.model, &tuple)? {
                Some(x) => {
                    let parts = restrict_to_components(&x)?;
                    for (p, t) in parts.iter().zip(&tuple) {
                        worst = worst.max(p.distance(t));
                    }
                }
                None => wrong += 1,
            }
            compatible += 1;
        }
        // factors whose translation can be changed on its own
        let perturbable: Vec<(usize, usize)> = groups
            .iter()
            .enumerate()
            .filter(|(_, (_, g))| g.len() >= 2)
            .flat_map(|(gi, (_, g))| (0..g.len()).filter(|&k| g.liftable[k].order() >= 2).map(move |k| (gi, k)))
            .collect();
        let mut incompatible = 0;
        if !perturbable.is_empty() {
            for i in 0..CLASSIFICATION_SAMPLES {
                let (gi, k) = perturbable[i % perturbable.len()];
                let group = &groups[gi].1;
                let a = pick(group.common_liftable().elements(), rng);
                let mut tuple = compatible_tuple(group, a, rng)?;
                let others: Vec<usize> = group.liftable[k].elements().iter().copied().filter(|&b| b != a).collect();
                let b = pick(&others, rng);
                let cm = &group.components[k];
                tuple[k] = lift(cm, b, rng)?.compose(&phi(cm, &BlockTuple::random(cm, rng))?)?;
                if in_image_of_i(&group.model, &tuple)?.is_some() {
                    wrong += 1;
                }
                incompatible += 1;
            }
        }
        let enough = config.case.is_some() || incompatible == CLASSIFICATION_SAMPLES;
        Ok(Outcome::within(worst, accept, wrong == 0 && enough).with(json!({
            "compatible": compatible,
            "incompatible": incompatible,
            "misclassified": wrong,
        })))
    });
    Ok(())
}

fn complexes() -> Vec<BaseComplex> {
    vec![
        BaseComplex::cycle(3),
        BaseComplex::cycle(4),
        BaseComplex::simplex(3),
        BaseComplex::cycle(5),
        BaseComplex::simplex(4),
        BaseComplex::cycle(6),
        BaseComplex::path(4),
        BaseComplex::simplex(5),
    ]
}

/// Compatible input that is not yet normalized: a normalized cocycle
/// moved by an independent per-factor gauge.
fn gauged_input<R: Rng>(group: &ComponentAutGroup, complex: &BaseComplex, rng: &mut R) -> EdgeCocycle<Vec<AutElement>> {
    let v = random_normalized_vect(group, complex, rng);
    v.apply_coboundary(group, &random_gauge(group, complex.charts(), rng))
}

pub(super) fn normalization<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let accept = config.accept();
    let cases = cases_or_user(config, restriction_models)?;
    let mut groups = Vec::new();
    for case in &cases {
        groups.push((case.name.clone(), ComponentAutGroup::new(case.model()?)));
    }
    let shapes = complexes();

    for (name, group) in &groups {
        rec.check(name.clone(), NORMALIZATION, || {
            let g0 = group.base_group();
            let mut worst: f64 = 0.0;
            let mut delta_failures = 0;
            for i in 0..NORMALIZATION_SAMPLES {
                let v = gauged_input(group, &shapes[i % shapes.len()], rng);
                let n = normalize_transitions(group, &v, rng)?;
                for (lab, &d) in n.cocycle.labels.iter().zip(&n.discrete.labels) {
                    if lab.iter().any(|x| x.a() != d) {
                        delta_failures += 1;
                    }
                }
                for row in &n.witness {
                    if row.iter().zip(&group.liftable).any(|(x, l)| !l.contains(x.a())) {
                        delta_failures += 1;
                    }
                }
                if !n.discrete.validate(g0, 0.0).valid {
                    delta_failures += 1;
                }
                worst = worst
                    .max(v.apply_coboundary(group, &n.witness).distance(group, &n.cocycle))
                    .max(n.cocycle.validate(group, accept).max_residual);
            }
            Ok(Outcome::within(worst, accept, delta_failures == 0)
                .with(json!({ "instances": NORMALIZATION_SAMPLES, "discrete_failures": delta_failures })))
        });
    }

    let eligible: Vec<&ComponentAutGroup> =
        groups.iter().map(|(_, g)| g).filter(|g| g.len() >= 2 && g.liftable[0].order() >= 2).collect();
    if eligible.is_empty() {
        return Ok(());
    }
    rec.check("incompatible", INCOMPATIBLE, || {
        let mut rejected = 0;
        for i in 0..INCOMPATIBLE_INSTANCES {
            let group = eligible[i % eligible.len()];
            let complex = BaseComplex::cycle(3 + i % 4);
            let others = &group.liftable[0].elements()[1..];
            let b = others[i % others.len()];
            let identity_like = |rng: &mut R| -> Result<Vec<AutElement>> {
                group.components.iter().map(|cm| phi(cm, &BlockTuple::random(cm, rng))).collect()
            };
            let mut labels = Vec::new();
            for e in 0..complex.edges().len() {
                let mut lab = identity_like(rng)?;
                if e == 0 {
                    let cm = &group.components[0];
                    lab[0] = lift(cm, b, rng)?.compose(&lab[0])?;
                }
                labels.push(lab);
            }
            let v = EdgeCocycle::new(complex.clone(), labels)?.apply_coboundary(group, &random_gauge(group, complex.charts(), rng));
            let flagged = matches!(normalize_transitions(group, &v, rng), Err(Error::NotCompatible(_)));
            if flagged && !is_compatible(group, &v) {
                rejected += 1;
            }
        }
        Ok(Outcome::new(rejected == INCOMPATIBLE_INSTANCES, 0.0)
            .with(json!({ "instances": INCOMPATIBLE_INSTANCES, "rejected": rejected })))
    });
    Ok(())
}

/// Components of the covering counted as orbits of right multiplication by
/// the holonomy subgroup on `G₀`, one count per component of the base.
fn orbit_count(g0: &FiniteGroup, discrete: &EdgeCocycle<usize>) -> usize {
    let complex = &discrete.complex;
    let comp = complex.components();
    let forest = complex.spanning_forest();
    let hol = discrete.holonomies(g0);
    let nontree: Vec<usize> =
        complex.edges().iter().zip(&forest.tree).filter(|(_, &t)| !t).map(|(&[a, _], _)| comp[a]).collect();
    let ncomp = comp.iter().max().map_or(0, |m| m + 1);
    let mut total = 0;
    for k in 0..ncomp {
        let gens: Vec<usize> = hol.iter().zip(&nontree).filter(|(_, &c)| c == k).map(|(&h, _)| h).collect();
        let mut seen = vec![false; g0.order()];
        for start in 0..g0.order() {
            if seen[start] {
                continue;
            }
            total += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                for &h in &gens {
                    let y = g0.mul(x, h);
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
    }
    total
}

pub(super) fn cocycle_round_trip<R: Rng>(config: &VerifyConfig, rec: &mut Recorder, rng: &mut R) -> Result<()> {
    let accept = config.accept();
    let cases = cases_or_user(config, restriction_models)?;
    let mut groups = Vec::new();
    for case in &cases {
        groups.push((case.name.clone(), ComponentAutGroup::new(case.model()?)));
    }
    let shapes = complexes();
    for i in 0..ROUND_TRIP_INSTANCES {
        let (name, group) = &groups[i % groups.len()];
        let complex = &shapes[(i / groups.len() + i) % shapes.len()];
        let v = gauged_input(group, complex, rng);
        let g0 = group.base_group();
        let run = include(group, &v, rng).and_then(|(b, n)| Ok((decompose(&group.model, &b)?, n)));
        let (d, n) = match run {
            Ok(x) => x,
            Err(e) => {
                rec.check(format!("{name} #{i}"), ROUND_TRIP, || Err(e));
                continue;
            }
        };
        rec.check(format!("{name} #{i}"), ROUND_TRIP, || {
            let discrete_in = v.map(|l| l[0].a());
            let discrete_ok = discrete_cohomologous(g0, &discrete_in, &d.discrete).is_some();
            let vector = d.vect.distance(group, &n.cocycle);
            let cocycles = extract_multiplicity_cocycles(group, &d.vect, &d.covering)?;
            let extracted = multiplicity_cocycle_residual(group, &cocycles);
            Ok(Outcome::within(vector.max(extracted), accept, discrete_ok).with(json!({
                "charts": complex.charts(),
                "discrete_cohomologous": discrete_ok,
                "vector_residual": vector,
                "multiplicity_cocycle_residual": extracted,
            })))
        });
        rec.check(format!("{name} #{i} covering"), COVERING, || {
            let expected = orbit_count(g0, &d.discrete);
            Ok(Outcome::new(d.covering.components == expected && d.covering.deck_action_is_free(g0), 0.0)
                .with(json!({ "components": d.covering.components, "orbits": expected })))
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_count_of_a_cycle() {
        let g = catalog::z4();
        let c = EdgeCocycle::new(BaseComplex::cycle(3), vec![2, 0, 0]).unwrap();
        assert_eq!(orbit_count(&g, &c), 2);
        let t = EdgeCocycle::new(BaseComplex::cycle(3), vec![1, 0, 0]).unwrap();
        assert_eq!(orbit_count(&g, &t), 1);
        let path = EdgeCocycle::new(BaseComplex::path(3), vec![1, 3]).unwrap();
        assert_eq!(orbit_count(&g, &path), 4);
    }

    #[test]
    fn conjugation_oracle_on_s3() {
        let g = Arc::new(catalog::s3());
        let a3 = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        let irreps = subgroup_irreps(&g, &a3).unwrap();
        let single = crate::model::build_model(g.clone(), a3.clone(), &[(1, 1)]).unwrap();
        let both = crate::model::build_model(g.clone(), a3.clone(), &regular_pairs(&irreps)).unwrap();
        let t = g.find("(1 2)").unwrap();
        assert!(!conjugation_preserves(&single, t).unwrap());
        assert!(conjugation_preserves(&both, t).unwrap());
        assert!(conjugation_preserves(&single, 0).unwrap());
    }
}
