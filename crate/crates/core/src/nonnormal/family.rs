use serde::Serialize;

use super::{BundleMap, EquivariantBundle, FiniteGSpace, IsomorphismCheck};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupHomomorphism, Subgroup, DEFAULT_SUBGROUP_BOUND};

/// Subgroups with a fixed point in the total space, which (zero vectors
/// counting) are those fixing some base point.
#[derive(Debug, Clone)]
pub struct SubgroupFamily {
    pub members: Vec<Subgroup>,
}

impl SubgroupFamily {
    pub fn contains(&self, k: &Subgroup) -> bool {
        self.members.contains(k)
    }

    /// Members not properly contained in another member.
    pub fn maximal(&self) -> Vec<Subgroup> {
        self.members
            .iter()
            .filter(|k| !self.members.iter().any(|l| l.order() > k.order() && k.is_subgroup_of(l)))
            .cloned()
            .collect()
    }

    pub fn is_conjugation_closed(&self, group: &FiniteGroup) -> bool {
        self.members.iter().all(|k| (0..group.order()).all(|g| self.contains(&group.conjugate_subgroup(g, k))))
    }
}

pub fn family_of_subgroups(space: &FiniteGSpace) -> Result<SubgroupFamily> {
    let members = space
        .group()
        .all_subgroups(DEFAULT_SUBGROUP_BOUND)?
        .into_iter()
        .filter(|k| !space.fixed_points(k).is_empty())
        .collect();
    Ok(SubgroupFamily { members })
}

/// The distinct conjugates `gHg⁻¹`.
fn conjugates(group: &FiniteGroup, h: &Subgroup) -> Vec<Subgroup> {
    group.conjugation_classes_of(h).into_iter().map(|(_, k)| k).collect()
}

/// Whether the conjugates of `H` are exactly the maximal members of the family.
pub fn check_unique_maximal(space: &FiniteGSpace, h: &Subgroup) -> Result<bool> {
    let family = family_of_subgroups(space)?;
    let mut maximal = family.maximal();
    let mut expected = conjugates(space.group(), h);
    maximal.sort();
    expected.sort();
    Ok(maximal == expected)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    /// Points lying in no `M^{gHg⁻¹}`.
    pub uncovered: Vec<usize>,
    pub covers: bool,
}

/// `M = ∪_{[g] ∈ G/N(H)} M^{gHg⁻¹}`.
pub fn check_fixconjugate(space: &FiniteGSpace, h: &Subgroup) -> CoverageReport {
    let mut hit = vec![false; space.points()];
    for k in conjugates(space.group(), h) {
        for p in space.fixed_points(&k) {
            hit[p] = true;
        }
    }
    let uncovered: Vec<usize> = (0..space.points()).filter(|&p| !hit[p]).collect();
    CoverageReport { covers: uncovered.is_empty(), uncovered }
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointnessReport {
    /// `(i, j, p)`: point `p` fixed by the `i`-th and `j`-th conjugates.
    pub overlaps: Vec<(usize, usize, usize)>,
    pub disjoint: bool,
}

/// `M^{gHg⁻¹} ∩ M^{lHl⁻¹} = ∅` for distinct conjugates.
pub fn verify_disjointness(space: &FiniteGSpace, h: &Subgroup) -> DisjointnessReport {
    let sets: Vec<Vec<usize>> = conjugates(space.group(), h).iter().map(|k| space.fixed_points(k)).collect();
    let mut overlaps = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            for p in &sets[i] {
                if sets[j].contains(p) {
                    overlaps.push((i, j, *p));
                }
            }
        }
    }
    DisjointnessReport { disjoint: overlaps.is_empty(), overlaps }
}

/// One `ξ_{[g]}` of [`decompose_bundle`].
#[derive(Debug, Clone)]
pub struct BundleComponent {
    /// Smallest element of the coset `gN(H)`.
    pub representative: usize,
    pub conjugate: Subgroup,
    pub normalizer: Subgroup,
    /// Base points of `ξ` over `M^{gHg⁻¹}`, sorted.
    pub points: Vec<usize>,
    /// `ξ_{[g]}` with the action of `N(gHg⁻¹)` in its local numbering.
    pub bundle: EquivariantBundle,
    /// The action of `g`, from `ξ_{[1]}` to `ξ_{[g]}`.
    pub witness: BundleMap,
    /// `s_g(n) = gng⁻¹`.
    pub conjugation: GroupHomomorphism,
}

impl BundleComponent {
    /// `g·(n·x) = s_g(n)·(g·x)` against the first component.
    pub fn check_witness(&self, first: &BundleComponent) -> IsomorphismCheck {
        self.witness.check_along(&first.bundle, &self.bundle, &self.conjugation.map)
    }
}

/// `N(gHg⁻¹)/gHg⁻¹` acts freely on the base of a component: every
/// stabilizer is exactly `gHg⁻¹`.
pub fn is_quasi_free(component: &BundleComponent) -> bool {
    let local = component.conjugate.relative_to(&component.normalizer).expect("conjugate inside its normalizer");
    let base = component.bundle.base();
    (0..base.points()).all(|p| base.stabilizer(p) == local)
}

/// `ξ = ⊔_{[g] ∈ G/N(H)} ξ_{[g]}` with the equivariant isomorphisms
/// `ξ_{[1]} → ξ_{[g]}` given by the action of `g`.
pub fn decompose_bundle(xi: &EquivariantBundle, h: &Subgroup) -> Result<Vec<BundleComponent>> {
    let space = xi.base();
    let g = space.group();
    let coverage = check_fixconjugate(space, h);
    if !coverage.covers {
        return Err(Error::PreconditionFailed(format!(
            "{} base points are fixed by no conjugate of the stationary subgroup",
            coverage.uncovered.len()
        )));
    }
    if !check_unique_maximal(space, h)? {
        return Err(Error::PreconditionFailed("the stationary subgroup is not the unique maximal isotropy class".into()));
    }
    let classes = g.conjugation_classes_of(h);
    let first_points = space.fixed_points(h);
    let mut out = Vec::with_capacity(classes.len());
    for (rep, conj) in classes {
        let normalizer = g.normalizer(&conj);
        let points = space.fixed_points(&conj);
        let bundle = xi.restrict(&normalizer, &points)?;
        let point_map = first_points
            .iter()
            .map(|&p| points.iter().position(|&q| q == space.act(rep, p)).expect("g maps M^H onto M^{gHg⁻¹}"))
            .collect();
        let matrices = first_points.iter().map(|&p| xi.map(rep, p).clone()).collect();
        out.push(BundleComponent {
            representative: rep,
            conjugation: g.conjugation_homomorphism(rep, h),
            conjugate: conj,
            normalizer,
            points,
            bundle,
            witness: BundleMap { point_map, matrices },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use std::sync::Arc;

    fn s3_triple() -> (Arc<FiniteGroup>, Subgroup, FiniteGSpace) {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2)").unwrap()]);
        let m = FiniteGSpace::cosets(g.clone(), &h);
        (g, h, m)
    }

    #[test]
    fn conjugate_triple_is_covered_disjointly() {
        let (_, h, m) = s3_triple();
        assert!(check_fixconjugate(&m, &h).covers);
        assert!(verify_disjointness(&m, &h).disjoint);
        assert!(check_unique_maximal(&m, &h).unwrap());
        let fam = family_of_subgroups(&m).unwrap();
        assert_eq!(fam.members.len(), 4);
        assert!(fam.is_conjugation_closed(m.group()));
    }

    #[test]
    fn normal_subgroup_has_a_single_term() {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        let m = FiniteGSpace::cosets(g.clone(), &h);
        assert_eq!(g.conjugation_classes_of(&h).len(), 1);
        assert!(verify_disjointness(&m, &h).disjoint);
        assert!(check_fixconjugate(&m, &h).covers);
    }

    #[test]
    fn whole_group_on_a_point_is_unique_maximal() {
        let g = Arc::new(catalog::a4());
        let p = FiniteGSpace::point(g.clone());
        assert!(check_unique_maximal(&p, &Subgroup::whole(&g)).unwrap());
    }

    #[test]
    fn an_extra_fixed_point_breaks_maximality_and_disjointness() {
        let (g, h, m) = s3_triple();
        let bigger = m.disjoint_union(&FiniteGSpace::point(g.clone())).unwrap();
        assert!(!check_unique_maximal(&bigger, &h).unwrap());
        assert!(family_of_subgroups(&bigger).unwrap().contains(&Subgroup::whole(&g)));
        let report = verify_disjointness(&bigger, &h);
        assert_eq!(report.overlaps.len(), 3);
        assert!(report.overlaps.iter().all(|o| o.2 == 3));
    }

    #[test]
    fn decomposition_of_the_triple() {
        let (g, h, m) = s3_triple();
        let action: Vec<Vec<crate::linalg::CMat>> =
            (0..g.order()).map(|_| vec![crate::linalg::eye(1); 3]).collect();
        let xi = EquivariantBundle::new(m, action).unwrap();
        let comps = decompose_bundle(&xi, &h).unwrap();
        assert_eq!(comps.len(), 3);
        let mut seen: Vec<usize> = comps.iter().flat_map(|c| c.points.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2]);
        for c in &comps {
            assert!(c.check_witness(&comps[0]).holds(1e-12));
            assert!(is_quasi_free(c));
        }
    }
}
