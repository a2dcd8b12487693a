use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::{decompose_bundle, is_quasi_free, random_automorphism, BundleMap, EquivariantBundle, IsomorphismCheck};
use crate::aut::{random_element, AutElement};
use crate::error::{Error, Result};
use crate::group::{CosetDecomposition, FiniteGroup, Subgroup};
use crate::linalg::{self, eye, CMat};
use crate::model::{CanonicalModel, RepSpec};
use crate::tolerance;

/// `G ×_{N(H)} ζ` for an `N(H)`-bundle `ζ`: one copy of `ζ` per coset
/// `t_c N(H)`, point `(c, p)` stored at `c·|ζ| + p`.
///
/// `g·(c, p) = (c', n·p)` with `g t_c = t_{c'} n`, acting on fibers by `ζ(n, p)`.
#[derive(Debug, Clone)]
pub struct InducedBundle {
    pub group: Arc<FiniteGroup>,
    pub stationary: Subgroup,
    pub normalizer: Subgroup,
    pub cosets: CosetDecomposition,
    pub inner: EquivariantBundle,
    pub bundle: EquivariantBundle,
}

impl InducedBundle {
    pub fn inner_points(&self) -> usize {
        self.inner.base().points()
    }

    pub fn components(&self) -> usize {
        self.cosets.len()
    }

    pub fn point(&self, c: usize, p: usize) -> usize {
        c * self.inner_points() + p
    }

    /// `(c, p)` of a point.
    pub fn split(&self, x: usize) -> (usize, usize) {
        (x / self.inner_points(), x % self.inner_points())
    }

    pub fn component_points(&self, c: usize) -> std::ops::Range<usize> {
        self.point(c, 0)..self.point(c + 1, 0)
    }
}

fn check_inner(group: &FiniteGroup, h: &Subgroup, zeta: &EquivariantBundle) -> Result<(Subgroup, Subgroup)> {
    let n = group.normalizer(h);
    if zeta.group().table() != n.to_group(group).table() {
        return Err(Error::ModelMismatch);
    }
    let local = h.relative_to(&n).expect("H inside its normalizer");
    let base = zeta.base();
    if let Some(p) = (0..base.points()).find(|&p| base.stabilizer(p) != local) {
        return Err(Error::PreconditionFailed(format!("stabilizer of point {p} differs from the stationary subgroup")));
    }
    Ok((n, local))
}

/// Induces a quasi-free `N(H)`-bundle with stationary subgroup `H` up to `G`.
pub fn induce(group: Arc<FiniteGroup>, h: &Subgroup, zeta: &EquivariantBundle) -> Result<InducedBundle> {
    let (normalizer, _) = check_inner(&group, h, zeta)?;
    let cosets = group.coset_decomposition(&normalizer);
    let np = zeta.base().points();
    let mut action = Vec::with_capacity(group.order());
    let mut maps = Vec::with_capacity(group.order());
    for g in 0..group.order() {
        let mut row = Vec::with_capacity(cosets.len() * np);
        let mut mats = Vec::with_capacity(cosets.len() * np);
        for c in 0..cosets.len() {
            let moved = group.mul(g, cosets.representative(c));
            let c2 = cosets.coset_of(moved);
            let n = normalizer.local_index(cosets.h_part(&group, moved)).expect("coset element");
            for p in 0..np {
                row.push(c2 * np + zeta.base().act(n, p));
                mats.push(zeta.map(n, p).clone());
            }
        }
        action.push(row);
        maps.push(mats);
    }
    let base = super::FiniteGSpace::new(group.clone(), action)?;
    let bundle = EquivariantBundle::new(base, maps)?;
    Ok(InducedBundle { group, stationary: h.clone(), normalizer, cosets, inner: zeta.clone(), bundle })
}

/// `ξ_{[1]}`: the part of `ξ` over `M^H` with its `N(H)`-action.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub points: Vec<usize>,
    pub bundle: EquivariantBundle,
}

pub fn reduce(xi: &EquivariantBundle, h: &Subgroup) -> Result<Reduction> {
    let mut comps = decompose_bundle(xi, h)?;
    let first = comps.swap_remove(0);
    if !is_quasi_free(&first) {
        return Err(Error::PreconditionFailed("N(H)/H does not act freely on the fixed set of H".into()));
    }
    Ok(Reduction { points: first.points, bundle: first.bundle })
}

/// Isomorphism `induce(reduce ξ) → ξ`: `(c, i) ↦ t_c·x_i`.
pub fn induce_reduce_witness(xi: &EquivariantBundle, red: &Reduction, ind: &InducedBundle) -> BundleMap {
    let space = xi.base();
    let mut point_map = Vec::new();
    let mut matrices = Vec::new();
    for c in 0..ind.components() {
        let t = ind.cosets.representative(c);
        for &x in &red.points {
            point_map.push(space.act(t, x));
            matrices.push(xi.map(t, x).clone());
        }
    }
    BundleMap { point_map, matrices }
}

/// Isomorphism `reduce(induce ζ) → ζ`, the identity on the `[1]` copy.
pub fn reduce_induce_witness(red: &Reduction, ind: &InducedBundle) -> Result<BundleMap> {
    let np = ind.inner_points();
    if red.points.len() != np || red.points.iter().any(|&x| x >= np) {
        return Err(Error::PreconditionFailed("fixed set of H is not the first copy".into()));
    }
    Ok(BundleMap {
        point_map: red.points.clone(),
        matrices: red.points.iter().map(|&x| eye(ind.inner.dim(x))).collect(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RoundTripCheck {
    pub base_exact: bool,
    pub fiber_residual: f64,
}

impl From<IsomorphismCheck> for RoundTripCheck {
    fn from(c: IsomorphismCheck) -> Self {
        let fiber_residual = if c.min_singular > tolerance::INVERTIBLE { c.fiber_residual } else { f64::INFINITY };
        RoundTripCheck { base_exact: c.base_exact, fiber_residual }
    }
}

/// `induce(reduce ξ) ≅ ξ`.
pub fn round_trip_from_g(xi: &EquivariantBundle, h: &Subgroup) -> Result<RoundTripCheck> {
    let red = reduce(xi, h)?;
    let ind = induce(xi.group().clone(), h, &red.bundle)?;
    Ok(induce_reduce_witness(xi, &red, &ind).check(&ind.bundle, xi).into())
}

/// `reduce(induce ζ) ≅ ζ`.
pub fn round_trip_from_n(group: Arc<FiniteGroup>, h: &Subgroup, zeta: &EquivariantBundle) -> Result<RoundTripCheck> {
    let ind = induce(group, h, zeta)?;
    let red = reduce(&ind.bundle, h)?;
    Ok(reduce_induce_witness(&red, &ind)?.check(&red.bundle, zeta).into())
}

/// `GX(ρ)`: the canonical model `X(ρ)` of `(N(H), H)` induced up to `G`.
#[derive(Debug, Clone)]
pub struct GXModel {
    pub inner: Arc<CanonicalModel>,
    pub induced: InducedBundle,
}

/// `spec` is over `H` as a group in its own right.
pub fn build_gx(group: Arc<FiniteGroup>, h: &Subgroup, spec: RepSpec) -> Result<GXModel> {
    let normalizer = group.normalizer(h);
    let local = h.relative_to(&normalizer).expect("H inside its normalizer");
    let inner = Arc::new(CanonicalModel::build(Arc::new(normalizer.to_group(&group)), local, spec)?);
    let induced = induce(group, h, &EquivariantBundle::from_model(&inner))?;
    Ok(GXModel { inner, induced })
}

impl GXModel {
    pub fn bundle(&self) -> &EquivariantBundle {
        &self.induced.bundle
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.induced.group
    }

    /// Defect of the component identifications: for every `l`, acting by `l`
    /// on the `[1]` copy equals the canonical translation by `t_c⁻¹l ∈ N(H)`
    /// followed by the identification of the `[1]` copy with copy `c`.
    pub fn identification_residual(&self) -> f64 {
        let ind = &self.induced;
        let g = &ind.group;
        let mut worst: f64 = 0.0;
        for l in 0..g.order() {
            let c = ind.cosets.coset_of(l);
            let n = ind.normalizer.local_index(g.mul(g.inv(ind.cosets.representative(c)), l)).unwrap();
            for b in 0..ind.inner_points() {
                let (target, m) = self.inner.act(n, b);
                if ind.bundle.base().act(l, ind.point(0, b)) != ind.point(c, target) {
                    return f64::INFINITY;
                }
                worst = worst.max(linalg::max_diff(ind.bundle.map(l, ind.point(0, b)), &m));
            }
        }
        worst
    }

    /// `Aut_{N(H)}(X(ρ)) → Aut_G(GX(ρ))`: the same fiber maps on every copy.
    pub fn extend(&self, a: &AutElement) -> Result<BundleMap> {
        if !a.model().same_as(&self.inner) {
            return Err(Error::ModelMismatch);
        }
        let ind = &self.induced;
        let mut point_map = Vec::new();
        let mut matrices = Vec::new();
        for c in 0..ind.components() {
            for b in 0..ind.inner_points() {
                point_map.push(ind.point(c, a.target(b)));
                matrices.push(a.map(b).clone());
            }
        }
        Ok(BundleMap { point_map, matrices })
    }

    /// `Aut_G(GX(ρ)) → Aut_{N(H)}(X(ρ))`: the maps over the `[1]` copy.
    pub fn restrict(&self, f: &BundleMap) -> Result<AutElement> {
        let ind = &self.induced;
        let np = ind.inner_points();
        if f.point_map.len() != ind.bundle.base().points() {
            return Err(Error::ModelMismatch);
        }
        let image = f.point_map[0];
        if image >= np {
            return Err(Error::PreconditionFailed("map does not preserve the fixed set of H".into()));
        }
        let a = self.inner.base_group().inv(image);
        let el = AutElement::new(self.inner.clone(), a, f.matrices[..np].to_vec())?;
        if (0..np).any(|b| f.point_map[b] != el.target(b)) {
            return Err(Error::PreconditionFailed("map is not a translation on the fixed set of H".into()));
        }
        Ok(el)
    }

    /// `g A g⁻¹` on copy `[g]`, in the local numbering of that copy.
    pub fn transport(&self, a: &AutElement, g: usize) -> Result<BundleMap> {
        if !a.model().same_as(&self.inner) {
            return Err(Error::ModelMismatch);
        }
        let ind = &self.induced;
        let grp = &ind.group;
        let base = ind.bundle.base();
        let c = ind.cosets.coset_of(g);
        let ginv = grp.inv(g);
        let mut point_map = Vec::new();
        let mut matrices = Vec::new();
        for x in ind.component_points(c) {
            let (c0, b) = ind.split(base.act(ginv, x));
            debug_assert_eq!(c0, 0);
            let moved = ind.point(0, a.target(b));
            point_map.push(ind.split(base.act(g, moved)).1);
            matrices.push(ind.bundle.map(g, moved) * a.map(b) * ind.bundle.map(ginv, x));
        }
        Ok(BundleMap { point_map, matrices })
    }
}

/// Per-copy outcome of [`verify_fixed_set_identity`].
#[derive(Debug, Clone, Serialize)]
pub struct FixedSetRow {
    pub coset: usize,
    pub representative: usize,
    pub expected: Vec<usize>,
    pub found: Vec<usize>,
    pub max_fixed_fiber_dim: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedSetReport {
    pub rows: Vec<FixedSetRow>,
    pub normalizer_preserves: bool,
    pub pass: bool,
}

/// `(GX(ρ))^{gHg⁻¹}` is exactly copy `[g]` with no nonzero fixed vectors,
/// and `N(H)` maps copy `[1]` to itself.
pub fn verify_fixed_set_identity(gx: &GXModel) -> FixedSetReport {
    let ind = &gx.induced;
    let grp = &ind.group;
    let rows: Vec<FixedSetRow> = (0..ind.components())
        .map(|c| {
            let t = ind.cosets.representative(c);
            let fixed = ind.bundle.fixed_points(&grp.conjugate_subgroup(t, &ind.stationary));
            let found: Vec<usize> = fixed.iter().map(|f| f.0).collect();
            let expected: Vec<usize> = ind.component_points(c).collect();
            let max_fixed_fiber_dim = fixed.iter().map(|f| f.1).max().unwrap_or(0);
            FixedSetRow { coset: c, representative: t, equal: found == expected && max_fixed_fiber_dim == 0, expected, found, max_fixed_fiber_dim }
        })
        .collect();
    let base = ind.bundle.base();
    let normalizer_preserves = ind
        .normalizer
        .elements()
        .iter()
        .all(|&n| ind.component_points(0).all(|x| base.act(n, x) < ind.inner_points()));
    let pass = normalizer_preserves && rows.iter().all(|r| r.equal);
    FixedSetReport { rows, normalizer_preserves, pass }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AutIsomorphismReport {
    pub samples: usize,
    /// `restrict ∘ extend = id` on sampled `Aut_{N(H)}(X(ρ))`.
    pub restrict_extend: f64,
    /// `extend ∘ restrict = id` on sampled `Aut_G(GX(ρ))`.
    pub extend_restrict: f64,
    /// Equivariance defect of extended elements.
    pub extension_equivariance: f64,
    pub homomorphism: f64,
    /// Largest disagreement of `lAl⁻¹` over representatives `l` of a coset,
    /// including the extension itself.
    pub representative: f64,
}

impl AutIsomorphismReport {
    pub fn max_residual(&self) -> f64 {
        self.restrict_extend
            .max(self.extend_restrict)
            .max(self.extension_equivariance)
            .max(self.homomorphism)
            .max(self.representative)
    }
}

fn component_slice(f: &BundleMap, ind: &InducedBundle, c: usize) -> BundleMap {
    let r = ind.component_points(c);
    let np = ind.inner_points();
    BundleMap {
        point_map: f.point_map[r.clone()].iter().map(|&x| x % np).collect(),
        matrices: f.matrices[r].to_vec(),
    }
}

pub fn verify_aut_isomorphism<R: Rng + ?Sized>(gx: &GXModel, samples: usize, rng: &mut R) -> Result<AutIsomorphismReport> {
    let ind = &gx.induced;
    let bundle = &ind.bundle;
    let mut r = AutIsomorphismReport {
        samples,
        restrict_extend: 0.0,
        extend_restrict: 0.0,
        extension_equivariance: 0.0,
        homomorphism: 0.0,
        representative: 0.0,
    };
    for _ in 0..samples {
        let a = random_element(&gx.inner, rng);
        let e = gx.extend(&a)?;
        let chk = e.check(bundle, bundle);
        r.extension_equivariance = r.extension_equivariance.max(if chk.base_exact { chk.fiber_residual } else { f64::INFINITY });
        r.restrict_extend = r.restrict_extend.max(gx.restrict(&e)?.distance(&a));
        for l in 0..ind.group.order() {
            let c = ind.cosets.coset_of(l);
            let t = gx.transport(&a, l)?;
            r.representative = r.representative.max(t.distance(&component_slice(&e, ind, c)));
        }

        let f1 = random_automorphism(bundle, rng)?;
        let f2 = random_automorphism(bundle, rng)?;
        r.extend_restrict = r.extend_restrict.max(gx.extend(&gx.restrict(&f1)?)?.distance(&f1));
        let lhs = gx.restrict(&f1.compose(&f2))?;
        let rhs = gx.restrict(&f1)?.compose(&gx.restrict(&f2)?)?;
        r.homomorphism = r.homomorphism.max(lhs.distance(&rhs));
    }
    Ok(r)
}

/// Fiber matrices of `GX(ρ)` acting on the `[1]` copy by the normalizer,
/// read back as a canonical action; used to compare with `X(ρ)` directly.
pub fn first_copy_action(gx: &GXModel, n_local: usize, b: usize) -> (usize, CMat) {
    let ind = &gx.induced;
    let n = ind.normalizer.elements()[n_local];
    let x = ind.point(0, b);
    (ind.bundle.base().act(n, x), ind.bundle.map(n, x).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use crate::model::subgroup_irreps;
    use crate::nonnormal::{check_fixconjugate, check_unique_maximal, nonnormal_catalog, verify_disjointness, FiniteGSpace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn regular_gx(group: &Arc<FiniteGroup>, h: &Subgroup) -> GXModel {
        let spec = RepSpec::regular(subgroup_irreps(group, h).unwrap()).unwrap();
        build_gx(group.clone(), h, spec).unwrap()
    }

    #[test]
    fn sign_representation_over_a_transposition() {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2)").unwrap()]);
        let gx = regular_gx(&g, &h);
        assert_eq!(gx.induced.components(), 3);
        assert_eq!(gx.induced.inner_points(), 1);
        assert_eq!(gx.bundle().dim(0), 1);
        let fixed = gx.bundle().fixed_points(&h);
        assert_eq!(fixed, vec![(0, 0)]);
        let other = g.subgroup_closure(&[g.find("(1 3)").unwrap()]);
        let fixed_other = gx.bundle().fixed_points(&other);
        assert_eq!(fixed_other.len(), 1);
        assert_ne!(gx.induced.split(fixed_other[0].0).0, 0);
    }

    #[test]
    fn normal_subgroup_gives_the_canonical_model() {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        let gx = regular_gx(&g, &h);
        assert_eq!(gx.induced.components(), 1);
        let direct = EquivariantBundle::from_model(&crate::model::build_model(g.clone(), h.clone(), &[(1, 1), (2, 1)]).unwrap());
        assert!(BundleMap::identity(&direct).check(&direct, gx.bundle()).holds(1e-12));
        assert!(round_trip_from_g(gx.bundle(), &h).unwrap().fiber_residual < 1e-12);
    }

    #[test]
    fn reflection_in_d4_fixes_two_points() {
        let g = Arc::new(catalog::d4());
        let h = g.subgroup_closure(&[g.find("(2 4)").unwrap()]);
        let gx = regular_gx(&g, &h);
        assert_eq!(gx.bundle().base().fixed_points(&h), vec![0, 1]);
        let fam = crate::nonnormal::family_of_subgroups(gx.bundle().base()).unwrap();
        let mut maximal = fam.maximal();
        maximal.sort();
        let mut conj: Vec<Subgroup> = g.conjugation_classes_of(&h).into_iter().map(|x| x.1).collect();
        conj.sort();
        assert_eq!(maximal, conj);
    }

    #[test]
    fn catalog_instances_satisfy_the_fixed_set_identity() {
        for inst in nonnormal_catalog() {
            let gx = regular_gx(&inst.group, &inst.subgroup);
            let n = inst.group.normalizer(&inst.subgroup);
            assert_eq!(gx.induced.components(), inst.group.order() / n.order(), "{}", inst.name);
            assert!(gx.bundle().action_residual() < 1e-9, "{}", inst.name);
            assert!(gx.bundle().base().is_transitive());
            assert!(gx.identification_residual() < 1e-12);
            assert!(verify_fixed_set_identity(&gx).pass, "{}", inst.name);
            let base = gx.bundle().base();
            assert!(check_unique_maximal(base, &inst.subgroup).unwrap());
            assert!(check_fixconjugate(base, &inst.subgroup).covers);
            assert!(verify_disjointness(base, &inst.subgroup).disjoint);
        }
    }

    #[test]
    fn first_copy_reproduces_the_inner_model() {
        for inst in nonnormal_catalog() {
            let gx = regular_gx(&inst.group, &inst.subgroup);
            for n in 0..gx.inner.group().order() {
                for b in 0..gx.inner.base_points() {
                    let (t, m) = first_copy_action(&gx, n, b);
                    let (t2, m2) = gx.inner.act(n, b);
                    assert_eq!(t, t2);
                    assert!(linalg::max_diff(&m, &m2) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn base_is_the_coset_space_of_h() {
        for inst in nonnormal_catalog() {
            let gx = regular_gx(&inst.group, &inst.subgroup);
            let g = &inst.group;
            let gh = FiniteGSpace::cosets(g.clone(), &inst.subgroup);
            let dec = g.coset_decomposition(&inst.subgroup);
            let inner_dec = gx.inner.cosets();
            let ind = &gx.induced;
            let map: Vec<usize> = (0..ind.bundle.base().points())
                .map(|x| {
                    let (c, b) = ind.split(x);
                    let s = ind.normalizer.elements()[inner_dec.representative(b)];
                    dec.coset_of(g.mul(ind.cosets.representative(c), s))
                })
                .collect();
            for el in 0..g.order() {
                for x in 0..map.len() {
                    assert_eq!(map[ind.bundle.base().act(el, x)], gh.act(el, map[x]));
                }
            }
        }
    }

    #[test]
    fn round_trips_on_the_catalog() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for inst in nonnormal_catalog() {
            let gx = regular_gx(&inst.group, &inst.subgroup);
            let r = round_trip_from_g(gx.bundle(), &inst.subgroup).unwrap();
            assert!(r.base_exact && r.fiber_residual < 1e-9, "{}", inst.name);
            let np = gx.inner.base_points();
            let t: Vec<CMat> = (0..np).map(|_| linalg::random_invertible(gx.inner.fiber_dim(), &mut rng)).collect();
            let (zeta, _) = EquivariantBundle::from_model(&gx.inner).gauge(&t).unwrap();
            let r = round_trip_from_n(inst.group.clone(), &inst.subgroup, &zeta).unwrap();
            assert!(r.base_exact && r.fiber_residual < 1e-9, "{}", inst.name);
        }
    }

    #[test]
    fn decomposition_witnesses_conjugate_the_action() {
        for inst in nonnormal_catalog() {
            let gx = regular_gx(&inst.group, &inst.subgroup);
            let comps = decompose_bundle(gx.bundle(), &inst.subgroup).unwrap();
            assert_eq!(comps.len(), gx.induced.components());
            for c in &comps {
                assert!(c.check_witness(&comps[0]).holds(1e-9), "{}", inst.name);
                assert!(is_quasi_free(c));
            }
        }
    }

    #[test]
    fn aut_groups_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for inst in nonnormal_catalog() {
            let gx = regular_gx(&inst.group, &inst.subgroup);
            let id = AutElement::identity(gx.inner.clone());
            assert!(gx.extend(&id).unwrap().distance(&BundleMap::identity(gx.bundle())) == 0.0);
            let r = verify_aut_isomorphism(&gx, 4, &mut rng).unwrap();
            assert!(r.max_residual() < 1e-7, "{}: {r:?}", inst.name);
        }
    }

    #[test]
    fn block_elements_extend_blockwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let inst = &nonnormal_catalog()[1];
        let gx = regular_gx(&inst.group, &inst.subgroup);
        let b = crate::aut::BlockTuple::random(&gx.inner, &mut rng);
        let a = crate::aut::phi(&gx.inner, &b).unwrap();
        let e = gx.extend(&a).unwrap();
        let expect = gx.inner.spec().block_matrix(&b.blocks);
        for (x, m) in e.matrices.iter().enumerate() {
            assert_eq!(e.point_map[x], x);
            assert!(linalg::max_diff(m, &expect) < 1e-12);
        }
    }

    #[test]
    fn induce_rejects_a_non_free_bundle() {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2)").unwrap()]);
        let n = g.normalizer(&h);
        let zeta = EquivariantBundle::trivial_point(Arc::new(n.to_group(&g)), 1);
        assert!(induce(g.clone(), &Subgroup::trivial(&g), &zeta).is_err());
        let gx = regular_gx(&g, &h);
        let extra = gx.bundle().disjoint_union(&EquivariantBundle::trivial_point(g.clone(), 1)).unwrap();
        assert!(matches!(reduce(&extra, &h), Err(Error::PreconditionFailed(_))));
    }
}
