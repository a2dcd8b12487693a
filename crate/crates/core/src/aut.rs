//! Equivariant automorphisms of a canonical model and the maps relating
//! `∏_k GL(F_k)`, `Aut_G(X_ρ)`, `∏_k Aut_G(X_k)` and `G₀`.
//!
//! An [`AutElement`] with base translation `a` sends the fiber over `p` to the
//! fiber over `p·a⁻¹`. With this convention composition `A∘B` covers `ab`, so
//! `pr` is a homomorphism.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, eye, CMat};
use crate::model::CanonicalModel;
use crate::tolerance;

#[derive(Debug, Clone)]
pub struct AutElement {
    model: Arc<CanonicalModel>,
    a: usize,
    maps: Vec<CMat>,
}

/// One `m_k × m_k` block per nonzero slot of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTuple {
    pub blocks: Vec<CMat>,
}

impl BlockTuple {
    pub fn identity(model: &CanonicalModel) -> Self {
        BlockTuple { blocks: model.slots().iter().map(|s| eye(s.multiplicity)).collect() }
    }

    pub fn random<R: Rng + ?Sized>(model: &CanonicalModel, rng: &mut R) -> Self {
        BlockTuple { blocks: model.slots().iter().map(|s| linalg::random_invertible(s.multiplicity, rng)).collect() }
    }

    pub fn mul(&self, other: &BlockTuple) -> BlockTuple {
        BlockTuple { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() }
    }

    pub fn distance(&self, other: &BlockTuple) -> f64 {
        if self.blocks.len() != other.blocks.len() {
            return f64::INFINITY;
        }
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| linalg::max_diff(a, b)).fold(0.0, f64::max)
    }
}

fn same_model(a: &Arc<CanonicalModel>, b: &Arc<CanonicalModel>) -> bool {
    Arc::ptr_eq(a, b) || a.same_as(b)
}

impl AutElement {
    /// Validates shapes, invertibility and equivariance.
    pub fn new(model: Arc<CanonicalModel>, a: usize, maps: Vec<CMat>) -> Result<Self> {
        let d = model.fiber_dim();
        if a >= model.base_points() || maps.len() != model.base_points() {
            return Err(Error::InvalidInput("automorphism does not match the model's base".into()));
        }
        if maps.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::InvalidInput(format!("fiber maps must be {d}x{d}")));
        }
        if let Some(p) = maps.iter().position(|m| linalg::min_singular_value(m) < tolerance::INVERTIBLE) {
            return Err(Error::InvalidInput(format!("fiber map over point {p} is singular")));
        }
        let out = AutElement { model, a, maps };
        let res = out.equivariance_residual();
        if res > tolerance::ACCEPT {
            return Err(Error::InvalidInput(format!("fiber maps are not equivariant (residual {res:.2e})")));
        }
        Ok(out)
    }

    /// Extends the map over the base point `[1]` by `A[p] = φ([a⁻¹], s(p))·A[[1]]`.
    pub fn from_base_map(model: Arc<CanonicalModel>, a: usize, base: CMat) -> Result<Self> {
        let maps = Self::propagate(&model, a, &base);
        Self::new(model, a, maps)
    }

    fn propagate(model: &CanonicalModel, a: usize, base: &CMat) -> Vec<CMat> {
        let ainv = model.base_group().inv(a);
        (0..model.base_points())
            .map(|p| model.act(model.cosets().representative(p), ainv).1 * base)
            .collect()
    }

    pub fn identity(model: Arc<CanonicalModel>) -> Self {
        let maps = vec![eye(model.fiber_dim()); model.base_points()];
        AutElement { model, a: 0, maps }
    }

    pub fn model(&self) -> &Arc<CanonicalModel> {
        &self.model
    }

    /// The base translation `pr(A) = a ∈ G₀`.
    pub fn a(&self) -> usize {
        self.a
    }

    pub fn maps(&self) -> &[CMat] {
        &self.maps
    }

    pub fn map(&self, point: usize) -> &CMat {
        &self.maps[point]
    }

    /// `p·a⁻¹`, the point whose fiber receives the fiber over `p`.
    pub fn target(&self, point: usize) -> usize {
        let g0 = self.model.base_group();
        g0.mul(point, g0.inv(self.a))
    }

    /// `A∘B`, covering `pr(A)·pr(B)`.
    pub fn compose(&self, other: &AutElement) -> Result<AutElement> {
        if !same_model(&self.model, &other.model) {
            return Err(Error::ModelMismatch);
        }
        let maps = (0..self.maps.len()).map(|p| &self.maps[other.target(p)] * &other.maps[p]).collect();
        Ok(AutElement { model: self.model.clone(), a: self.model.base_group().mul(self.a, other.a), maps })
    }

    pub fn inverse(&self) -> AutElement {
        let g0 = self.model.base_group();
        let mut maps = vec![CMat::zeros(0, 0); self.maps.len()];
        for p in 0..self.maps.len() {
            maps[self.target(p)] = linalg::inverse(&self.maps[p]).expect("fiber maps are invertible");
        }
        AutElement { model: self.model.clone(), a: g0.inv(self.a), maps }
    }

    /// `max ‖A[g₁p]·φ(p,g₁) − φ(pa⁻¹,g₁)·A[p]‖` over `G × G₀`.
    pub fn equivariance_residual(&self) -> f64 {
        let model = &self.model;
        let mut worst: f64 = 0.0;
        for g1 in 0..model.group().order() {
            for p in 0..model.base_points() {
                let (q, m) = model.act(g1, p);
                let (q2, m2) = model.act(g1, self.target(p));
                if q2 != self.target(q) {
                    return f64::INFINITY;
                }
                worst = worst.max(linalg::max_diff(&(&self.maps[q] * m), &(m2 * &self.maps[p])));
            }
        }
        worst
    }

    /// Distance between the stored maps and those recomputed from `A[[1]]`.
    pub fn determination_residual(&self) -> f64 {
        Self::propagate(&self.model, self.a, &self.maps[0])
            .iter()
            .zip(&self.maps)
            .map(|(x, y)| linalg::max_diff(x, y))
            .fold(0.0, f64::max)
    }

    /// Largest condition number over the fiber maps.
    pub fn condition_number(&self) -> f64 {
        self.maps
            .iter()
            .map(|m| {
                let s = linalg::singular_values(m);
                s.iter().cloned().fold(0.0, f64::max) / s.iter().cloned().fold(f64::INFINITY, f64::min)
            })
            .fold(1.0, f64::max)
    }

    /// `∞` if base translations differ, otherwise the max fiber difference.
    pub fn distance(&self, other: &AutElement) -> f64 {
        if self.a != other.a || self.maps.len() != other.maps.len() {
            return f64::INFINITY;
        }
        self.maps.iter().zip(&other.maps).map(|(x, y)| linalg::max_diff(x, y)).fold(0.0, f64::max)
    }
}

/// `pr: Aut_G(X_ρ) → G₀`.
pub fn pr(a: &AutElement) -> usize {
    a.a()
}

/// `φ(B)`: translation 1 and fiber map `⊕_k B_k ⊗ I_{d_k}` everywhere.
pub fn phi(model: &Arc<CanonicalModel>, b: &BlockTuple) -> Result<AutElement> {
    let slots = model.slots();
    if b.blocks.len() != slots.len() {
        return Err(Error::InvalidInput(format!("expected {} blocks, got {}", slots.len(), b.blocks.len())));
    }
    for (i, (s, blk)) in slots.iter().zip(&b.blocks).enumerate() {
        if blk.nrows() != s.multiplicity || blk.ncols() != s.multiplicity {
            return Err(Error::InvalidInput(format!("block {i} must be {0}x{0}", s.multiplicity)));
        }
        if linalg::min_singular_value(blk) < tolerance::INVERTIBLE {
            return Err(Error::SingularBlock { component: s.irrep });
        }
    }
    let m = model.spec().block_matrix(&b.blocks);
    Ok(AutElement { model: model.clone(), a: 0, maps: vec![m; model.base_points()] })
}

/// Recovers `B` from an element with `pr = 1` by partial traces over the
/// `V_k` factors of `A[[1]]`.
pub fn block_extract(a: &AutElement) -> Result<BlockTuple> {
    if a.a() != 0 {
        return Err(Error::PreconditionFailed("block extraction needs pr(A) = 1".into()));
    }
    let m = a.map(0);
    let blocks = a
        .model()
        .slots()
        .iter()
        .map(|s| {
            CMat::from_fn(s.multiplicity, s.multiplicity, |f, g| {
                let mut acc = c(0.0, 0.0);
                for v in 0..s.degree {
                    acc += m[(s.offset + f * s.degree + v, s.offset + g * s.degree + v)];
                }
                acc / s.degree as f64
            })
        })
        .collect();
    Ok(BlockTuple { blocks })
}

/// The map `i`: restriction to each `X_k`. Defined when every fiber map is
/// block diagonal in the slot decomposition; an automorphism whose lift of `a`
/// exchanges isotypic components has no restriction.
pub fn restrict_to_components(a: &AutElement) -> Result<Vec<AutElement>> {
    let model = a.model();
    let slots = model.slots();
    for m in a.maps() {
        for s in &slots {
            for t in &slots {
                if s.irrep == t.irrep {
                    continue;
                }
                let off = m.view((s.offset, t.offset), (s.dim(), t.dim())).into_owned();
                if linalg::max_abs(&off) > tolerance::ACCEPT {
                    return Err(Error::ComponentsPermuted);
                }
            }
        }
    }
    Ok(model
        .component_models()
        .into_iter()
        .zip(&slots)
        .map(|(cm, s)| {
            let maps = a.maps().iter().map(|m| m.view((s.offset, s.offset), (s.dim(), s.dim())).into_owned()).collect();
            AutElement { model: cm, a: a.a(), maps }
        })
        .collect())
}

/// Assembles per-component automorphisms into one of `X_ρ` when all their
/// base translations agree.
pub fn in_image_of_i(model: &Arc<CanonicalModel>, components: &[AutElement]) -> Result<Option<AutElement>> {
    let slots = model.slots();
    if components.len() != slots.len() {
        return Err(Error::ModelMismatch);
    }
    for (cm, s) in components.iter().zip(&slots) {
        let spec = cm.model().spec();
        if cm.model().group() != model.group()
            || cm.model().subgroup() != model.subgroup()
            || cm.model().slots().len() != 1
            || spec.multiplicities()[s.irrep] != s.multiplicity
        {
            return Err(Error::ModelMismatch);
        }
    }
    let a = components[0].a();
    if components.iter().any(|x| x.a() != a) {
        return Ok(None);
    }
    let maps = (0..model.base_points())
        .map(|p| {
            let blocks: Vec<CMat> = components.iter().map(|x| x.map(p).clone()).collect();
            linalg::direct_sum(&blocks)
        })
        .collect();
    Ok(Some(AutElement { model: model.clone(), a, maps }))
}

/// Where conjugation by `s(a)` sends each irreducible of `H`:
/// `perm[k]` is the index of `h ↦ ρ_k(s(a)⁻¹ h s(a))`.
pub fn irrep_permutation(model: &CanonicalModel, a: usize) -> Vec<usize> {
    let g = model.group();
    let sub = model.subgroup();
    let irr = model.spec().irreps();
    let hgroup = model.spec().group();
    let t = model.cosets().representative(a);
    (0..irr.len())
        .map(|k| {
            let values = hgroup
                .conjugacy_classes()
                .iter()
                .map(|cls| {
                    let h = sub.elements()[cls[0]];
                    let moved = g.mul(g.mul(g.inv(t), h), t);
                    irr.character(k).values[hgroup.class_of(sub.local_index(moved).unwrap())]
                })
                .collect();
            irr.identify(hgroup, &crate::rep::ClassFunction { values }).expect("conjugate of an irreducible")
        })
        .collect()
}

/// Whether `a` lifts, decided on characters: the multiplicity vector must be
/// invariant under the permutation of irreducibles induced by `a`.
pub fn is_liftable(model: &CanonicalModel, a: usize) -> bool {
    let m = model.spec().multiplicities();
    irrep_permutation(model, a).iter().enumerate().all(|(k, &j)| m[k] == m[j])
}

/// An automorphism over `a`: solves `A₁ρ(h) = φ([a⁻¹], h)A₁` on generators of
/// `H`, then tries random combinations of the solution basis for an invertible
/// one and extends it to all base points.
pub fn lift<R: Rng + ?Sized>(model: &Arc<CanonicalModel>, a: usize, rng: &mut R) -> Result<AutElement> {
    let sub = model.subgroup();
    let hgens: Vec<usize> = model.spec().group().generators().iter().map(|&i| sub.elements()[i]).collect();
    let ainv = model.base_group().inv(a);
    let left: Vec<CMat> = hgens.iter().map(|&h| model.act(h, ainv).1).collect();
    let right: Vec<CMat> = hgens.iter().map(|&h| model.h_matrix(h).clone()).collect();
    let basis = linalg::intertwiners(&left, &right);
    for _ in 0..tolerance::LIFT_ATTEMPTS {
        let Some(x) = linalg::random_combination(&basis, rng) else { break };
        if linalg::min_singular_value(&x) > tolerance::INVERTIBLE {
            return AutElement::from_base_map(model.clone(), a, x);
        }
    }
    Err(Error::NoInvertibleIntertwiner { a })
}

/// Random element of `Aut_G(X_ρ)`: a lift of a random liftable `a`.
pub fn random_element<R: Rng + ?Sized>(model: &Arc<CanonicalModel>, rng: &mut R) -> AutElement {
    let liftable: Vec<usize> = (0..model.base_points()).filter(|&a| is_liftable(model, a)).collect();
    let a = liftable[rng.random_range(0..liftable.len())];
    lift(model, a, rng).expect("liftable element")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactSequenceReport {
    pub phi_residual: f64,
    pub phi_injective: bool,
    pub kernel_samples: usize,
    pub kernel_residual: f64,
    pub kernel_ok: bool,
    /// `(a, lift found)` for every `a ∈ G₀`.
    pub lifts: Vec<(usize, bool)>,
    pub lift_residual: f64,
    pub surjective: bool,
}

impl ExactSequenceReport {
    pub fn exact(&self) -> bool {
        self.phi_injective && self.kernel_ok && self.surjective
    }

    pub fn max_residual(&self) -> f64 {
        self.phi_residual.max(self.kernel_residual).max(self.lift_residual)
    }
}

/// Samples the three exactness properties of
/// `1 → ∏_k GL(F_k) → Aut_G(X_ρ) → G₀ → 1`.
pub fn verify_exact_sequence<R: Rng + ?Sized>(model: &Arc<CanonicalModel>, samples: usize, rng: &mut R) -> ExactSequenceReport {
    let mut phi_residual: f64 = 0.0;
    for _ in 0..samples {
        let b = BlockTuple::random(model, rng);
        let b2 = BlockTuple::random(model, rng);
        let (pb, pb2) = (phi(model, &b).unwrap(), phi(model, &b2).unwrap());
        phi_residual = phi_residual
            .max(block_extract(&pb).unwrap().distance(&b))
            .max(pb.compose(&pb2).unwrap().distance(&phi(model, &b.mul(&b2)).unwrap()))
            .max(pb.equivariance_residual());
    }

    let mut lifts = Vec::new();
    let mut lifted = Vec::new();
    let mut lift_residual: f64 = 0.0;
    for a in 0..model.base_points() {
        match lift(model, a, rng) {
            Ok(l) => {
                lift_residual = lift_residual.max(l.equivariance_residual());
                lifts.push((a, l.a() == a));
                lifted.push(l);
            }
            Err(_) => lifts.push((a, false)),
        }
    }

    // Kernel elements come from solving the commutant directly and from
    // conjugating φ-images by lifts; neither is built from a block tuple of
    // the shape being tested.
    let mut kernel_residual: f64 = 0.0;
    let mut kernel_ok = true;
    for i in 0..samples {
        let k = if i % 2 == 0 || lifted.is_empty() {
            lift(model, 0, rng)
        } else {
            let l = &lifted[rng.random_range(0..lifted.len())];
            let b = phi(model, &BlockTuple::random(model, rng)).unwrap();
            l.compose(&b).and_then(|x| x.compose(&l.inverse()))
        };
        let Ok(k) = k else {
            kernel_ok = false;
            continue;
        };
        match block_extract(&k).and_then(|b| phi(model, &b)) {
            Ok(back) => kernel_residual = kernel_residual.max(back.distance(&k)),
            Err(_) => kernel_ok = false,
        }
    }
    ExactSequenceReport {
        phi_residual,
        phi_injective: phi_residual <= tolerance::ACCEPT,
        kernel_samples: samples,
        kernel_residual,
        kernel_ok: kernel_ok && kernel_residual <= tolerance::ACCEPT,
        surjective: lifts.iter().all(|l| l.1) && lift_residual <= tolerance::ACCEPT,
        lifts,
        lift_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{catalog, FiniteGroup};
    use crate::model::build_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s3_a3(pairs: &[(usize, usize)]) -> Arc<CanonicalModel> {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        Arc::new(build_model(g, h, pairs).unwrap())
    }

    fn z6_z3(pairs: &[(usize, usize)]) -> Arc<CanonicalModel> {
        let g = Arc::new(FiniteGroup::cyclic(6));
        let h = g.subgroup_closure(&[2]);
        Arc::new(build_model(g, h, pairs).unwrap())
    }

    #[test]
    fn identity_element() {
        let m = s3_a3(&[(1, 1), (2, 1)]);
        let id = AutElement::identity(m.clone());
        assert_eq!(pr(&id), 0);
        assert_eq!(id.equivariance_residual(), 0.0);
        let b = phi(&m, &BlockTuple::identity(&m)).unwrap();
        assert_eq!(b.distance(&id), 0.0);
    }

    #[test]
    fn swap_lift_exists_for_conjugate_pair() {
        let m = s3_a3(&[(1, 1), (2, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = lift(&m, 1, &mut rng).unwrap();
        assert_eq!(pr(&l), 1);
        assert!(l.equivariance_residual() < 1e-10);
        // conjugation exchanges ω and ω̄, so the lift is anti-diagonal
        assert!(l.map(0)[(0, 0)].norm() < 1e-10 && l.map(0)[(1, 1)].norm() < 1e-10);
        assert!(matches!(restrict_to_components(&l), Err(Error::ComponentsPermuted)));
    }

    #[test]
    fn single_omega_has_no_lift() {
        let m = s3_a3(&[(1, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(lift(&m, 1, &mut rng), Err(Error::NoInvertibleIntertwiner { a: 1 })));
        assert!(!is_liftable(&m, 1));
        let rep = verify_exact_sequence(&m, 4, &mut rng);
        assert!(!rep.surjective);
        assert!(rep.phi_injective && rep.kernel_ok);
    }

    #[test]
    fn exact_sequence_regular_s3_a3() {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        let irr = crate::model::subgroup_irreps(&g, &h).unwrap();
        let spec = crate::model::RepSpec::regular(irr).unwrap();
        let m = Arc::new(CanonicalModel::build(g, h, spec).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rep = verify_exact_sequence(&m, 10, &mut rng);
        assert!(rep.exact(), "{rep:?}");
    }

    #[test]
    fn group_laws() {
        let m = z6_z3(&[(1, 2), (2, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_element(&m, &mut rng);
        let y = random_element(&m, &mut rng);
        let z = random_element(&m, &mut rng);
        let lhs = x.compose(&y).unwrap().compose(&z).unwrap();
        let rhs = x.compose(&y.compose(&z).unwrap()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-9);
        assert!(x.compose(&x.inverse()).unwrap().distance(&AutElement::identity(m.clone())) < 1e-9);
        let xy = x.compose(&y).unwrap();
        assert_eq!(pr(&xy), m.base_group().mul(pr(&x), pr(&y)));
        assert!(xy.equivariance_residual() < 1e-9);
        assert!(xy.determination_residual() < 1e-9);
    }

    #[test]
    fn restriction_round_trip() {
        let m = z6_z3(&[(1, 2), (2, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let x = random_element(&m, &mut rng);
            let parts = restrict_to_components(&x).unwrap();
            assert_eq!(parts.len(), 2);
            for p in &parts {
                assert!(p.equivariance_residual() < 1e-9);
            }
            let back = in_image_of_i(&m, &parts).unwrap().unwrap();
            assert!(back.distance(&x) < 1e-12);
        }
    }

    #[test]
    fn restriction_of_phi_is_blockwise_phi() {
        let m = z6_z3(&[(1, 2), (2, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = BlockTuple::random(&m, &mut rng);
        let parts = restrict_to_components(&phi(&m, &b).unwrap()).unwrap();
        for (i, p) in parts.iter().enumerate() {
            let single = phi(p.model(), &BlockTuple { blocks: vec![b.blocks[i].clone()] }).unwrap();
            assert!(single.distance(p) < 1e-12);
        }
    }

    #[test]
    fn differing_translations_are_not_in_image() {
        let m = z6_z3(&[(1, 1), (2, 1)]);
        let cms = m.component_models();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = lift(&cms[0], 1, &mut rng).unwrap();
        let b = AutElement::identity(cms[1].clone());
        assert!(in_image_of_i(&m, &[a, b]).unwrap().is_none());
        let ids: Vec<_> = cms.iter().map(|c| AutElement::identity(c.clone())).collect();
        let id = in_image_of_i(&m, &ids).unwrap().unwrap();
        assert_eq!(id.distance(&AutElement::identity(m.clone())), 0.0);
    }

    #[test]
    fn singular_block_rejected() {
        let m = z6_z3(&[(1, 2)]);
        let b = BlockTuple { blocks: vec![CMat::zeros(2, 2)] };
        assert!(matches!(phi(&m, &b), Err(Error::SingularBlock { component: 1 })));
    }

    #[test]
    fn liftability_agrees_with_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for pairs in [vec![(1, 1)], vec![(1, 1), (2, 1)], vec![(1, 2), (2, 1)]] {
            let m = s3_a3(&pairs);
            for a in 0..2 {
                assert_eq!(is_liftable(&m, a), lift(&m, a, &mut rng).is_ok(), "{pairs:?} {a}");
            }
        }
        let g = Arc::new(catalog::a4());
        let v4 = g.normalizer(&g.subgroup_closure(&[g.find("(1 2)(3 4)").unwrap()]));
        let m = Arc::new(build_model(g, v4, &[(1, 1), (2, 1), (3, 1)]).unwrap());
        for a in 0..3 {
            assert!(lift(&m, a, &mut rng).is_ok());
        }
        let m2 = Arc::new(build_model(m.group().clone(), m.subgroup().clone(), &[(1, 1)]).unwrap());
        assert!(lift(&m2, 1, &mut rng).is_err() && lift(&m2, 2, &mut rng).is_err());
    }
}
