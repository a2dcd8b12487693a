use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::linalg::{self, eye, CMat};
use crate::model::CanonicalModel;
use crate::tolerance;

/// A finite set with a left action, stored as one permutation per element.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGSpace {
    group: Arc<FiniteGroup>,
    action: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

impl FiniteGSpace {
    /// `action[g][p] = g·p`; checked against the action axioms.
    pub fn new(group: Arc<FiniteGroup>, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::InvalidInput(format!("{} permutations for a group of order {}", action.len(), group.order())));
        }
        let n = action[0].len();
        if action.iter().any(|p| p.len() != n || !is_permutation(p)) {
            return Err(Error::InvalidInput("action rows must be permutations of one point set".into()));
        }
        let s = FiniteGSpace { group, action };
        if !s.axioms_hold() {
            return Err(Error::InvalidInput("permutations do not define a group action".into()));
        }
        Ok(s)
    }

    /// Extends generator permutations `(element, perm)` to the whole group.
    pub fn from_generators(group: Arc<FiniteGroup>, points: usize, generators: &[(usize, Vec<usize>)]) -> Result<Self> {
        if generators.iter().any(|(g, p)| *g >= group.order() || p.len() != points || !is_permutation(p)) {
            return Err(Error::InvalidInput("generator permutation out of range".into()));
        }
        let mut action: Vec<Option<Vec<usize>>> = vec![None; group.order()];
        action[0] = Some((0..points).collect());
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for (s, perm) in generators {
                let y = group.mul(*s, x);
                let px = action[x].as_ref().unwrap();
                let py: Vec<usize> = px.iter().map(|&q| perm[q]).collect();
                match &action[y] {
                    Some(existing) if *existing != py => {
                        return Err(Error::InvalidInput("generator permutations violate a relation of the group".into()))
                    }
                    Some(_) => {}
                    None => {
                        action[y] = Some(py);
                        queue.push_back(y);
                    }
                }
            }
        }
        let action: Option<Vec<Vec<usize>>> = action.into_iter().collect();
        let action = action.ok_or_else(|| Error::InvalidInput("generators do not generate the group".into()))?;
        Self::new(group, action)
    }

    /// `G/K` with left multiplication, points numbered as in
    /// [`FiniteGroup::coset_decomposition`].
    pub fn cosets(group: Arc<FiniteGroup>, k: &Subgroup) -> Self {
        let dec = group.coset_decomposition(k);
        let action = (0..group.order())
            .map(|g| (0..dec.len()).map(|p| dec.coset_of(group.mul(g, dec.representative(p)))).collect())
            .collect();
        FiniteGSpace { group, action }
    }

    pub fn point(group: Arc<FiniteGroup>) -> Self {
        let action = vec![vec![0]; group.order()];
        FiniteGSpace { group, action }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.action[0].len()
    }

    pub fn act(&self, g: usize, p: usize) -> usize {
        self.action[g][p]
    }

    pub fn permutation(&self, g: usize) -> &[usize] {
        &self.action[g]
    }

    pub fn axioms_hold(&self) -> bool {
        let g = &self.group;
        let n = g.order();
        self.action[0].iter().enumerate().all(|(i, &x)| i == x)
            && (0..n).all(|a| (0..n).all(|b| (0..self.points()).all(|p| self.act(a, self.act(b, p)) == self.act(g.mul(a, b), p))))
    }

    pub fn fixed_points(&self, k: &Subgroup) -> Vec<usize> {
        (0..self.points()).filter(|&p| k.elements().iter().all(|&x| self.act(x, p) == p)).collect()
    }

    pub fn stabilizer(&self, p: usize) -> Subgroup {
        let e: Vec<usize> = (0..self.group.order()).filter(|&g| self.act(g, p) == p).collect();
        Subgroup::from_elements(&self.group, &e).expect("stabilizer is a subgroup")
    }

    pub fn orbit(&self, p: usize) -> Vec<usize> {
        let mut o: Vec<usize> = (0..self.group.order()).map(|g| self.act(g, p)).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    pub fn is_transitive(&self) -> bool {
        self.points() == 0 || self.orbit(0).len() == self.points()
    }

    /// `self ⊔ other`, points of `other` shifted past those of `self`.
    pub fn disjoint_union(&self, other: &FiniteGSpace) -> Result<Self> {
        if *self.group != *other.group {
            return Err(Error::ModelMismatch);
        }
        let n = self.points();
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&x| x + n)).collect())
            .collect();
        Ok(FiniteGSpace { group: self.group.clone(), action })
    }

    /// The action of `sub` (in its local numbering) on `points`, which must be
    /// `sub`-invariant; point `i` of the result is `points[i]`.
    pub fn restrict(&self, sub: &Subgroup, points: &[usize]) -> Result<Self> {
        let local = Arc::new(sub.to_group(&self.group));
        let index = |q: usize| points.iter().position(|&x| x == q);
        let action = sub
            .elements()
            .iter()
            .map(|&g| points.iter().map(|&p| index(self.act(g, p))).collect::<Option<Vec<usize>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::PreconditionFailed("point set is not invariant under the subgroup".into()))?;
        Ok(FiniteGSpace { group: local, action })
    }
}

/// A `G`-equivariant vector bundle over a finite `G`-set: one matrix
/// `fiber(p) → fiber(g·p)` per element and point.
#[derive(Debug, Clone)]
pub struct EquivariantBundle {
    base: FiniteGSpace,
    dims: Vec<usize>,
    maps: Vec<Vec<CMat>>,
}

/// Rank of the averaging idempotent of a set of matrices forming a group.
fn fixed_dim(mats: &[CMat]) -> usize {
    let d = mats[0].nrows();
    let mut avg = CMat::zeros(d, d);
    for m in mats {
        avg += m;
    }
    (avg.trace().re / mats.len() as f64).round() as usize
}

impl EquivariantBundle {
    pub fn new(base: FiniteGSpace, maps: Vec<Vec<CMat>>) -> Result<Self> {
        let n = base.points();
        if maps.len() != base.group.order() || maps.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("one matrix per group element and point is required".into()));
        }
        let dims: Vec<usize> = maps[0].iter().map(|m| m.ncols()).collect();
        for (g, row) in maps.iter().enumerate() {
            for (p, m) in row.iter().enumerate() {
                if m.ncols() != dims[p] || m.nrows() != dims[base.act(g, p)] {
                    return Err(Error::InvalidInput(format!("matrix for element {g} at point {p} has the wrong shape")));
                }
            }
        }
        let b = EquivariantBundle { base, dims, maps };
        let r = b.action_residual();
        if r > tolerance::ACCEPT {
            return Err(Error::InvalidInput(format!("fiber matrices violate the action axioms (residual {r:.2e})")));
        }
        Ok(b)
    }

    /// The canonical model as a bundle over `G₀` with the `G`-action.
    pub fn from_model(model: &CanonicalModel) -> Self {
        let group = model.group().clone();
        let n = model.base_points();
        let mut action = Vec::with_capacity(group.order());
        let mut maps = Vec::with_capacity(group.order());
        for g in 0..group.order() {
            let (targets, mats): (Vec<usize>, Vec<CMat>) = (0..n).map(|p| model.act(g, p)).unzip();
            action.push(targets);
            maps.push(mats);
        }
        EquivariantBundle { base: FiniteGSpace { group, action }, dims: vec![model.fiber_dim(); n], maps }
    }

    /// A single point with fiber `ℂ^dim` and trivial action.
    pub fn trivial_point(group: Arc<FiniteGroup>, dim: usize) -> Self {
        let maps = vec![vec![eye(dim)]; group.order()];
        EquivariantBundle { base: FiniteGSpace::point(group), dims: vec![dim], maps }
    }

    pub fn base(&self) -> &FiniteGSpace {
        &self.base
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.base.group
    }

    pub fn dim(&self, p: usize) -> usize {
        self.dims[p]
    }

    pub fn map(&self, g: usize, p: usize) -> &CMat {
        &self.maps[g][p]
    }

    /// Max defect of `map(g₂, g₁p)·map(g₁, p) = map(g₂g₁, p)` and `map(e, ·) = I`.
    pub fn action_residual(&self) -> f64 {
        let g = &self.base.group;
        if !self.base.axioms_hold() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for p in 0..self.base.points() {
            worst = worst.max(linalg::max_diff(&self.maps[0][p], &eye(self.dims[p])));
            for g1 in 0..g.order() {
                let q = self.base.act(g1, p);
                for g2 in 0..g.order() {
                    let lhs = &self.maps[g2][q] * &self.maps[g1][p];
                    worst = worst.max(linalg::max_diff(&lhs, &self.maps[g.mul(g2, g1)][p]));
                }
            }
        }
        worst
    }

    /// `K`-fixed base points with the dimension of the `K`-fixed subspace of
    /// the fiber there.
    pub fn fixed_points(&self, k: &Subgroup) -> Vec<(usize, usize)> {
        self.base
            .fixed_points(k)
            .into_iter()
            .map(|p| {
                let mats: Vec<CMat> = k.elements().iter().map(|&x| self.maps[x][p].clone()).collect();
                (p, fixed_dim(&mats))
            })
            .collect()
    }

    pub fn disjoint_union(&self, other: &EquivariantBundle) -> Result<Self> {
        let base = self.base.disjoint_union(&other.base)?;
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect();
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Ok(EquivariantBundle { base, dims, maps })
    }

    /// The sub-bundle over `sub`-invariant `points` with the action of `sub`
    /// in its local numbering.
    pub fn restrict(&self, sub: &Subgroup, points: &[usize]) -> Result<Self> {
        let base = self.base.restrict(sub, points)?;
        let maps = sub.elements().iter().map(|&g| points.iter().map(|&p| self.maps[g][p].clone()).collect()).collect();
        let dims = points.iter().map(|&p| self.dims[p]).collect();
        Ok(EquivariantBundle { base, dims, maps })
    }

    /// The isomorphic bundle with fiber coordinates changed by `t[p]`, and the
    /// isomorphism from `self` to it.
    pub fn gauge(&self, t: &[CMat]) -> Result<(Self, BundleMap)> {
        let inv = t
            .iter()
            .map(|m| linalg::inverse(m).ok_or_else(|| Error::InvalidInput("singular gauge".into())))
            .collect::<Result<Vec<_>>>()?;
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(g, row)| row.iter().enumerate().map(|(p, m)| &t[self.base.act(g, p)] * m * &inv[p]).collect())
            .collect();
        let out = EquivariantBundle { base: self.base.clone(), dims: self.dims.clone(), maps };
        let w = BundleMap { point_map: (0..self.base.points()).collect(), matrices: t.to_vec() };
        Ok((out, w))
    }
}

/// A fiberwise linear map between bundles covering a map of base points.
#[derive(Debug, Clone)]
pub struct BundleMap {
    pub point_map: Vec<usize>,
    pub matrices: Vec<CMat>,
}

/// Result of checking a bundle map against the two actions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsomorphismCheck {
    /// Bijective and equivariant on base points.
    pub base_exact: bool,
    /// Max equivariance defect of the fiber matrices.
    pub fiber_residual: f64,
    /// Smallest singular value over all fiber matrices.
    pub min_singular: f64,
}

impl IsomorphismCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.base_exact && self.fiber_residual <= tol && self.min_singular > tolerance::INVERTIBLE
    }
}

impl BundleMap {
    pub fn identity(bundle: &EquivariantBundle) -> Self {
        BundleMap {
            point_map: (0..bundle.base.points()).collect(),
            matrices: bundle.dims.iter().map(|&d| eye(d)).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BundleMap) -> BundleMap {
        BundleMap {
            point_map: other.point_map.iter().map(|&q| self.point_map[q]).collect(),
            matrices: other.matrices.iter().zip(&other.point_map).map(|(m, &q)| &self.matrices[q] * m).collect(),
        }
    }

    pub fn inverse(&self) -> Result<BundleMap> {
        let n = self.point_map.len();
        let mut point_map = vec![usize::MAX; n];
        let mut matrices = vec![CMat::zeros(0, 0); n];
        for (p, (&q, m)) in self.point_map.iter().zip(&self.matrices).enumerate() {
            if q >= n || point_map[q] != usize::MAX {
                return Err(Error::InvalidInput("bundle map is not bijective on points".into()));
            }
            point_map[q] = p;
            matrices[q] = linalg::inverse(m).ok_or_else(|| Error::InvalidInput("singular fiber map".into()))?;
        }
        Ok(BundleMap { point_map, matrices })
    }

    pub fn distance(&self, other: &BundleMap) -> f64 {
        if self.point_map != other.point_map {
            return f64::INFINITY;
        }
        self.matrices.iter().zip(&other.matrices).map(|(a, b)| linalg::max_diff(a, b)).fold(0.0, f64::max)
    }

    /// Checks `self: src → dst` against `hom` from the group of `src` to the
    /// group of `dst`: `W[n·x]·src(n, x) = dst(hom(n), W x)·W[x]`.
    pub fn check_along(&self, src: &EquivariantBundle, dst: &EquivariantBundle, hom: &[usize]) -> IsomorphismCheck {
        let n = src.base.points();
        let fail = IsomorphismCheck { base_exact: false, fiber_residual: f64::INFINITY, min_singular: 0.0 };
        if self.point_map.len() != n || self.matrices.len() != n || dst.base.points() != n {
            return fail;
        }
        let mut seen = vec![false; n];
        if !self.point_map.iter().all(|&q| q < n && !std::mem::replace(&mut seen[q], true)) {
            return fail;
        }
        for (p, m) in self.matrices.iter().enumerate() {
            if m.ncols() != src.dims[p] || m.nrows() != dst.dims[self.point_map[p]] {
                return fail;
            }
        }
        let mut base_exact = true;
        let mut worst: f64 = 0.0;
        for (g, &hg) in hom.iter().enumerate() {
            for p in 0..n {
                let q = src.base.act(g, p);
                if self.point_map[q] != dst.base.act(hg, self.point_map[p]) {
                    base_exact = false;
                    continue;
                }
                let lhs = &self.matrices[q] * &src.maps[g][p];
                let rhs = &dst.maps[hg][self.point_map[p]] * &self.matrices[p];
                worst = worst.max(linalg::max_diff(&lhs, &rhs));
            }
        }
        let min_singular = self.matrices.iter().map(linalg::min_singular_value).fold(f64::INFINITY, f64::min);
        IsomorphismCheck { base_exact, fiber_residual: if base_exact { worst } else { f64::INFINITY }, min_singular }
    }

    /// [`BundleMap::check_along`] for two bundles over the same group.
    pub fn check(&self, src: &EquivariantBundle, dst: &EquivariantBundle) -> IsomorphismCheck {
        if **src.group() != **dst.group() {
            return IsomorphismCheck { base_exact: false, fiber_residual: f64::INFINITY, min_singular: 0.0 };
        }
        let id: Vec<usize> = (0..src.group().order()).collect();
        self.check_along(src, dst, &id)
    }
}

/// A random equivariant automorphism of a bundle over a transitive base.
///
/// The image of point 0 is drawn among points with the same stabilizer, the
/// matrix there among invertible intertwiners of that stabilizer, and the
/// rest follows from equivariance.
pub fn random_automorphism<R: rand::Rng + ?Sized>(bundle: &EquivariantBundle, rng: &mut R) -> Result<BundleMap> {
    let base = &bundle.base;
    if base.points() == 0 {
        return Ok(BundleMap { point_map: vec![], matrices: vec![] });
    }
    if !base.is_transitive() {
        return Err(Error::PreconditionFailed("base is not a single orbit".into()));
    }
    let stab = base.stabilizer(0);
    let gens = stab.to_group(base.group()).generators();
    let gens: Vec<usize> = gens.iter().map(|&i| stab.elements()[i]).collect();
    let candidates: Vec<usize> = (0..base.points()).filter(|&y| base.stabilizer(y) == stab).collect();
    for _ in 0..tolerance::LIFT_ATTEMPTS {
        let y = candidates[rng.random_range(0..candidates.len())];
        let left: Vec<CMat> = gens.iter().map(|&h| bundle.maps[h][y].clone()).collect();
        let right: Vec<CMat> = gens.iter().map(|&h| bundle.maps[h][0].clone()).collect();
        let basis = if gens.is_empty() {
            vec![eye(bundle.dims[0])]
        } else {
            linalg::intertwiners(&left, &right)
        };
        let m0 = match linalg::random_combination(&basis, rng) {
            Some(m) if linalg::min_singular_value(&m) > tolerance::INVERTIBLE && m.is_square() => m,
            _ => continue,
        };
        let n = base.points();
        let mut point_map = vec![usize::MAX; n];
        let mut matrices = vec![CMat::zeros(0, 0); n];
        for g in 0..base.group().order() {
            let p = base.act(g, 0);
            if point_map[p] == usize::MAX {
                point_map[p] = base.act(g, y);
                let ginv = linalg::inverse(&bundle.maps[g][0]).expect("action matrices are invertible");
                matrices[p] = &bundle.maps[g][y] * &m0 * ginv;
            }
        }
        return Ok(BundleMap { point_map, matrices });
    }
    Err(Error::NoInvertibleIntertwiner { a: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_extend_to_the_coset_action() {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2)").unwrap()]);
        let full = FiniteGSpace::cosets(g.clone(), &h);
        let gens: Vec<(usize, Vec<usize>)> = g.generators().into_iter().map(|x| (x, full.permutation(x).to_vec())).collect();
        assert_eq!(FiniteGSpace::from_generators(g.clone(), 3, &gens).unwrap(), full);
        let involution = g.find("(1 2)").unwrap();
        assert!(FiniteGSpace::from_generators(g, 3, &[(involution, vec![1, 2, 0])]).is_err());
    }

    #[test]
    fn trivial_subgroup_fixes_everything_and_free_action_fixes_nothing() {
        let g = Arc::new(catalog::d4());
        let regular = FiniteGSpace::cosets(g.clone(), &Subgroup::trivial(&g));
        assert_eq!(regular.fixed_points(&Subgroup::trivial(&g)).len(), 8);
        for k in g.all_subgroups(64).unwrap().iter().filter(|k| k.order() > 1) {
            assert!(regular.fixed_points(k).is_empty());
        }
    }

    #[test]
    fn model_bundle_satisfies_the_axioms() {
        let g = Arc::new(catalog::s3());
        let h = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        let m = crate::model::build_model(g, h, &[(1, 1), (2, 2)]).unwrap();
        let b = EquivariantBundle::from_model(&m);
        assert!(b.action_residual() < 1e-12);
        assert!(EquivariantBundle::new(b.base().clone(), b.maps.clone()).is_ok());
    }

    #[test]
    fn gauge_gives_an_isomorphism() {
        let g = Arc::new(catalog::z4());
        let h = g.subgroup_closure(&[2]);
        let m = crate::model::build_model(g, h, &[(1, 2)]).unwrap();
        let b = EquivariantBundle::from_model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t: Vec<CMat> = (0..2).map(|_| linalg::random_invertible(2, &mut rng)).collect();
        let (b2, w) = b.gauge(&t).unwrap();
        assert!(w.check(&b, &b2).holds(1e-9));
        assert!(w.inverse().unwrap().check(&b2, &b).holds(1e-9));
        assert!(!BundleMap::identity(&b).check(&b, &b2).holds(1e-9));
    }

    #[test]
    fn sampled_automorphisms_are_equivariant() {
        let g = Arc::new(catalog::d4());
        let h = g.subgroup_closure(&[g.find("(1 3)(2 4)").unwrap()]);
        let m = crate::model::build_model(g, h, &[(1, 2)]).unwrap();
        let b = EquivariantBundle::from_model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let a = random_automorphism(&b, &mut rng).unwrap();
            assert!(a.check(&b, &b).holds(1e-8));
            let round = a.compose(&a.inverse().unwrap());
            assert!(round.distance(&BundleMap::identity(&b)) < 1e-9);
        }
    }
}
