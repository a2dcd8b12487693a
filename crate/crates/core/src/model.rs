//! The canonical model `X_ρ = G₀ × (⊕_k F_k ⊗ V_k)` over the discrete base
//! `G₀ = G/H` with its left `G`-action.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CosetDecomposition, FiniteGroup, QuotientGroup, Subgroup};
use crate::linalg::{self, c, eye, CMat};
use crate::rep::{irreducibles, Irreducibles};

/// Multiplicities `m_k` of the irreducibles of `H` in the fiber representation.
#[derive(Debug, Clone)]
pub struct RepSpec {
    irreps: Arc<Irreducibles>,
    multiplicities: Vec<usize>,
}

/// One nonzero block of a [`RepSpec`]: `F_k ⊗ V_k` at `offset` in the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub irrep: usize,
    pub multiplicity: usize,
    pub degree: usize,
    pub offset: usize,
}

impl Slot {
    pub fn dim(&self) -> usize {
        self.multiplicity * self.degree
    }
}

impl RepSpec {
    pub fn new(irreps: Arc<Irreducibles>, multiplicities: Vec<usize>) -> Result<Self> {
        if multiplicities.len() != irreps.len() {
            return Err(Error::InvalidInput(format!(
                "spec lists {} multiplicities for {} irreducibles",
                multiplicities.len(),
                irreps.len()
            )));
        }
        let trivial = multiplicities[irreps.trivial_index()];
        if trivial > 0 {
            return Err(Error::TrivialComponentPresent { multiplicity: trivial });
        }
        if multiplicities.iter().all(|&m| m == 0) {
            return Err(Error::InvalidInput("fiber dimension is zero".into()));
        }
        Ok(RepSpec { irreps, multiplicities })
    }

    /// From `(k, m_k)` pairs; unlisted irreducibles get multiplicity 0.
    pub fn from_pairs(irreps: Arc<Irreducibles>, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = vec![0; irreps.len()];
        for &(k, mk) in pairs {
            if k >= m.len() {
                return Err(Error::InvalidInput(format!("irreducible index {k} out of range")));
            }
            m[k] += mk;
        }
        Self::new(irreps, m)
    }

    pub fn single(irreps: Arc<Irreducibles>, k: usize, m: usize) -> Result<Self> {
        Self::from_pairs(irreps, &[(k, m)])
    }

    /// `m_k = d_k` for every nontrivial irreducible: the regular
    /// representation with its trivial summand removed.
    pub fn regular(irreps: Arc<Irreducibles>) -> Result<Self> {
        let t = irreps.trivial_index();
        let m = (0..irreps.len()).map(|k| if k == t { 0 } else { irreps.degree(k) }).collect();
        Self::new(irreps, m)
    }

    pub fn irreps(&self) -> &Arc<Irreducibles> {
        &self.irreps
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.irreps.reps[0].group()
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Nonzero blocks in ascending `k`.
    pub fn slots(&self) -> Vec<Slot> {
        let mut offset = 0;
        let mut out = Vec::new();
        for (k, &m) in self.multiplicities.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let slot = Slot { irrep: k, multiplicity: m, degree: self.irreps.degree(k), offset };
            offset += slot.dim();
            out.push(slot);
        }
        out
    }

    pub fn fiber_dim(&self) -> usize {
        self.slots().iter().map(Slot::dim).sum()
    }

    /// `⊕_k I_{m_k} ⊗ ρ_k(h)` for a local element of `H`.
    pub fn matrix(&self, h: usize) -> CMat {
        let blocks: Vec<CMat> = self
            .slots()
            .iter()
            .map(|s| linalg::kron(&eye(s.multiplicity), self.irreps.reps[s.irrep].matrix(h)))
            .collect();
        linalg::direct_sum(&blocks)
    }

    /// `⊕_k B_k ⊗ I_{d_k}` for one `m_k × m_k` block per slot.
    pub fn block_matrix(&self, blocks: &[CMat]) -> CMat {
        let parts: Vec<CMat> = self
            .slots()
            .iter()
            .zip(blocks)
            .map(|(s, b)| linalg::kron(b, &eye(s.degree)))
            .collect();
        linalg::direct_sum(&parts)
    }

    /// Same group, irreducibles and multiplicities.
    pub fn same_as(&self, other: &RepSpec) -> bool {
        self.multiplicities == other.multiplicities
            && (Arc::ptr_eq(&self.irreps, &other.irreps) || self.group() == other.group())
    }
}

/// The canonical model for a normal stationary subgroup.
#[derive(Debug, Clone)]
pub struct CanonicalModel {
    group: Arc<FiniteGroup>,
    subgroup: Subgroup,
    quotient: QuotientGroup,
    spec: RepSpec,
    fiber: Vec<CMat>,
}

impl CanonicalModel {
    /// Builds `X_ρ` for `H ◁ G`; `spec` must be over `H.to_group(G)`.
    pub fn build(group: Arc<FiniteGroup>, subgroup: Subgroup, spec: RepSpec) -> Result<Self> {
        let quotient = group.quotient_group(&subgroup)?;
        if subgroup.to_group(&group).table() != spec.group().table() {
            return Err(Error::ModelMismatch);
        }
        let fiber = (0..subgroup.order()).map(|h| spec.matrix(h)).collect();
        Ok(CanonicalModel { group, subgroup, quotient, spec, fiber })
    }

    /// The single-block model `X_k = G₀ × (F_k ⊗ V_k)` with `dim F_k = m`.
    pub fn build_component(group: Arc<FiniteGroup>, subgroup: Subgroup, irreps: Arc<Irreducibles>, k: usize, m: usize) -> Result<Self> {
        let spec = RepSpec::single(irreps, k, m)?;
        Self::build(group, subgroup, spec)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn quotient(&self) -> &QuotientGroup {
        &self.quotient
    }

    /// `G₀` as a group on base-point indices.
    pub fn base_group(&self) -> &FiniteGroup {
        self.quotient.group()
    }

    pub fn cosets(&self) -> &CosetDecomposition {
        self.quotient.cosets()
    }

    pub fn spec(&self) -> &RepSpec {
        &self.spec
    }

    pub fn base_points(&self) -> usize {
        self.quotient.cosets().len()
    }

    pub fn fiber_dim(&self) -> usize {
        self.spec.fiber_dim()
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.spec.slots()
    }

    /// Fiber matrix of a parent element of `H`.
    pub fn h_matrix(&self, h: usize) -> &CMat {
        &self.fiber[self.subgroup.local_index(h).expect("element of H")]
    }

    /// `g₁·([g], v) = ([g₁g], ρ(s([g₁g])⁻¹ g₁ s([g])) v)`, returned as the
    /// target point and the element of `H` acting on the fiber.
    pub fn act_h_part(&self, g1: usize, point: usize) -> (usize, usize) {
        let g = &self.group;
        let dec = self.cosets();
        let moved = g.mul(g1, dec.representative(point));
        let target = dec.coset_of(moved);
        (target, g.mul(g.inv(dec.representative(target)), moved))
    }

    pub fn act(&self, g1: usize, point: usize) -> (usize, CMat) {
        let (target, h) = self.act_h_part(g1, point);
        (target, self.h_matrix(h).clone())
    }

    /// `max` over all `g₁, g₂, [g]` of the composition defect, plus the
    /// identity defect.
    pub fn action_residual(&self) -> f64 {
        let n = self.group.order();
        let mut worst: f64 = 0.0;
        for p in 0..self.base_points() {
            let (t, m) = self.act(0, p);
            if t != p {
                return f64::INFINITY;
            }
            worst = worst.max(linalg::max_diff(&m, &eye(self.fiber_dim())));
            for g1 in 0..n {
                let (q, m1) = self.act(g1, p);
                for g2 in 0..n {
                    let (r, m2) = self.act(g2, q);
                    let (r2, m12) = self.act(self.group.mul(g2, g1), p);
                    if r != r2 {
                        return f64::INFINITY;
                    }
                    worst = worst.max(linalg::max_diff(&(m2 * &m1), &m12));
                }
            }
        }
        worst
    }

    /// `{g : g·p = p}` for the action on base points.
    pub fn stabilizer(&self, point: usize) -> Subgroup {
        let elems: Vec<usize> =
            (0..self.group.order()).filter(|&g| self.act_h_part(g, point).0 == point).collect();
        Subgroup::from_elements(&self.group, &elems).expect("stabilizer is a subgroup")
    }

    /// Base points fixed by every element of `K`, with the dimension of the
    /// joint fixed subspace of the fiber there.
    pub fn total_fixed_points(&self, k: &Subgroup) -> Vec<(usize, usize)> {
        let d = self.fiber_dim();
        (0..self.base_points())
            .filter(|&p| k.elements().iter().all(|&x| self.act_h_part(x, p).0 == p))
            .map(|p| {
                let mut avg = CMat::zeros(d, d);
                for &x in k.elements() {
                    avg += self.act(x, p).1;
                }
                avg /= c(k.order() as f64, 0.0);
                (p, linalg::singular_values(&avg).iter().filter(|s| **s > 0.5).count())
            })
            .collect()
    }

    /// The single-block models `X_k` with the multiplicities of this model.
    pub fn component_models(&self) -> Vec<Arc<CanonicalModel>> {
        self.slots()
            .iter()
            .map(|s| {
                Arc::new(
                    Self::build_component(
                        self.group.clone(),
                        self.subgroup.clone(),
                        self.spec.irreps.clone(),
                        s.irrep,
                        s.multiplicity,
                    )
                    .expect("component of a valid model"),
                )
            })
            .collect()
    }

    /// Same group, subgroup and spec.
    pub fn same_as(&self, other: &CanonicalModel) -> bool {
        std::ptr::eq(self, other)
            || (self.subgroup == other.subgroup && self.spec.same_as(&other.spec) && self.group == other.group)
    }
}

/// Irreducibles of `H` in its local numbering.
pub fn subgroup_irreps(group: &FiniteGroup, subgroup: &Subgroup) -> Result<Arc<Irreducibles>> {
    Ok(Arc::new(irreducibles(&Arc::new(subgroup.to_group(group)))?))
}

/// `X_ρ` for `H ◁ G` from `(k, m_k)` pairs.
pub fn build_model(group: Arc<FiniteGroup>, subgroup: Subgroup, pairs: &[(usize, usize)]) -> Result<CanonicalModel> {
    if !group.is_normal(&subgroup) {
        return Err(Error::NotNormal(format!("stationary subgroup of order {}", subgroup.order())));
    }
    let irreps = subgroup_irreps(&group, &subgroup)?;
    CanonicalModel::build(group, subgroup, RepSpec::from_pairs(irreps, pairs)?)
}

/// `X_k` with a one-dimensional multiplicity space.
pub fn build_xk(group: Arc<FiniteGroup>, subgroup: Subgroup, k: usize) -> Result<CanonicalModel> {
    build_model(group, subgroup, &[(k, 1)])
}
