use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::FiniteGroup;
use crate::error::{Error, Result};

/// Largest group order for which the subgroup lattice is enumerated.
pub const DEFAULT_SUBGROUP_BOUND: usize = 48;

/// A subgroup stored as the sorted list of its element indices in the parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn trivial(_g: &FiniteGroup) -> Self {
        Subgroup { elements: vec![0] }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup { elements: (0..g.order()).collect() }
    }

    /// Checks closure in `g` and returns the subgroup.
    pub fn from_elements(g: &FiniteGroup, elements: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if set.iter().any(|&x| x >= g.order()) {
            return Err(Error::InvalidInput("subgroup element out of range".into()));
        }
        if !set.contains(&0) {
            return Err(Error::InvalidInput("subgroup must contain the identity".into()));
        }
        for &x in &set {
            if !set.contains(&g.inv(x)) || set.iter().any(|&y| !set.contains(&g.mul(x, y))) {
                return Err(Error::InvalidInput("element set is not closed".into()));
            }
        }
        let s = Subgroup { elements: set.into_iter().collect() };
        debug_assert_eq!(g.order() % s.order(), 0);
        Ok(s)
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// Position of a parent element inside the sorted element list.
    pub fn local_index(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    /// The subgroup as a group in its own right. Local index `i` corresponds to
    /// parent element `elements()[i]`; since the identity is the smallest parent
    /// index it stays at local index 0, and nested subgroups keep a consistent
    /// numbering.
    pub fn to_group(&self, g: &FiniteGroup) -> FiniteGroup {
        let table = self
            .elements
            .iter()
            .map(|&x| {
                self.elements
                    .iter()
                    .map(|&y| self.local_index(g.mul(x, y)).expect("subgroup closed"))
                    .collect()
            })
            .collect();
        let labels = g.labels().map(|_| self.elements.iter().map(|&x| g.label(x)).collect());
        FiniteGroup::assemble(table, labels)
    }

    /// The same subgroup expressed in the local numbering of `ambient`.
    pub fn relative_to(&self, ambient: &Subgroup) -> Option<Subgroup> {
        let elements: Option<Vec<usize>> =
            self.elements.iter().map(|&x| ambient.local_index(x)).collect();
        elements.map(|mut e| {
            e.sort_unstable();
            Subgroup { elements: e }
        })
    }

    /// Parent-numbered subgroup from a subgroup of `self.to_group()`.
    pub fn lift_from_local(&self, local: &Subgroup) -> Subgroup {
        let mut e: Vec<usize> = local.elements.iter().map(|&i| self.elements[i]).collect();
        e.sort_unstable();
        Subgroup { elements: e }
    }
}

/// A map between groups that is checked to be multiplicative.
#[derive(Debug, Clone)]
pub struct GroupHomomorphism {
    pub domain: FiniteGroup,
    pub codomain: FiniteGroup,
    pub map: Vec<usize>,
}

impl GroupHomomorphism {
    pub fn new(domain: FiniteGroup, codomain: FiniteGroup, map: Vec<usize>) -> Result<Self> {
        let h = GroupHomomorphism { domain, codomain, map };
        if h.map.len() != h.domain.order() || !h.is_homomorphism() {
            return Err(Error::InvalidInput("map is not a homomorphism".into()));
        }
        Ok(h)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_homomorphism(&self) -> bool {
        let n = self.domain.order();
        self.map[0] == 0
            && (0..n).all(|x| {
                (0..n).all(|y| {
                    self.map[self.domain.mul(x, y)] == self.codomain.mul(self.map[x], self.map[y])
                })
            })
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.codomain.order()];
        self.domain.order() == self.codomain.order()
            && self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }
}

impl FiniteGroup {
    pub fn subgroup_closure(&self, generators: &[usize]) -> Subgroup {
        let mut inside = vec![false; self.order()];
        inside[0] = true;
        let mut elems = vec![0];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &s in generators {
                let y = self.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Subgroup { elements: elems }
    }

    /// Every subgroup, sorted by order then elements.
    ///
    /// Closure of all generator sets of size at most two, then saturated under
    /// joins. Groups larger than `bound` are rejected.
    pub fn all_subgroups(&self, bound: usize) -> Result<Vec<Subgroup>> {
        if self.order() > bound {
            return Err(Error::TooLarge(format!(
                "subgroup enumeration needs |G| <= {bound}, got {}",
                self.order()
            )));
        }
        let n = self.order();
        let mut found: BTreeSet<Subgroup> = BTreeSet::new();
        found.insert(Subgroup::trivial(self));
        for x in 0..n {
            for y in x..n {
                found.insert(self.subgroup_closure(&[x, y]));
            }
        }
        loop {
            let current: Vec<Subgroup> = found.iter().cloned().collect();
            let mut grew = false;
            for (i, a) in current.iter().enumerate() {
                for b in &current[i + 1..] {
                    if a.is_subgroup_of(b) || b.is_subgroup_of(a) {
                        continue;
                    }
                    let mut gens = a.elements.clone();
                    gens.extend_from_slice(&b.elements);
                    if found.insert(self.subgroup_closure(&gens)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut out: Vec<Subgroup> = found.into_iter().collect();
        out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    pub fn conjugate_subgroup(&self, g: usize, h: &Subgroup) -> Subgroup {
        let mut e: Vec<usize> = h.elements.iter().map(|&x| self.conj(g, x)).collect();
        e.sort_unstable();
        Subgroup { elements: e }
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        (0..self.order()).all(|g| h.elements.iter().all(|&x| h.contains(self.conj(g, x))))
    }

    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        let elements = (0..self.order())
            .filter(|&g| h.elements.iter().all(|&x| h.contains(self.conj(g, x))))
            .collect();
        Subgroup { elements }
    }

    /// One entry per left coset `g N(H)`, keyed by the smallest element of the
    /// coset, together with the conjugate `gHg⁻¹`.
    pub fn conjugation_classes_of(&self, h: &Subgroup) -> Vec<(usize, Subgroup)> {
        let n = self.normalizer(h);
        let dec = self.coset_decomposition(&n);
        dec.transversal()
            .iter()
            .map(|&g| (g, self.conjugate_subgroup(g, h)))
            .collect()
    }

    /// `s_g : N(H) → N(gHg⁻¹)`, `n ↦ g n g⁻¹`, between the normalizers as groups
    /// in their own right.
    pub fn conjugation_homomorphism(&self, g: usize, h: &Subgroup) -> GroupHomomorphism {
        let n = self.normalizer(h);
        let ng = self.normalizer(&self.conjugate_subgroup(g, h));
        let map = n
            .elements
            .iter()
            .map(|&x| ng.local_index(self.conj(g, x)).expect("conjugate normalizer"))
            .collect();
        GroupHomomorphism { domain: n.to_group(self), codomain: ng.to_group(self), map }
    }
}

#[cfg(test)]
mod tests {
    use super::super::catalog;
    use super::*;

    #[test]
    fn closure_of_nothing_is_trivial() {
        let g = catalog::s3();
        assert_eq!(g.subgroup_closure(&[]).elements(), &[0]);
    }

    #[test]
    fn s3_subgroup_orders() {
        let g = catalog::s3();
        let t = g.find("(1 2)").unwrap();
        let r = g.find("(1 2 3)").unwrap();
        assert_eq!(g.subgroup_closure(&[t]).order(), 2);
        assert_eq!(g.subgroup_closure(&[t, r]).order(), 6);
        let subs = g.all_subgroups(DEFAULT_SUBGROUP_BOUND).unwrap();
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
    }

    #[test]
    fn normalizer_of_transposition() {
        let g = catalog::s3();
        let h = g.subgroup_closure(&[g.find("(1 2)").unwrap()]);
        assert_eq!(g.normalizer(&h), h);
        assert_eq!(g.conjugation_classes_of(&h).len(), 3);
    }

    #[test]
    fn conjugate_transposition() {
        let g = catalog::s3();
        let h = g.subgroup_closure(&[g.find("(1 2)").unwrap()]);
        let c = g.conjugate_subgroup(g.find("(1 2 3)").unwrap(), &h);
        assert_eq!(c, g.subgroup_closure(&[g.find("(2 3)").unwrap()]));
    }

    #[test]
    fn too_large() {
        let g = FiniteGroup::cyclic(50);
        assert!(matches!(g.all_subgroups(DEFAULT_SUBGROUP_BOUND), Err(Error::TooLarge(_))));
    }

    #[test]
    fn to_group_keeps_identity_first() {
        let g = catalog::d4();
        for s in g.all_subgroups(48).unwrap() {
            let sg = s.to_group(&g);
            assert_eq!(sg.order(), s.order());
            assert!(sg.verify_axioms());
            assert_eq!(s.elements()[0], 0);
        }
    }

    #[test]
    fn conjugation_homomorphism_is_isomorphism() {
        let g = catalog::a4();
        let h = g.subgroup_closure(&[g.find("(1 2)(3 4)").unwrap()]);
        for x in 0..g.order() {
            let s = g.conjugation_homomorphism(x, &h);
            assert!(s.is_homomorphism());
            assert!(s.is_bijective());
        }
    }
}
