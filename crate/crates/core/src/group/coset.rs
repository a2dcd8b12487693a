use super::{FiniteGroup, Subgroup};
use crate::error::{Error, Result};

/// Left cosets `gH` ordered by their smallest element, with that smallest
/// element as the transversal representative `s([g])`. The coset of the
/// identity is therefore coset 0 with representative 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetDecomposition {
    subgroup: Subgroup,
    cosets: Vec<Vec<usize>>,
    coset_of: Vec<usize>,
    transversal: Vec<usize>,
}

impl CosetDecomposition {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    pub fn transversal(&self) -> &[usize] {
        &self.transversal
    }

    /// `s([g])` for a coset index.
    pub fn representative(&self, coset: usize) -> usize {
        self.transversal[coset]
    }

    /// The H-part `u(g) = s([g])⁻¹ g`, so that `g = s([g]) · u(g)`.
    pub fn h_part(&self, group: &FiniteGroup, g: usize) -> usize {
        group.mul(group.inv(self.transversal[self.coset_of[g]]), g)
    }
}

/// `G₀ = G/H` as a group on coset indices.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    cosets: CosetDecomposition,
    group: FiniteGroup,
}

impl QuotientGroup {
    pub fn cosets(&self) -> &CosetDecomposition {
        &self.cosets
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn project(&self, g: usize) -> usize {
        self.cosets.coset_of(g)
    }
}

impl FiniteGroup {
    pub fn coset_decomposition(&self, h: &Subgroup) -> CosetDecomposition {
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut cosets = Vec::new();
        let mut transversal = Vec::new();
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = h.elements().iter().map(|&x| self.mul(g, x)).collect();
            c.sort_unstable();
            for &y in &c {
                coset_of[y] = cosets.len();
            }
            transversal.push(g);
            cosets.push(c);
        }
        CosetDecomposition { subgroup: h.clone(), cosets, coset_of, transversal }
    }

    pub fn quotient_group(&self, h: &Subgroup) -> Result<QuotientGroup> {
        if !self.is_normal(h) {
            return Err(Error::NotNormal(format!(
                "subgroup of order {} in group of order {}",
                h.order(),
                self.order()
            )));
        }
        let cosets = self.coset_decomposition(h);
        let k = cosets.len();
        let table = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| cosets.coset_of(self.mul(cosets.representative(a), cosets.representative(b))))
                    .collect()
            })
            .collect();
        let labels = self
            .labels()
            .map(|_| (0..k).map(|a| format!("[{}]", self.label(cosets.representative(a)))).collect());
        let group = FiniteGroup::assemble(table, labels);
        Ok(QuotientGroup { cosets, group })
    }
}

#[cfg(test)]
mod tests {
    use super::super::catalog;
    use super::*;

    #[test]
    fn whole_group_is_one_coset() {
        let g = catalog::d4();
        let dec = g.coset_decomposition(&Subgroup::whole(&g));
        assert_eq!(dec.len(), 1);
    }

    #[test]
    fn s3_mod_a3_is_z2() {
        let g = catalog::s3();
        let a3 = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        let q = g.quotient_group(&a3).unwrap();
        assert_eq!(q.group().order(), 2);
        assert!(q.group().verify_axioms());
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(q.project(g.mul(x, y)), q.group().mul(q.project(x), q.project(y)));
            }
        }
    }

    #[test]
    fn non_normal_quotient_rejected() {
        let g = catalog::s3();
        let h = g.subgroup_closure(&[g.find("(1 2)").unwrap()]);
        assert!(matches!(g.quotient_group(&h), Err(Error::NotNormal(_))));
    }

    #[test]
    fn h_part_reconstructs() {
        let g = catalog::s3();
        let a3 = g.subgroup_closure(&[g.find("(1 2 3)").unwrap()]);
        let dec = g.coset_decomposition(&a3);
        assert_eq!(dec.h_part(&g, 0), 0);
        let x = g.mul(g.find("(1 2)").unwrap(), g.find("(1 2 3)").unwrap());
        let u = dec.h_part(&g, x);
        assert!(a3.contains(u));
        // transversal of the odd coset is its smallest element
        let s = dec.representative(dec.coset_of(x));
        assert_eq!(u, g.mul(g.inv(s), x));
        assert_eq!(g.mul(s, u), x);
    }
}
