//! Finite groups given by multiplication tables.
//!
//! Elements are indices into the table and the identity is always index 0
//! once a table has passed [`FiniteGroup::from_table`]. Subgroups, cosets and
//! quotients live in the submodules.

mod coset;
mod perm;
mod subgroup;

pub mod catalog;

pub use coset::{CosetDecomposition, QuotientGroup};
pub use perm::{cycle_notation, from_generators, from_permutations, PermutationGroup};
pub use subgroup::{GroupHomomorphism, Subgroup, DEFAULT_SUBGROUP_BOUND};

use serde::{Deserialize, Serialize};

use crate::error::{Error, GroupAxiom, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    labels: Option<Vec<String>>,
    #[serde(skip)]
    classes: ConjugacyClasses,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct ConjugacyClasses {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

fn is_perm(n: usize, mut it: impl Iterator<Item = usize>) -> bool {
    let mut seen = vec![false; n];
    it.all(|x| !std::mem::replace(&mut seen[x], true))
}

fn not_a_group(axiom: GroupAxiom, detail: impl Into<String>) -> Error {
    Error::NotAGroup { axiom, detail: detail.into() }
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[x][y] = x·y`) and renumbers it
    /// so that the identity is element 0, keeping the relative order of the
    /// remaining elements.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_table_with_labels(table, None)
    }

    pub fn from_table_with_labels(table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(not_a_group(GroupAxiom::Shape, "empty table"));
        }
        if let Some(row) = table.iter().position(|r| r.len() != n) {
            return Err(not_a_group(GroupAxiom::Shape, format!("row {row} has wrong length")));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(not_a_group(GroupAxiom::Shape, "label count differs from order"));
            }
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(not_a_group(GroupAxiom::Shape, "entry out of range"));
        }
        for (i, row) in table.iter().enumerate() {
            if !is_perm(n, row.iter().copied()) {
                return Err(not_a_group(GroupAxiom::LatinSquare, format!("row {i} is not a permutation")));
            }
            if !is_perm(n, (0..n).map(|r| table[r][i])) {
                return Err(not_a_group(GroupAxiom::LatinSquare, format!("column {i} is not a permutation")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| not_a_group(GroupAxiom::Identity, "no two-sided identity"))?;
        for (x, row) in table.iter().enumerate() {
            if !(0..n).any(|y| row[y] == identity && table[y][x] == identity) {
                return Err(not_a_group(GroupAxiom::Inverse, format!("element {x} has no inverse")));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = table[x][y];
                for z in 0..n {
                    if table[xy][z] != table[x][table[y][z]] {
                        return Err(not_a_group(
                            GroupAxiom::Associativity,
                            format!("({x}·{y})·{z} != {x}·({y}·{z})"),
                        ));
                    }
                }
            }
        }

        // new index of old element
        let mut order_old: Vec<usize> = vec![identity];
        order_old.extend((0..n).filter(|&x| x != identity));
        let mut new_of_old = vec![0; n];
        for (new, &old) in order_old.iter().enumerate() {
            new_of_old[old] = new;
        }
        let table: Vec<Vec<usize>> = order_old
            .iter()
            .map(|&x| order_old.iter().map(|&y| new_of_old[table[x][y]]).collect())
            .collect();
        let labels = labels.map(|l| order_old.iter().map(|&o| l[o].clone()).collect());
        Ok(Self::assemble(table, labels))
    }

    /// Builds from a table already known to be a group with identity 0.
    pub(crate) fn assemble(table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Self {
        let n = table.len();
        let inverses = (0..n).map(|x| (0..n).find(|&y| table[x][y] == 0).unwrap()).collect();
        let mut g = FiniteGroup { order: n, table, inverses, labels, classes: Default::default() };
        g.classes = g.compute_classes();
        g
    }

    fn compute_classes(&self) -> ConjugacyClasses {
        let n = self.order;
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let mut cls: Vec<usize> = (0..n).map(|g| self.conj(g, x)).collect();
            cls.sort_unstable();
            cls.dedup();
            for &y in &cls {
                class_of[y] = classes.len();
            }
            classes.push(cls);
        }
        ConjugacyClasses { classes, class_of }
    }

    /// Rebuild cached data after deserialisation.
    pub fn revalidate(self) -> Result<Self> {
        Self::from_table_with_labels(self.table, self.labels)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// Element whose label is `label`, or whose index is `label` parsed as an integer.
    pub fn find(&self, label: &str) -> Option<usize> {
        if let Some(l) = &self.labels {
            if let Some(i) = l.iter().position(|s| s == label) {
                return Some(i);
            }
        }
        label.trim().parse::<usize>().ok().filter(|&i| i < self.order)
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inverses[x]
    }

    /// `g x g⁻¹`
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn product<I: IntoIterator<Item = usize>>(&self, it: I) -> usize {
        it.into_iter().fold(0, |acc, x| self.mul(acc, x))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// Conjugacy classes ordered by smallest element, so the identity class is first.
    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        &self.classes.classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.classes.class_of[x]
    }

    /// A small generating set: greedily add the smallest element not yet generated.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial(self);
        while span.order() < self.order {
            let x = (0..self.order).find(|&x| !span.contains(x)).unwrap();
            gens.push(x);
            span = self.subgroup_closure(&gens);
        }
        gens
    }

    /// Breadth-first words: for each element, a path from the identity
    /// `(previous element, generator)` such that `element = previous · generator`.
    #[cfg(test)]
    pub(crate) fn cayley_paths(&self, gens: &[usize]) -> Vec<Option<(usize, usize)>> {
        let mut parent = vec![None; self.order];
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, s));
                    queue.push_back(y);
                }
            }
        }
        parent
    }

    /// Direct product with element `(a, b)` at index `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order, other.order);
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        let labels = (0..n * m)
            .map(|x| format!("({},{})", self.label(x / m), other.label(x % m)))
            .collect();
        FiniteGroup::assemble(table, Some(labels))
    }

    /// Cyclic group of order `n` with generator 1.
    pub fn cyclic(n: usize) -> FiniteGroup {
        let table = (0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect();
        let labels = (0..n).map(|x| format!("g^{x}")).collect();
        FiniteGroup::assemble(table, Some(labels))
    }

    /// Checks associativity, identity and inverse axioms on every element.
    pub fn verify_axioms(&self) -> bool {
        FiniteGroup::from_table(self.table.clone()).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_from_table() {
        let g = FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inv(1), 1);
    }

    #[test]
    fn constant_table_is_not_latin() {
        let err = FiniteGroup::from_table(vec![vec![0, 0], vec![0, 0]]).unwrap_err();
        assert!(matches!(err, Error::NotAGroup { axiom: GroupAxiom::LatinSquare, .. }));
    }

    #[test]
    fn renumbers_identity_to_zero() {
        // Z3 with identity stored at index 2
        let t = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = FiniteGroup::from_table(t).unwrap();
        assert_eq!(g.mul(0, 1), 1);
        assert_eq!(g.mul(1, 2), 0);
        assert!(g.verify_axioms());
    }

    #[test]
    fn latin_square_without_associativity() {
        // A latin square with identity 0 that is not associative (order-5 loop).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table(t).unwrap_err();
        assert!(matches!(err, Error::NotAGroup { axiom: GroupAxiom::Associativity, .. }));
    }

    #[test]
    fn direct_product_orders() {
        let g = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(3));
        assert_eq!(g.order(), 6);
        assert!(g.is_abelian());
        assert!(g.verify_axioms());
        assert_eq!(g.conjugacy_classes().len(), 6);
    }

    #[test]
    fn generators_generate() {
        let g = catalog::a4();
        let gens = g.generators();
        assert_eq!(g.subgroup_closure(&gens).order(), 12);
        assert!(gens.len() <= 2);
    }
}
