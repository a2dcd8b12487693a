use super::FiniteGroup;
use crate::error::{Error, Result};

/// A group built from permutations, keeping the permutation of every element.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    pub group: FiniteGroup,
    pub degree: usize,
    pub permutations: Vec<Vec<usize>>,
}

impl PermutationGroup {
    pub fn index_of(&self, perm: &[usize]) -> Option<usize> {
        self.permutations.iter().position(|p| p == perm)
    }
}

/// Cycle notation with 1-based points, e.g. `(1 2 3)(4 5)`; `()` for the identity.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut x = perm[start];
        while x != start {
            seen[x] = true;
            cycle.push(x + 1);
            x = perm[x];
        }
        let inner: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
        out.push('(');
        out.push_str(&inner.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Closes a set of generators under a multiplication and returns the group,
/// with elements sorted by `Ord` except that `identity` is placed first.
pub fn from_generators<T, F, L>(identity: T, generators: &[T], mul: F, label: L) -> (FiniteGroup, Vec<T>)
where
    T: Ord + Clone,
    F: Fn(&T, &T) -> T,
    L: Fn(&T) -> String,
{
    let mut elems = vec![identity.clone()];
    let mut set = std::collections::BTreeSet::from([identity.clone()]);
    let mut i = 0;
    while i < elems.len() {
        for s in generators {
            let y = mul(&elems[i], s);
            if set.insert(y.clone()) {
                elems.push(y);
            }
        }
        i += 1;
    }
    let mut sorted: Vec<T> = set.into_iter().filter(|x| *x != identity).collect();
    sorted.insert(0, identity);
    let index = |x: &T| {
        if *x == sorted[0] {
            0
        } else {
            sorted[1..].binary_search(x).map(|i| i + 1).expect("closed")
        }
    };
    let table = sorted
        .iter()
        .map(|x| sorted.iter().map(|y| index(&mul(x, y))).collect())
        .collect();
    let labels = sorted.iter().map(&label).collect();
    (FiniteGroup::assemble(table, Some(labels)), sorted)
}

/// Group generated by one-line permutations of `0..degree`, composed as
/// functions: `(p·q)(i) = p(q(i))`.
pub fn from_permutations(degree: usize, generators: &[Vec<usize>]) -> Result<PermutationGroup> {
    for g in generators {
        let mut seen = vec![false; degree];
        if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::InvalidInput(format!("{g:?} is not a permutation of 0..{degree}")));
        }
    }
    let identity: Vec<usize> = (0..degree).collect();
    let compose = |p: &Vec<usize>, q: &Vec<usize>| q.iter().map(|&i| p[i]).collect::<Vec<usize>>();
    let (group, permutations) = from_generators(identity, generators, compose, |p| cycle_notation(p));
    Ok(PermutationGroup { group, degree, permutations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_from_transposition_and_three_cycle() {
        let pg = from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(pg.group.order(), 6);
        assert_eq!(pg.group.conjugacy_classes().len(), 3);
        assert!(pg.group.verify_axioms());
        assert_eq!(pg.group.label(0), "()");
    }

    #[test]
    fn composition_is_right_to_left() {
        let pg = from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let g = &pg.group;
        let t = g.find("(1 2)").unwrap();
        let r = g.find("(1 2 3)").unwrap();
        // (1 2)(1 2 3): 1 -> 2 -> 1, 2 -> 3, 3 -> 1 -> 2
        assert_eq!(g.label(g.mul(t, r)), "(2 3)");
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(from_permutations(3, &[vec![0, 0, 1]]).is_err());
    }

    #[test]
    fn closure_matches_brute_force_composition() {
        // independent enumeration: all words of length <= 6 in the generators
        let gens = vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]];
        let pg = from_permutations(4, &gens).unwrap();
        let mut words: std::collections::BTreeSet<Vec<usize>> = [vec![0, 1, 2, 3]].into();
        for _ in 0..6 {
            let cur: Vec<_> = words.iter().cloned().collect();
            for w in cur {
                for g in &gens {
                    words.insert(g.iter().map(|&i| w[i]).collect());
                }
            }
        }
        assert_eq!(words.len(), 24);
        assert_eq!(pg.group.order(), 24);
    }
}
