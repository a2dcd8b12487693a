//! Small groups used as the built-in verification catalog.

use super::{from_generators, from_permutations, FiniteGroup};

pub const NAMES: [&str; 8] = ["Z2", "Z3", "Z4", "Z2xZ2", "S3", "D4", "Q8", "A4"];

fn perm_group(degree: usize, gens: &[&[usize]]) -> FiniteGroup {
    let gens: Vec<Vec<usize>> = gens.iter().map(|g| g.to_vec()).collect();
    from_permutations(degree, &gens).expect("catalog generators are permutations").group
}

pub fn z2() -> FiniteGroup {
    FiniteGroup::cyclic(2)
}

pub fn z3() -> FiniteGroup {
    FiniteGroup::cyclic(3)
}

pub fn z4() -> FiniteGroup {
    FiniteGroup::cyclic(4)
}

pub fn z2xz2() -> FiniteGroup {
    perm_group(4, &[&[1, 0, 2, 3], &[0, 1, 3, 2]])
}

pub fn s3() -> FiniteGroup {
    perm_group(3, &[&[1, 0, 2], &[1, 2, 0]])
}

/// Symmetries of a square with vertices 1..4; `(1 2 3 4)` is the rotation and
/// `(2 4)` a reflection.
pub fn d4() -> FiniteGroup {
    perm_group(4, &[&[1, 2, 3, 0], &[0, 3, 2, 1]])
}

pub fn a4() -> FiniteGroup {
    perm_group(4, &[&[1, 2, 0, 3], &[1, 0, 3, 2]])
}

/// Quaternion units `±1, ±i, ±j, ±k`.
pub fn q8() -> FiniteGroup {
    type Q = [i8; 4];
    let mul = |p: &Q, q: &Q| -> Q {
        [
            p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
            p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
            p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
            p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
        ]
    };
    let label = |q: &Q| {
        let names = ["1", "i", "j", "k"];
        let pos = q.iter().position(|&c| c != 0).unwrap();
        let sign = if q[pos] < 0 { "-" } else { "" };
        format!("{sign}{}", names[pos])
    };
    from_generators([1, 0, 0, 0], &[[0, 1, 0, 0], [0, 0, 1, 0]], mul, label).0
}

pub fn by_name(name: &str) -> Option<FiniteGroup> {
    let g = match name.to_ascii_uppercase().as_str() {
        "Z2" | "C2" => z2(),
        "Z3" | "C3" => z3(),
        "Z4" | "C4" => z4(),
        "Z2XZ2" | "V4" | "K4" => z2xz2(),
        "S3" => s3(),
        "D4" | "D8" => d4(),
        "Q8" => q8(),
        "A4" => a4(),
        _ => {
            let n = name.strip_prefix(['Z', 'z', 'C', 'c'])?.parse::<usize>().ok()?;
            if n == 0 {
                return None;
            }
            FiniteGroup::cyclic(n)
        }
    };
    Some(g)
}

pub fn all() -> Vec<(&'static str, FiniteGroup)> {
    NAMES.iter().map(|n| (*n, by_name(n).unwrap())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_class_counts() {
        let expect = [(2, 2), (3, 3), (4, 4), (4, 4), (6, 3), (8, 5), (8, 5), (12, 4)];
        for ((name, g), (order, classes)) in all().into_iter().zip(expect) {
            assert_eq!(g.order(), order, "{name}");
            assert_eq!(g.conjugacy_classes().len(), classes, "{name}");
            assert!(g.verify_axioms(), "{name}");
        }
    }

    #[test]
    fn d4_reflection_normalizer() {
        let g = d4();
        let s = g.find("(2 4)").unwrap();
        let h = g.subgroup_closure(&[s]);
        let n = g.normalizer(&h);
        assert_eq!(n.order(), 4);
        let r2 = g.find("(1 3)(2 4)").unwrap();
        assert!(n.contains(r2));
        assert!(n.contains(g.mul(s, r2)));
        assert_eq!(g.conjugation_classes_of(&h).len(), 2);
        assert_eq!(g.all_subgroups(48).unwrap().len(), 10);
    }

    #[test]
    fn q8_is_not_abelian_and_has_one_involution() {
        let g = q8();
        assert!(!g.is_abelian());
        assert_eq!((1..8).filter(|&x| g.element_order(x) == 2).count(), 1);
        assert_eq!(g.all_subgroups(48).unwrap().len(), 6);
    }

    #[test]
    fn a4_subgroup_count() {
        assert_eq!(a4().all_subgroups(48).unwrap().len(), 10);
    }
}
