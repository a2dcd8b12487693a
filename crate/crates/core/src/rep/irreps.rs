use std::cmp::Ordering;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::character::{character_table, inner_product, CharacterTable, ClassFunction};
use super::Representation;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_SUBGROUP_BOUND};
use crate::linalg::{self, c, CMat};
use crate::tolerance;

/// The complete list of unitary irreducibles of a group in canonical order,
/// together with the character table in the same order.
#[derive(Debug, Clone)]
pub struct Irreducibles {
    pub table: CharacterTable,
    pub reps: Vec<Representation>,
}

impl Irreducibles {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn degree(&self, k: usize) -> usize {
        self.table.degrees[k]
    }

    pub fn character(&self, k: usize) -> &ClassFunction {
        &self.table.rows[k]
    }

    /// Always 0 under the canonical ordering.
    pub fn trivial_index(&self) -> usize {
        self.table.trivial_index()
    }

    /// Index of the irreducible whose character is `chi`, if `chi` is irreducible.
    pub fn identify(&self, group: &FiniteGroup, chi: &ClassFunction) -> Option<usize> {
        if (inner_product(group, chi, chi) - c(1.0, 0.0)).norm() > 1e-6 {
            return None;
        }
        self.table
            .rows
            .iter()
            .position(|row| (inner_product(group, chi, row) - c(1.0, 0.0)).norm() < 1e-6)
    }
}

/// Degree ascending; equal degrees compare characters class by class, larger
/// real part first, then larger imaginary part. This puts the trivial
/// character first.
fn canonical_order(a: &(usize, ClassFunction), b: &(usize, ClassFunction)) -> Ordering {
    let key = |x: f64| (x * 1e6).round() as i64;
    a.0.cmp(&b.0).then_with(|| {
        for (x, y) in a.1.values.iter().zip(&b.1.values) {
            let o = key(y.re).cmp(&key(x.re)).then(key(y.im).cmp(&key(x.im)));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

/// Splits the `χ`-isotypic part of the regular representation into one copy of
/// the irreducible: project with the central idempotent, then cut out a
/// `d`-dimensional eigenspace of a random group-averaged Hermitian matrix,
/// which lies in the commutant and so respects the `F ⊗ V` splitting.
fn realize(group: &Arc<FiniteGroup>, chi: &ClassFunction, degree: usize, rng: &mut ChaCha8Rng) -> Result<Representation> {
    let n = group.order();
    if degree == 1 {
        let mats = (0..n)
            .map(|g| CMat::from_element(1, 1, chi.values[group.class_of(g)]))
            .collect();
        return Representation::new(group.clone(), mats);
    }
    let regular = Representation::regular(group.clone());
    let mut proj = CMat::zeros(n, n);
    for g in 0..n {
        proj += regular.matrix(g) * chi.values[group.class_of(g)].conj();
    }
    proj *= c(degree as f64 / n as f64, 0.0);
    let (vals, vecs) = linalg::hermitian_eigen(&proj);
    let dim = degree * degree;
    let found = vals.iter().filter(|v| **v > 0.5).count();
    if found != dim {
        return Err(Error::ConvergenceFailure(format!("isotypic block has dimension {found}, expected {dim}")));
    }
    let basis = vecs.columns(n - dim, dim).into_owned();
    let block: Vec<CMat> = (0..n).map(|g| basis.adjoint() * regular.matrix(g) * &basis).collect();

    for _ in 0..16 {
        let x = linalg::random_gaussian(dim, dim, rng);
        let x = &x + x.adjoint();
        let mut avg = CMat::zeros(dim, dim);
        for m in &block {
            avg += m * &x * m.adjoint();
        }
        avg /= c(n as f64, 0.0);
        let (ev, evecs) = linalg::hermitian_eigen(&avg);
        let scale = ev.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let top = &ev[dim - degree..];
        let spread = top[degree - 1] - top[0];
        let gap = top[0] - ev[dim - degree - 1];
        if spread > 1e-9 * scale || gap < 1e-4 * scale {
            continue;
        }
        let w = evecs.columns(dim - degree, degree).into_owned();
        let mats: Vec<CMat> = block.iter().map(|m| w.adjoint() * m * &w).collect();
        let rep = Representation::new(group.clone(), mats)?;
        let res = (inner_product(group, &rep.character(), chi) - c(1.0, 0.0)).norm();
        if res > tolerance::VERIFY || rep.unitarity_residual() > tolerance::VERIFY {
            continue;
        }
        return Ok(rep);
    }
    Err(Error::ConvergenceFailure(format!("could not split isotypic block of degree {degree}")))
}

/// All unitary irreducibles of `group`, in canonical order.
pub fn irreducibles(group: &Arc<FiniteGroup>) -> Result<Irreducibles> {
    if group.order() > DEFAULT_SUBGROUP_BOUND {
        return Err(Error::TooLarge(format!(
            "irreducible construction needs |H| <= {DEFAULT_SUBGROUP_BOUND}"
        )));
    }
    let raw = character_table(group)?;
    let mut rows: Vec<(usize, ClassFunction)> = raw.degrees.iter().copied().zip(raw.rows).collect();
    rows.sort_by(canonical_order);
    let mut rng = ChaCha8Rng::seed_from_u64(0x001e_5eed);
    let reps = rows
        .iter()
        .map(|(d, chi)| realize(group, chi, *d, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let table = CharacterTable {
        class_representatives: raw.class_representatives,
        class_sizes: raw.class_sizes,
        degrees: rows.iter().map(|r| r.0).collect(),
        rows: rows.into_iter().map(|r| r.1).collect(),
    };
    Ok(Irreducibles { table, reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    #[test]
    fn trivial_group() {
        let g = Arc::new(FiniteGroup::cyclic(1));
        let irr = irreducibles(&g).unwrap();
        assert_eq!(irr.len(), 1);
        assert_eq!(irr.degree(0), 1);
    }

    #[test]
    fn z3_characters_are_cube_roots() {
        let g = Arc::new(catalog::z3());
        let irr = irreducibles(&g).unwrap();
        assert_eq!(irr.len(), 3);
        let w = c(-0.5, 3f64.sqrt() / 2.0);
        // class order = element order for an abelian group; generator is g^1
        let values: Vec<_> = (0..3).map(|k| irr.character(k).values[1]).collect();
        assert!((values[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((values[1] - w).norm() < 1e-10);
        assert!((values[2] - w.conj()).norm() < 1e-10);
    }

    #[test]
    fn canonical_degrees_and_unitarity() {
        for (name, g) in catalog::all() {
            let g = Arc::new(g);
            let irr = irreducibles(&g).unwrap();
            assert_eq!(irr.trivial_index(), 0, "{name}");
            assert_eq!(irr.len(), g.conjugacy_classes().len(), "{name}");
            assert!(irr.table.degrees.windows(2).all(|w| w[0] <= w[1]), "{name}");
            for (k, rep) in irr.reps.iter().enumerate() {
                assert!(rep.unitarity_residual() < 1e-9, "{name} {k}");
                assert!(rep.homomorphism_residual() < 1e-9, "{name} {k}");
                let chi = rep.character();
                assert!((inner_product(&g, &chi, irr.character(k)) - c(1.0, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn deterministic() {
        let g = Arc::new(catalog::a4());
        let a = irreducibles(&g).unwrap();
        let b = irreducibles(&g).unwrap();
        for (x, y) in a.reps.iter().zip(&b.reps) {
            for (m, n) in x.matrices().iter().zip(y.matrices()) {
                assert_eq!(m, n);
            }
        }
    }
}
