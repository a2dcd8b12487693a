use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{self, c, CMat};
use crate::tolerance;

/// A function on conjugacy classes, in the group's class order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFunction {
    pub values: Vec<Complex64>,
}

/// `(1/|G|) Σ_c |c| a(c) conj(b(c))`
pub fn inner_product(group: &FiniteGroup, a: &ClassFunction, b: &ClassFunction) -> Complex64 {
    let sum: Complex64 = group
        .conjugacy_classes()
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(cls, (x, y))| x * y.conj() * cls.len() as f64)
        .sum();
    sum / group.order() as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterTable {
    pub class_representatives: Vec<usize>,
    pub class_sizes: Vec<usize>,
    pub degrees: Vec<usize>,
    /// `rows[k]` is the character of the k-th irreducible.
    pub rows: Vec<ClassFunction>,
}

impl CharacterTable {
    /// Max deviation of the Gram matrix of the rows from the identity.
    pub fn orthonormality_residual(&self, group: &FiniteGroup) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, a) in self.rows.iter().enumerate() {
            for (k, b) in self.rows.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((inner_product(group, a, b) - c(want, 0.0)).norm());
            }
        }
        worst
    }

    pub fn sum_of_squared_degrees(&self) -> usize {
        self.degrees.iter().map(|d| d * d).sum()
    }

    /// Index of the trivial character.
    pub fn trivial_index(&self) -> usize {
        self.rows
            .iter()
            .position(|r| r.values.iter().all(|v| (*v - c(1.0, 0.0)).norm() < 1e-6))
            .expect("trivial character present")
    }
}

/// Structure constants `c[j][i][k] = #{(x, y) ∈ K_j × K_i : xy = g_k}`.
fn class_structure_constants(group: &FiniteGroup) -> Vec<Vec<Vec<usize>>> {
    let classes = group.conjugacy_classes();
    let r = classes.len();
    let mut out = vec![vec![vec![0; r]; r]; r];
    for (j, kj) in classes.iter().enumerate() {
        for (k, kk) in classes.iter().enumerate() {
            let target = kk[0];
            for &x in kj {
                let y = group.mul(group.inv(x), target);
                out[j][group.class_of(y)][k] += 1;
            }
        }
    }
    out
}

/// Character table from the commuting family of class-sum multiplication
/// operators on the centre of the group algebra.
///
/// In the basis `Ĉ_k / sqrt|K_k|` these operators are normal, so a random
/// real combination of their Hermitian and anti-Hermitian parts is a single
/// Hermitian matrix whose eigenvectors are the central idempotents. Rows are
/// returned in class-eigenvector order; callers sort them.
pub fn character_table(group: &FiniteGroup) -> Result<CharacterTable> {
    let classes = group.conjugacy_classes();
    let r = classes.len();
    let sizes: Vec<usize> = classes.iter().map(|k| k.len()).collect();
    let consts = class_structure_constants(group);
    let ops: Vec<CMat> = (0..r)
        .map(|j| {
            CMat::from_fn(r, r, |k, i| {
                c(consts[j][i][k] as f64 * (sizes[k] as f64 / sizes[i] as f64).sqrt(), 0.0)
            })
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0x00c1_a55e5);
    for _attempt in 0..16 {
        let mut h = CMat::zeros(r, r);
        for op in &ops {
            let t: f64 = rng.random_range(-1.0..1.0);
            let u: f64 = rng.random_range(-1.0..1.0);
            h += (op + op.adjoint()) * c(t, 0.0) + (op - op.adjoint()) * c(0.0, u);
        }
        let (vals, vecs) = linalg::hermitian_eigen(&h);
        let scale = vals.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let min_gap = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if r > 1 && min_gap < 1e-4 * scale {
            continue;
        }
        let mut rows = Vec::with_capacity(r);
        let mut degrees = Vec::with_capacity(r);
        for col in 0..r {
            let psi: Vec<Complex64> =
                (0..r).map(|k| vecs[(k, col)].conj() / (sizes[k] as f64).sqrt()).collect();
            let norm2: f64 = psi.iter().zip(&sizes).map(|(v, &s)| v.norm_sqr() * s as f64).sum();
            let d = psi[0].norm() * (group.order() as f64 / norm2).sqrt();
            let degree = d.round();
            if (d - degree).abs() > 1e-6 || degree < 1.0 {
                return Err(Error::ConvergenceFailure(format!("non-integral degree {d}")));
            }
            let factor = c(d, 0.0) / psi[0];
            rows.push(ClassFunction { values: psi.iter().map(|v| v * factor).collect() });
            degrees.push(degree as usize);
        }
        let table = CharacterTable {
            class_representatives: classes.iter().map(|k| k[0]).collect(),
            class_sizes: sizes,
            degrees,
            rows,
        };
        let res = table.orthonormality_residual(group);
        if res > tolerance::VERIFY {
            return Err(Error::ConvergenceFailure(format!("orthonormality residual {res:.2e}")));
        }
        return Ok(table);
    }
    Err(Error::ConvergenceFailure("class-sum spectrum stayed degenerate".into()))
}
