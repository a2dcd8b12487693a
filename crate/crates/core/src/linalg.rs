//! Dense complex linear algebra used throughout: Kronecker products, direct sums,
//! Hermitian eigen-splitting and the intertwiner solver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;

/// Tolerance used to decide that a Gram eigenvalue is zero when solving
/// homogeneous linear systems, relative to the largest eigenvalue.
pub const NULLSPACE_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Max-norm of a matrix (largest entry modulus). Zero for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `a ⊗ b`, with `a` as the outer index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn direct_sum(blocks: &[CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut col) = (0, 0);
    for b in blocks {
        out.view_mut((r, col), b.shape()).copy_from(b);
        r += b.nrows();
        col += b.ncols();
    }
    out
}

/// Residual of `m m* = I`.
pub fn unitarity_residual(m: &CMat) -> f64 {
    max_diff(&(m * m.adjoint()), &eye(m.nrows()))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
/// Columns of the returned matrix are the corresponding orthonormal eigenvectors.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vecs)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

pub fn min_singular_value(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Hermitian positive-definite square root and its inverse.
pub fn hermitian_sqrt_pair(m: &CMat) -> (CMat, CMat) {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let mut d = CMat::zeros(n, n);
    let mut di = CMat::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        d[(i, i)] = c(s, 0.0);
        di[(i, i)] = c(1.0 / s, 0.0);
    }
    let vh = vecs.adjoint();
    (&vecs * d * &vh, &vecs * di * vh)
}

/// Column-major vectorisation.
pub fn vec_of(m: &CMat) -> Vec<Complex64> {
    m.iter().copied().collect()
}

pub fn unvec(v: &[Complex64], rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v)
}

/// Basis of the space `{X : left[i] X = X right[i] for all i}`.
///
/// The basis is orthonormal for the Frobenius inner product. `left[i]` and
/// `right[i]` must be square; `X` has `left` rows and `right` columns.
pub fn intertwiners(left: &[CMat], right: &[CMat]) -> Vec<CMat> {
    assert_eq!(left.len(), right.len());
    let (p, q) = match (left.first(), right.first()) {
        (Some(l), Some(r)) => (l.nrows(), r.nrows()),
        _ => return Vec::new(),
    };
    let n = p * q;
    let ip = eye(p);
    let iq = eye(q);
    let mut gram = CMat::zeros(n, n);
    for (l, r) in left.iter().zip(right) {
        // vec(L X - X R) = (I_q ⊗ L - R^T ⊗ I_p) vec(X)
        let k = kron(&iq, l) - kron(&r.transpose(), &ip);
        gram += k.adjoint() * &k;
    }
    let (vals, vecs) = hermitian_eigen(&gram);
    let scale = vals.last().copied().unwrap_or(0.0).max(1.0);
    vals.iter()
        .enumerate()
        .take_while(|(_, v)| **v <= NULLSPACE_TOL * scale)
        .map(|(i, _)| {
            let col: Vec<Complex64> = vecs.column(i).iter().copied().collect();
            unvec(&col, p, q)
        })
        .collect()
}

pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Haar-ish random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let qr = random_gaussian(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = out.column_mut(j);
        col *= phase;
    }
    out
}

/// A random well-conditioned invertible matrix: a unitary times a diagonal
/// with moduli in `[0.5, 2]`.
pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let d = CMat::from_fn(n, n, |i, j| {
        if i == j {
            c(rng.random_range(0.5..2.0), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    u * d * v
}

/// Random linear combination of `basis` with Gaussian complex coefficients.
pub fn random_combination<R: Rng + ?Sized>(basis: &[CMat], rng: &mut R) -> Option<CMat> {
    let first = basis.first()?;
    let mut out = CMat::zeros(first.nrows(), first.ncols());
    for b in basis {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        out += b * c(re, im);
    }
    Some(out)
}

/// Multiply by a unit scalar so the entry of largest modulus (first in
/// column-major order on ties) is real and positive.
pub fn fix_phase(m: &CMat) -> CMat {
    let mut best = c(0.0, 0.0);
    for z in m.iter() {
        if z.norm() > best.norm() + 1e-9 {
            best = *z;
        }
    }
    if best.norm() == 0.0 {
        return m.clone();
    }
    m * (best.conj() / best.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kron_uses_outer_left_index() {
        let a = CMat::from_row_slice(2, 2, &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        let b = eye(2);
        let k = kron(&a, &b);
        assert_eq!(k[(0, 2)], c(2., 0.));
        assert_eq!(k[(1, 3)], c(2., 0.));
        assert_eq!(k[(0, 1)], c(0., 0.));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            assert!(unitarity_residual(&random_unitary(n, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn intertwiners_of_swap() {
        // X commuting with the swap matrix: 2-dimensional (span of I and swap).
        let swap = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let basis = intertwiners(std::slice::from_ref(&swap), std::slice::from_ref(&swap));
        assert_eq!(basis.len(), 2);
        for x in &basis {
            assert!(max_diff(&(&swap * x), &(x * &swap)) < 1e-12);
        }
    }

    #[test]
    fn no_intertwiner_between_distinct_characters() {
        let a = CMat::from_element(1, 1, c(1.0, 0.0));
        let b = CMat::from_element(1, 1, c(-1.0, 0.0));
        assert!(intertwiners(&[a], &[b]).is_empty());
    }

    #[test]
    fn sqrt_pair_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_gaussian(4, 4, &mut rng);
        let p = &g * g.adjoint() + eye(4);
        let (s, si) = hermitian_sqrt_pair(&p);
        assert!(max_diff(&(&s * &s), &p) < 1e-10);
        assert!(max_diff(&(&s * &si), &eye(4)) < 1e-10);
    }
}
