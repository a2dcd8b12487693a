use std::sync::Arc;

use super::character::inner_product;
use super::{Irreducibles, Representation};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{self, c, eye, CMat};
use crate::tolerance;

/// `⟨χ_ρ, χ_k⟩` rounded to an integer, with the rounding error.
pub fn multiplicity(rep: &Representation, irreps: &Irreducibles, k: usize) -> Result<(usize, f64)> {
    let value = inner_product(rep.group(), &rep.character(), irreps.character(k));
    let rounded = value.re.round();
    let err = (value - c(rounded, 0.0)).norm();
    if err > tolerance::MULTIPLICITY || rounded < 0.0 {
        return Err(Error::NonIntegralMultiplicity { value: value.re });
    }
    Ok((rounded as usize, err))
}

#[derive(Debug, Clone)]
pub struct IsotypicComponent {
    pub irrep: usize,
    pub multiplicity: usize,
    pub degree: usize,
}

/// `U ρ(h) U⁻¹ = ⊕_k I_{m_k} ⊗ ρ_k(h)`, blocks in ascending `k`, the
/// multiplicity index outer and the irreducible's index inner.
#[derive(Debug, Clone)]
pub struct IsotypicDecomposition {
    pub components: Vec<IsotypicComponent>,
    pub change_of_basis: CMat,
}

impl IsotypicDecomposition {
    pub fn multiplicities(&self, irreps: &Irreducibles) -> Vec<usize> {
        let mut m = vec![0; irreps.len()];
        for comp in &self.components {
            m[comp.irrep] = comp.multiplicity;
        }
        m
    }

    /// `⊕_k I_{m_k} ⊗ ρ_k(h)` for a group element.
    pub fn block_form(&self, irreps: &Irreducibles, h: usize) -> CMat {
        let blocks: Vec<CMat> = self
            .components
            .iter()
            .map(|comp| linalg::kron(&eye(comp.multiplicity), irreps.reps[comp.irrep].matrix(h)))
            .collect();
        linalg::direct_sum(&blocks)
    }

    /// Max over `h` of `‖U⁻¹ (⊕ I ⊗ ρ_k(h)) U − ρ(h)‖`.
    pub fn round_trip_residual(&self, rep: &Representation, irreps: &Irreducibles) -> f64 {
        let u = &self.change_of_basis;
        let ui = u.adjoint();
        (0..rep.group().order())
            .map(|h| linalg::max_diff(&(&ui * self.block_form(irreps, h) * u), rep.matrix(h)))
            .fold(0.0, f64::max)
    }
}

/// Splits a unitary representation into isotypic blocks.
///
/// For each irreducible with nonzero multiplicity the intertwiner space
/// `Hom_H(ρ_k, ρ)` is solved directly; by Schur's lemma a Frobenius-orthonormal
/// basis `J_a` satisfies `J_a* J_b = δ_ab / d_k · I`, so the rescaled `J_a`
/// are isometries with orthogonal images and together form `U⁻¹`.
pub fn isotypic_decompose(rep: &Representation, irreps: &Irreducibles) -> Result<IsotypicDecomposition> {
    if rep.unitarity_residual() > tolerance::VERIFY {
        return Err(Error::InvalidInput("isotypic decomposition needs a unitary representation".into()));
    }
    let (gens, gen_mats) = rep.generator_matrices();
    let mut columns: Vec<CMat> = Vec::new();
    let mut components = Vec::new();
    for k in 0..irreps.len() {
        let (m, _) = multiplicity(rep, irreps, k)?;
        if m == 0 {
            continue;
        }
        let d = irreps.degree(k);
        let right: Vec<CMat> = gens.iter().map(|&g| irreps.reps[k].matrix(g).clone()).collect();
        let basis = linalg::intertwiners(&gen_mats, &right);
        if basis.len() != m {
            return Err(Error::ConvergenceFailure(format!(
                "intertwiner space for irreducible {k} has dimension {}, expected {m}",
                basis.len()
            )));
        }
        let scale = c((d as f64).sqrt(), 0.0);
        columns.extend(basis.into_iter().map(|j| j * scale));
        components.push(IsotypicComponent { irrep: k, multiplicity: m, degree: d });
    }
    let dim: usize = columns.iter().map(|j| j.ncols()).sum();
    if dim != rep.degree() {
        return Err(Error::ConvergenceFailure(format!("components span {dim} of {}", rep.degree())));
    }
    let mut inv = CMat::zeros(rep.degree(), dim);
    let mut col = 0;
    for j in &columns {
        inv.view_mut((0, col), j.shape()).copy_from(j);
        col += j.ncols();
    }
    let dec = IsotypicDecomposition { components, change_of_basis: inv.adjoint() };
    let unit = linalg::unitarity_residual(&dec.change_of_basis);
    if unit > tolerance::ACCEPT {
        return Err(Error::ConvergenceFailure(format!("change of basis not unitary ({unit:.2e})")));
    }
    Ok(dec)
}

/// Weyl's unitary trick: with `P = (1/|G|) Σ ρ(g)*ρ(g)` and `S = P^{1/2}`,
/// `g ↦ S ρ(g) S⁻¹` is unitary and similar to the input.
pub fn unitarize(group: Arc<FiniteGroup>, matrices: Vec<CMat>) -> Result<Representation> {
    let rep = Representation::new(group, matrices)?;
    let n = rep.degree();
    let mut p = CMat::zeros(n, n);
    for m in rep.matrices() {
        p += m.adjoint() * m;
    }
    p /= c(rep.group().order() as f64, 0.0);
    let (s, si) = linalg::hermitian_sqrt_pair(&p);
    let mats = rep.matrices().iter().map(|m| &s * m * &si).collect();
    Representation::new(rep.group().clone(), mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use crate::rep::irreducibles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn irreducible_has_multiplicity_one() {
        let g = Arc::new(catalog::s3());
        let irr = irreducibles(&g).unwrap();
        for k in 0..irr.len() {
            for j in 0..irr.len() {
                let (m, _) = multiplicity(&irr.reps[k], &irr, j).unwrap();
                assert_eq!(m, usize::from(j == k));
            }
        }
    }

    #[test]
    fn regular_multiplicities_equal_degrees() {
        for (_, g) in catalog::all() {
            let g = Arc::new(g);
            let irr = irreducibles(&g).unwrap();
            let reg = Representation::regular(g.clone());
            for k in 0..irr.len() {
                assert_eq!(multiplicity(&reg, &irr, k).unwrap().0, irr.degree(k));
            }
        }
    }

    #[test]
    fn diagonal_z2() {
        let g = Arc::new(catalog::z2());
        let irr = irreducibles(&g).unwrap();
        let m = vec![eye(2), CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1., 0.), c(-1., 0.)]))];
        let rep = Representation::new(g, m).unwrap();
        let dec = isotypic_decompose(&rep, &irr).unwrap();
        assert_eq!(dec.multiplicities(&irr), vec![1, 1]);
    }

    #[test]
    fn regular_z3_decomposes_with_fourier_matrix() {
        let g = Arc::new(catalog::z3());
        let irr = irreducibles(&g).unwrap();
        let reg = Representation::regular(g.clone());
        let dec = isotypic_decompose(&reg, &irr).unwrap();
        assert_eq!(dec.multiplicities(&irr), vec![1, 1, 1]);
        assert!(dec.round_trip_residual(&reg, &irr) < 1e-10);
        // rows of U are characters up to phase and 1/sqrt(3)
        for row in 0..3 {
            for col in 0..3 {
                assert!((dec.change_of_basis[(row, col)].norm() - 1.0 / 3f64.sqrt()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn doubled_two_dim_s3() {
        let g = Arc::new(catalog::s3());
        let irr = irreducibles(&g).unwrap();
        let two = &irr.reps[2];
        let sum = Representation::direct_sum(&[two, two]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let conj = sum.conjugate_by(&linalg::random_unitary(4, &mut rng)).unwrap();
        let dec = isotypic_decompose(&conj, &irr).unwrap();
        assert_eq!(dec.multiplicities(&irr), vec![0, 0, 2]);
        assert!(dec.round_trip_residual(&conj, &irr) < 1e-10);
    }

    #[test]
    fn fixed_space_dimension_matches_trivial_multiplicity() {
        let g = Arc::new(catalog::a4());
        let irr = irreducibles(&g).unwrap();
        let reg = Representation::regular(g.clone());
        let sum = Representation::direct_sum(&[&reg, &irr.reps[0], &irr.reps[3]]).unwrap();
        let mut proj = CMat::zeros(sum.degree(), sum.degree());
        for m in sum.matrices() {
            proj += m;
        }
        proj /= c(12.0, 0.0);
        let rank = linalg::singular_values(&proj).iter().filter(|s| **s > 0.5).count();
        assert_eq!(multiplicity(&sum, &irr, 0).unwrap().0, rank);
        assert_eq!(rank, 2);
    }

    #[test]
    fn unitarize_upper_triangular_z2() {
        let g = Arc::new(catalog::z2());
        let a = CMat::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(-1., 0.)]);
        let rep = unitarize(g.clone(), vec![eye(2), a.clone()]).unwrap();
        assert!(rep.unitarity_residual() < 1e-12);
        // similar to the input: same character (trace 0) and eigenvalues ±1
        assert!(rep.matrix(1).trace().norm() < 1e-12);
        assert!(linalg::max_diff(&(rep.matrix(1) * rep.matrix(1)), &eye(2)) < 1e-12);
        // explicit averaging oracle: P = (I + A*A)/2 = [[1, 1/2], [1/2, 1]]
        let p = (eye(2) + a.adjoint() * &a) / c(2.0, 0.0);
        assert!((p[(0, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((p[(1, 1)] - c(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unitarize_leaves_unitary_input() {
        let g = Arc::new(catalog::s3());
        let irr = irreducibles(&g).unwrap();
        let rep = unitarize(g, irr.reps[2].matrices().to_vec()).unwrap();
        for (a, b) in rep.matrices().iter().zip(irr.reps[2].matrices()) {
            assert!(linalg::max_diff(a, b) < 1e-10);
        }
    }
}
