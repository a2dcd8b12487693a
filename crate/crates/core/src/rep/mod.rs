//! Unitary matrix representations of finite groups, their characters,
//! irreducibles and isotypic decomposition.

mod character;
mod irreps;
mod isotypic;

pub use character::{character_table, inner_product, CharacterTable, ClassFunction};
pub use irreps::{irreducibles, Irreducibles};
pub use isotypic::{isotypic_decompose, multiplicity, unitarize, IsotypicComponent, IsotypicDecomposition};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupHomomorphism, Subgroup};
use crate::linalg::{self, c, eye, CMat};
use crate::tolerance;

/// One matrix per group element, indexed like the group table.
#[derive(Debug, Clone)]
pub struct Representation {
    group: Arc<FiniteGroup>,
    degree: usize,
    matrices: Vec<CMat>,
}

impl Representation {
    /// Validates shape, `ρ(e) = I` and multiplicativity within [`tolerance::ACCEPT`].
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<CMat>) -> Result<Self> {
        let rep = Self::new_unchecked(group, matrices)?;
        let res = rep.homomorphism_residual();
        if res > tolerance::ACCEPT {
            return Err(Error::InvalidInput(format!("matrices are not multiplicative (residual {res:.2e})")));
        }
        if linalg::max_diff(&rep.matrices[0], &eye(rep.degree)) > tolerance::ACCEPT {
            return Err(Error::InvalidInput("identity element is not represented by I".into()));
        }
        Ok(rep)
    }

    pub(crate) fn new_unchecked(group: Arc<FiniteGroup>, mut matrices: Vec<CMat>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::InvalidInput(format!(
                "expected {} matrices, got {}",
                group.order(),
                matrices.len()
            )));
        }
        let degree = matrices[0].nrows();
        if degree == 0 || matrices.iter().any(|m| m.nrows() != degree || m.ncols() != degree) {
            return Err(Error::InvalidInput("matrices must be square of a common positive size".into()));
        }
        matrices[0] = eye(degree);
        Ok(Representation { group, degree, matrices })
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let matrices = vec![eye(1); group.order()];
        Representation { group, degree: 1, matrices }
    }

    /// Left regular representation: `ρ(g) e_x = e_{gx}`.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let matrices = (0..n)
            .map(|g| {
                let mut m = CMat::zeros(n, n);
                for x in 0..n {
                    m[(group.mul(g, x), x)] = c(1.0, 0.0);
                }
                m
            })
            .collect();
        Representation { group, degree: n, matrices }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    /// Matrices of a generating set; enough to pin down intertwiners.
    pub fn generator_matrices(&self) -> (Vec<usize>, Vec<CMat>) {
        let gens = self.group.generators();
        let mats = gens.iter().map(|&g| self.matrices[g].clone()).collect();
        (gens, mats)
    }

    /// `max ‖ρ(g)ρ(h) − ρ(gh)‖` over all pairs.
    pub fn homomorphism_residual(&self) -> f64 {
        let n = self.group.order();
        let mut worst: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                let prod = &self.matrices[g] * &self.matrices[h];
                worst = worst.max(linalg::max_diff(&prod, &self.matrices[self.group.mul(g, h)]));
            }
        }
        worst
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.matrices.iter().map(linalg::unitarity_residual).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn direct_sum(reps: &[&Representation]) -> Result<Self> {
        let group = reps
            .first()
            .ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?
            .group
            .clone();
        if reps.iter().any(|r| r.group != group) {
            return Err(Error::ModelMismatch);
        }
        let matrices = (0..group.order())
            .map(|g| {
                let blocks: Vec<CMat> = reps.iter().map(|r| r.matrices[g].clone()).collect();
                linalg::direct_sum(&blocks)
            })
            .collect();
        let degree = reps.iter().map(|r| r.degree).sum();
        Ok(Representation { group, degree, matrices })
    }

    /// `g ↦ U ρ(g) U⁻¹`.
    pub fn conjugate_by(&self, u: &CMat) -> Result<Self> {
        let ui = linalg::inverse(u).ok_or_else(|| Error::InvalidInput("conjugating matrix is singular".into()))?;
        let matrices = self.matrices.iter().map(|m| u * m * &ui).collect();
        Ok(Representation { group: self.group.clone(), degree: self.degree, matrices })
    }

    /// Pullback `ρ ∘ f` along a homomorphism into this representation's group.
    pub fn pullback(&self, f: &GroupHomomorphism) -> Result<Self> {
        if f.codomain != *self.group {
            return Err(Error::ModelMismatch);
        }
        let matrices = f.map.iter().map(|&y| self.matrices[y].clone()).collect();
        Ok(Representation { group: Arc::new(f.domain.clone()), degree: self.degree, matrices })
    }

    /// Restriction to a subgroup, as a representation of `sub.to_group(G)`.
    pub fn restrict(&self, sub: &Subgroup) -> Self {
        let matrices = sub.elements().iter().map(|&x| self.matrices[x].clone()).collect();
        Representation { group: Arc::new(sub.to_group(&self.group)), degree: self.degree, matrices }
    }

    /// Trace per conjugacy class, evaluated on the class representative.
    pub fn character(&self) -> ClassFunction {
        let values = self
            .group
            .conjugacy_classes()
            .iter()
            .map(|cls| self.matrices[cls[0]].trace())
            .collect();
        ClassFunction { values }
    }

    /// Largest deviation of the trace from being constant on classes.
    pub fn class_constancy_residual(&self) -> f64 {
        let chi = self.character();
        (0..self.group.order())
            .map(|g| (self.matrices[g].trace() - chi.values[self.group.class_of(g)]).norm())
            .fold(0.0, f64::max)
    }
}
