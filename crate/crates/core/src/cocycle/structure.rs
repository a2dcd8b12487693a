use std::sync::Arc;

use crate::aut::{is_liftable, AutElement};
use crate::group::{FiniteGroup, Subgroup};
use crate::linalg::{self, eye, CMat};
use crate::model::CanonicalModel;

/// The group a cocycle takes values in.
pub trait StructureGroup {
    type Elem: Clone;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// 0 for equal elements; for discrete groups 1 otherwise.
    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> f64;
}

impl StructureGroup for FiniteGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        FiniteGroup::mul(self, *a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        FiniteGroup::inv(self, *a)
    }

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }
}

/// `GL(n, ℂ)`.
#[derive(Debug, Clone, Copy)]
pub struct GeneralLinear {
    pub n: usize,
}

impl StructureGroup for GeneralLinear {
    type Elem = CMat;

    fn identity(&self) -> CMat {
        eye(self.n)
    }

    fn mul(&self, a: &CMat, b: &CMat) -> CMat {
        a * b
    }

    fn inv(&self, a: &CMat) -> CMat {
        linalg::inverse(a).expect("invertible transition")
    }

    fn distance(&self, a: &CMat, b: &CMat) -> f64 {
        linalg::max_diff(a, b)
    }
}

fn aut_distance(a: &AutElement, b: &AutElement) -> f64 {
    let d = a.distance(b);
    if d.is_finite() {
        d
    } else {
        1.0
    }
}

/// `Aut_G(X_ρ)`.
#[derive(Debug, Clone)]
pub struct AutGroup {
    pub model: Arc<CanonicalModel>,
}

impl StructureGroup for AutGroup {
    type Elem = AutElement;

    fn identity(&self) -> AutElement {
        AutElement::identity(self.model.clone())
    }

    fn mul(&self, a: &AutElement, b: &AutElement) -> AutElement {
        a.compose(b).expect("same model")
    }

    fn inv(&self, a: &AutElement) -> AutElement {
        a.inverse()
    }

    fn distance(&self, a: &AutElement, b: &AutElement) -> f64 {
        aut_distance(a, b)
    }
}

/// `∏_k Aut_G(X_k)` over the nonzero slots of a model, with the subgroup
/// `L_k ⊆ G₀` of liftable translations of each factor.
#[derive(Debug, Clone)]
pub struct ComponentAutGroup {
    pub model: Arc<CanonicalModel>,
    pub components: Vec<Arc<CanonicalModel>>,
    pub liftable: Vec<Subgroup>,
}

impl ComponentAutGroup {
    pub fn new(model: Arc<CanonicalModel>) -> Self {
        let components = model.component_models();
        let g0 = model.base_group();
        let liftable = components
            .iter()
            .map(|cm| {
                let elems: Vec<usize> = (0..g0.order()).filter(|&a| is_liftable(cm, a)).collect();
                Subgroup::from_elements(g0, &elems).expect("liftable translations form a subgroup")
            })
            .collect();
        ComponentAutGroup { model, components, liftable }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn base_group(&self) -> &FiniteGroup {
        self.model.base_group()
    }

    /// `∩_k L_k`: translations liftable in every factor at once.
    pub fn common_liftable(&self) -> Subgroup {
        let g0 = self.base_group();
        let elems: Vec<usize> = (0..g0.order()).filter(|&a| self.liftable.iter().all(|l| l.contains(a))).collect();
        Subgroup::from_elements(g0, &elems).expect("intersection of subgroups")
    }
}

impl StructureGroup for ComponentAutGroup {
    type Elem = Vec<AutElement>;

    fn identity(&self) -> Vec<AutElement> {
        self.components.iter().map(|c| AutElement::identity(c.clone())).collect()
    }

    fn mul(&self, a: &Vec<AutElement>, b: &Vec<AutElement>) -> Vec<AutElement> {
        a.iter().zip(b).map(|(x, y)| x.compose(y).expect("same component model")).collect()
    }

    fn inv(&self, a: &Vec<AutElement>) -> Vec<AutElement> {
        a.iter().map(AutElement::inverse).collect()
    }

    fn distance(&self, a: &Vec<AutElement>, b: &Vec<AutElement>) -> f64 {
        a.iter().zip(b).map(|(x, y)| aut_distance(x, y)).fold(0.0, f64::max)
    }
}
