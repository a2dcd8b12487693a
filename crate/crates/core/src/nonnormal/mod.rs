//! Equivariant bundles over finite `G`-sets whose stationary subgroup is not
//! normal: fixed-point sets, the isotropy family, the decomposition over
//! conjugates, the model `GX(ρ)`, and reduction to the normalizer.

mod family;
mod gx;
mod space;

pub use family::{
    check_fixconjugate, check_unique_maximal, decompose_bundle, family_of_subgroups, is_quasi_free, verify_disjointness,
    BundleComponent, CoverageReport, DisjointnessReport, SubgroupFamily,
};
pub use gx::{
    build_gx, first_copy_action, induce, induce_reduce_witness, reduce, reduce_induce_witness, round_trip_from_g,
    round_trip_from_n, verify_aut_isomorphism, verify_fixed_set_identity, AutIsomorphismReport, FixedSetReport,
    FixedSetRow, GXModel, InducedBundle, Reduction, RoundTripCheck,
};
pub use space::{random_automorphism, BundleMap, EquivariantBundle, FiniteGSpace, IsomorphismCheck};

use std::sync::Arc;

use crate::group::{catalog, FiniteGroup, Subgroup};

/// A group with a non-normal subgroup.
#[derive(Debug, Clone)]
pub struct NonNormalInstance {
    pub name: &'static str,
    pub group: Arc<FiniteGroup>,
    pub subgroup: Subgroup,
}

/// `S₃ ⊃ ⟨(1 2)⟩`, `D₄ ⊃ ⟨(2 4)⟩`, `A₄ ⊃ ⟨(1 2)(3 4)⟩`, `A₄ ⊃ ⟨(1 2 3)⟩`.
pub fn nonnormal_catalog() -> Vec<NonNormalInstance> {
    let make = |name, group: FiniteGroup, gen: &str| {
        let x = group.find(gen).expect("catalog label");
        let subgroup = group.subgroup_closure(&[x]);
        NonNormalInstance { name, group: Arc::new(group), subgroup }
    };
    vec![
        make("S3/<(1 2)>", catalog::s3(), "(1 2)"),
        make("D4/<(2 4)>", catalog::d4(), "(2 4)"),
        make("A4/<(1 2)(3 4)>", catalog::a4(), "(1 2)(3 4)"),
        make("A4/<(1 2 3)>", catalog::a4(), "(1 2 3)"),
    ]
}
