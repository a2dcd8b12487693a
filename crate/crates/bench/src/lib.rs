//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use qfree_core::group::{catalog, FiniteGroup};
use qfree_core::model::{build_model, subgroup_irreps, CanonicalModel, RepSpec};
use qfree_core::nonnormal::{build_gx, GXModel};
use qfree_core::{Result, Subgroup};

/// `Z6 ⊃ Z3` with every nontrivial irreducible once.
pub fn cyclic_model() -> Result<Arc<CanonicalModel>> {
    let g = Arc::new(FiniteGroup::cyclic(6));
    let h = g.subgroup_closure(&[2]);
    Ok(Arc::new(build_model(g, h, &[(1, 1), (2, 1)])?))
}

/// `D4` over its center with the sign irreducible twice.
pub fn dihedral_model() -> Result<Arc<CanonicalModel>> {
    let g = Arc::new(catalog::d4());
    let h = g.subgroup_closure(&[g.find("(1 3)(2 4)").expect("catalog label")]);
    Ok(Arc::new(build_model(g, h, &[(1, 2)])?))
}

/// `A4` over a non-normal subgroup of order 2.
pub fn alternating_gx() -> Result<(GXModel, Subgroup)> {
    let g = Arc::new(catalog::a4());
    let x = (1..g.order()).find(|&x| g.element_order(x) == 2).expect("A4 has involutions");
    let h = g.subgroup_closure(&[x]);
    let irreps = subgroup_irreps(&g, &h)?;
    Ok((build_gx(g, &h, RepSpec::from_pairs(irreps, &[(1, 1)])?)?, h))
}
