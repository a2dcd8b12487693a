use super::{BaseComplex, EdgeCocycle};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// The principal `G₀`-covering glued from a discrete cocycle.
///
/// Vertex `(α, x)` has index `α·|G₀| + x`. Across the edge `[α, β]` with
/// label `a` the point `(β, y)` is glued to `(α, y·a⁻¹)`; `G₀` acts by left
/// multiplication on the second coordinate.
#[derive(Debug, Clone)]
pub struct CoveringSpace {
    pub base: BaseComplex,
    pub fiber: usize,
    pub complex: BaseComplex,
    pub component_of: Vec<usize>,
    pub components: usize,
}

impl CoveringSpace {
    pub fn new(g0: &FiniteGroup, cocycle: &EdgeCocycle<usize>) -> Result<Self> {
        let base = cocycle.complex.clone();
        if !cocycle.validate(g0, 0.0).valid {
            return Err(Error::InvalidInput("discrete transition data violates the cocycle condition".into()));
        }
        let n = g0.order();
        let mut edges = Vec::new();
        for (&[a, b], &lab) in base.edges().iter().zip(&cocycle.labels) {
            for y in 0..n {
                edges.push([a * n + g0.mul(y, g0.inv(lab)), b * n + y]);
            }
        }
        let mut tris = Vec::new();
        for &[a, b, c] in base.triangles() {
            for z in 0..n {
                let ybc = g0.mul(z, g0.inv(cocycle.get(g0, b, c)));
                let yac = g0.mul(z, g0.inv(cocycle.get(g0, a, c)));
                tris.push([a * n + yac, b * n + ybc, c * n + z]);
            }
        }
        let complex = BaseComplex::new(base.charts() * n, &edges, &tris)?;
        let component_of = complex.components();
        let components = component_of.iter().max().map_or(0, |m| m + 1);
        Ok(CoveringSpace { base, fiber: n, complex, component_of, components })
    }

    pub fn vertex(&self, chart: usize, x: usize) -> usize {
        chart * self.fiber + x
    }

    pub fn projection(&self, v: usize) -> usize {
        v / self.fiber
    }

    pub fn deck(&self, g0: &FiniteGroup, g: usize, v: usize) -> usize {
        self.vertex(v / self.fiber, g0.mul(g, v % self.fiber))
    }

    /// Deck transformations preserve the edge set and act freely on vertices.
    pub fn deck_action_is_free(&self, g0: &FiniteGroup) -> bool {
        (1..g0.order()).all(|g| {
            (0..self.complex.charts()).all(|v| self.deck(g0, g, v) != v)
                && self
                    .complex
                    .edges()
                    .iter()
                    .all(|&[u, w]| self.complex.edge_index(self.deck(g0, g, u), self.deck(g0, g, w)).is_some())
        })
    }
}

/// `[G₀ : ⟨holonomies⟩]`, the expected number of components of the covering
/// over a connected base.
pub fn holonomy_index(g0: &FiniteGroup, cocycle: &EdgeCocycle<usize>) -> usize {
    g0.order() / g0.subgroup_closure(&cocycle.holonomies(g0)).order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    #[test]
    fn trivial_labels_give_trivial_covering() {
        let g = catalog::z3();
        let c = EdgeCocycle::new(BaseComplex::simplex(3), vec![0, 0, 0]).unwrap();
        let m = CoveringSpace::new(&g, &c).unwrap();
        assert_eq!(m.components, 3);
        assert!(m.deck_action_is_free(&g));
    }

    #[test]
    fn monodromy_gives_connected_double_cover() {
        let g = catalog::z2();
        let c = EdgeCocycle::new(BaseComplex::cycle(3), vec![1, 0, 0]).unwrap();
        let m = CoveringSpace::new(&g, &c).unwrap();
        assert_eq!(m.complex.charts(), 6);
        assert_eq!(m.components, 1);
        assert_eq!(holonomy_index(&g, &c), 1);
    }

    #[test]
    fn component_count_matches_holonomy_index() {
        let g = catalog::s3();
        let r = g.find("(1 2 3)").unwrap();
        let c = EdgeCocycle::new(BaseComplex::cycle(4), vec![r, 0, 0, 0]).unwrap();
        let m = CoveringSpace::new(&g, &c).unwrap();
        assert_eq!(m.components, 2);
        assert_eq!(holonomy_index(&g, &c), 2);
    }

    #[test]
    fn lifted_triangles_exist() {
        let g = catalog::s3();
        let c = EdgeCocycle::constant(BaseComplex::simplex(3), &g).apply_coboundary(&g, &[1, 2, 3]);
        let m = CoveringSpace::new(&g, &c).unwrap();
        assert_eq!(m.complex.triangles().len(), 6);
        assert_eq!(m.components, 6);
    }
}
