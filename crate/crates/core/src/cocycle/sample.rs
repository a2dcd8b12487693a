//! Random cocycles for property tests and verification suites.

use rand::Rng;

use super::{BaseComplex, ComponentAutGroup, EdgeCocycle, StructureGroup};
use crate::aut::{lift, phi, AutElement, BlockTuple};
use crate::group::{FiniteGroup, Subgroup};

fn pick<R: Rng + ?Sized>(sub: &Subgroup, rng: &mut R) -> usize {
    sub.elements()[rng.random_range(0..sub.order())]
}

/// Random `G₀`-cocycle with values in `allowed`: free labels on edges that lie
/// on no triangle, the identity elsewhere, then a random coboundary.
pub fn random_discrete_cocycle<R: Rng + ?Sized>(
    g0: &FiniteGroup,
    allowed: &Subgroup,
    complex: &BaseComplex,
    rng: &mut R,
) -> EdgeCocycle<usize> {
    let on = complex.edges_on_triangles();
    let labels = on.iter().map(|&t| if t { 0 } else { pick(allowed, rng) }).collect();
    let cochain: Vec<usize> = (0..complex.charts()).map(|_| pick(allowed, rng)).collect();
    EdgeCocycle { complex: complex.clone(), labels }.apply_coboundary(g0, &cochain)
}

/// A random lift of `a` to every factor, each twisted by a random `φ(B)`.
fn random_lift_tuple<R: Rng + ?Sized>(group: &ComponentAutGroup, a: usize, rng: &mut R) -> Vec<AutElement> {
    group
        .components
        .iter()
        .map(|cm| {
            let l = lift(cm, a, rng).expect("translation liftable in every factor");
            let b = phi(cm, &BlockTuple::random(cm, rng)).unwrap();
            l.compose(&b).unwrap()
        })
        .collect()
}

/// Random normalized `∏_k Aut_G(X_k)`-valued cocycle:
/// `Ψ_αβ = P_α Θ_αβ P_β⁻¹` with `Θ` trivial on edges of triangles.
pub fn random_normalized_vect<R: Rng + ?Sized>(
    group: &ComponentAutGroup,
    complex: &BaseComplex,
    rng: &mut R,
) -> EdgeCocycle<Vec<AutElement>> {
    let common = group.common_liftable();
    let on = complex.edges_on_triangles();
    let p: Vec<Vec<AutElement>> =
        (0..complex.charts()).map(|_| random_lift_tuple(group, pick(&common, rng), rng)).collect();
    let labels = complex
        .edges()
        .iter()
        .zip(&on)
        .map(|(&[a, b], &t)| {
            let theta = if t { group.identity() } else { random_lift_tuple(group, pick(&common, rng), rng) };
            group.mul(&group.mul(&p[a], &theta), &group.inv(&p[b]))
        })
        .collect();
    EdgeCocycle { complex: complex.clone(), labels }
}

/// Independent random per-factor cochain `H_{α,k}` with `pr(H_{α,k}) ∈ L_k`.
pub fn random_gauge<R: Rng + ?Sized>(group: &ComponentAutGroup, charts: usize, rng: &mut R) -> Vec<Vec<AutElement>> {
    (0..charts)
        .map(|_| {
            group
                .components
                .iter()
                .zip(&group.liftable)
                .map(|(cm, l)| {
                    let a = pick(l, rng);
                    let x = lift(cm, a, rng).expect("liftable");
                    x.compose(&phi(cm, &BlockTuple::random(cm, rng)).unwrap()).unwrap()
                })
                .collect()
        })
        .collect()
}
