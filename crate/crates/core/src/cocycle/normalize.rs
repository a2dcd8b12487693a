use std::sync::Arc;

use rand::Rng;

use super::{AutGroup, ComponentAutGroup, CoveringSpace, EdgeCocycle, GeneralLinear};
use crate::aut::{in_image_of_i, lift, restrict_to_components, AutElement};
use crate::error::{Error, Result};
use crate::linalg::{self, c, eye, CMat};
use crate::model::CanonicalModel;
use crate::tolerance;

/// Output of [`normalize_transitions`]: `cocycle = input.apply_coboundary(witness)`,
/// and every factor of every label of `cocycle` covers the same `discrete` label.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub cocycle: EdgeCocycle<Vec<AutElement>>,
    pub discrete: EdgeCocycle<usize>,
    pub witness: Vec<Vec<AutElement>>,
}

/// Discrete part of one factor: `pr_k` of every label.
fn discrete_part(v: &EdgeCocycle<Vec<AutElement>>, k: usize) -> EdgeCocycle<usize> {
    v.map(|l| l[k].a())
}

/// Per-chart translations `h_{α,k}` with `h_{α,k}⁻¹ a_{αβ,k} h_{β,k}`
/// independent of `k` and `h_{α,k} ∈ L_k`, found by exhaustive search.
///
/// Fixing `h_{·,0} = 1` loses nothing: any solution is of that form up to a
/// per-chart right factor `c_α`, which is searched separately so that
/// liftability can be restored. Once the root value of factor `k` is chosen
/// the rest of `h_{·,k}` follows along the spanning forest.
fn search_translations(group: &ComponentAutGroup, v: &EdgeCocycle<Vec<AutElement>>) -> Option<Vec<Vec<usize>>> {
    let g0 = group.base_group();
    let complex = &v.complex;
    let forest = complex.spanning_forest();
    let comp = complex.components();
    let ncomp = comp.iter().max().map_or(0, |m| m + 1);
    let parts: Vec<EdgeCocycle<usize>> = (0..group.len()).map(|k| discrete_part(v, k)).collect();
    let reference = &parts[0];

    // candidate assignments per factor, identity-rooted first
    let mut candidates: Vec<Vec<Vec<usize>>> = vec![vec![vec![0; complex.charts()]]];
    for part in &parts[1..] {
        let mut sols: Vec<Vec<usize>> = vec![vec![0; complex.charts()]];
        for k in 0..ncomp {
            let charts: Vec<usize> = forest.order.iter().copied().filter(|&x| comp[x] == k).collect();
            let mut next = Vec::new();
            for root in 0..g0.order() {
                let mut h = vec![0; complex.charts()];
                for &x in &charts {
                    h[x] = match forest.parent[x] {
                        None => root,
                        Some(p) => g0.mul(g0.mul(g0.inv(part.get(g0, p, x)), h[p]), reference.get(g0, p, x)),
                    };
                }
                let ok = complex.edges().iter().enumerate().all(|(i, &[a, b])| {
                    comp[a] != k || g0.mul(g0.mul(g0.inv(h[a]), part.labels[i]), h[b]) == reference.labels[i]
                });
                if ok {
                    for s in &sols {
                        let mut merged = s.clone();
                        for &x in &charts {
                            merged[x] = h[x];
                        }
                        next.push(merged);
                    }
                }
            }
            sols = next;
            if sols.is_empty() {
                return None;
            }
        }
        candidates.push(sols);
    }

    let mut choice = vec![0; candidates.len()];
    loop {
        let mut result: Option<Vec<Vec<usize>>> = Some(vec![vec![0; group.len()]; complex.charts()]);
        for alpha in 0..complex.charts() {
            let fits = |cc: usize| {
                (0..group.len()).all(|k| group.liftable[k].contains(g0.mul(candidates[k][choice[k]][alpha], cc)))
            };
            match (0..g0.order()).find(|&cc| fits(cc)) {
                Some(cc) => {
                    let row = result.as_mut().unwrap();
                    for k in 0..group.len() {
                        row[alpha][k] = g0.mul(candidates[k][choice[k]][alpha], cc);
                    }
                }
                None => {
                    result = None;
                    break;
                }
            }
        }
        if result.is_some() {
            return result;
        }
        // odometer over the candidate lists
        let mut k = candidates.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn check_shape(group: &ComponentAutGroup, v: &EdgeCocycle<Vec<AutElement>>) -> Result<()> {
    for l in &v.labels {
        if l.len() != group.len() || l.iter().zip(&group.components).any(|(x, m)| !x.model().same_as(m)) {
            return Err(Error::ModelMismatch);
        }
    }
    Ok(())
}

/// Whether per-chart translations making the discrete parts agree exist.
pub fn is_compatible(group: &ComponentAutGroup, v: &EdgeCocycle<Vec<AutElement>>) -> bool {
    check_shape(group, v).is_ok() && search_translations(group, v).is_some()
}

/// Conjugates per-factor transition data so all factors cover one discrete
/// cocycle. Translations equal to 1 are lifted to the identity, so data that
/// is already normalized comes back unchanged.
pub fn normalize_transitions<R: Rng + ?Sized>(
    group: &ComponentAutGroup,
    v: &EdgeCocycle<Vec<AutElement>>,
    rng: &mut R,
) -> Result<Normalized> {
    check_shape(group, v)?;
    let h = search_translations(group, v)
        .ok_or_else(|| Error::NotCompatible("no per-chart translations make the discrete parts agree".into()))?;
    let witness = h
        .iter()
        .map(|row| {
            row.iter()
                .zip(&group.components)
                .map(|(&a, cm)| if a == 0 { Ok(AutElement::identity(cm.clone())) } else { lift(cm, a, rng) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cocycle = v.apply_coboundary(group, &witness);
    let discrete = discrete_part(&cocycle, 0);
    for k in 1..group.len() {
        if discrete_part(&cocycle, k).labels != discrete.labels {
            return Err(Error::NotCompatible("normalized factors disagree".into()));
        }
    }
    Ok(Normalized { cocycle, discrete, witness })
}

/// Assembles normalized per-factor data into `Aut_G(X_ρ)`-valued data,
/// normalizing first.
pub fn include<R: Rng + ?Sized>(
    group: &ComponentAutGroup,
    v: &EdgeCocycle<Vec<AutElement>>,
    rng: &mut R,
) -> Result<(EdgeCocycle<AutElement>, Normalized)> {
    let n = normalize_transitions(group, v, rng)?;
    let labels = n
        .cocycle
        .labels
        .iter()
        .map(|l| {
            in_image_of_i(&group.model, l)?
                .ok_or_else(|| Error::NotCompatible("factors cover different translations".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((EdgeCocycle { complex: v.complex.clone(), labels }, n))
}

/// The discrete part, its covering, and the per-factor restrictions of
/// `Aut_G(X_ρ)`-valued data.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub discrete: EdgeCocycle<usize>,
    pub covering: CoveringSpace,
    pub vect: EdgeCocycle<Vec<AutElement>>,
}

pub fn decompose(model: &Arc<CanonicalModel>, b: &EdgeCocycle<AutElement>) -> Result<Decomposition> {
    let report = b.validate(&AutGroup { model: model.clone() }, tolerance::ACCEPT);
    if !report.valid {
        return Err(Error::InvalidInput(format!(
            "transition data violates the cocycle condition on {} triangles",
            report.violations.len()
        )));
    }
    let discrete = b.map(AutElement::a);
    let covering = CoveringSpace::new(model.base_group(), &discrete)?;
    let labels = b.labels.iter().map(restrict_to_components).collect::<Result<Vec<_>>>()?;
    Ok(Decomposition { discrete, covering, vect: EdgeCocycle { complex: b.complex.clone(), labels } })
}

/// Degree-`d` action `h ↦ ρ_k(s(p)⁻¹ h s(p))` of the generators of `H` on
/// the `V_k` factor over the point `p` of a single-block model.
fn twisted_generators(cm: &CanonicalModel, hgens: &[usize], p: usize) -> Vec<CMat> {
    let g = cm.group();
    let sub = cm.subgroup();
    let k = cm.slots()[0].irrep;
    let t = cm.cosets().representative(p);
    hgens
        .iter()
        .map(|&h| {
            let moved = g.mul(g.mul(g.inv(t), h), t);
            cm.spec().irreps().reps[k].matrix(sub.local_index(moved).unwrap()).clone()
        })
        .collect()
}

/// Unitary frames `t_y: V_k → V_k` with `t_y ρ^{x₀}(h) = ρ^{y}(h) t_y`,
/// where `x₀` is the smallest element of `y·L_k` and `t_{x₀} = I`.
fn frames(cm: &CanonicalModel, liftable: &crate::group::Subgroup) -> Result<Vec<CMat>> {
    let g0 = cm.base_group();
    let sub = cm.subgroup();
    let hgens: Vec<usize> = cm.spec().group().generators().iter().map(|&i| sub.elements()[i]).collect();
    let d = cm.slots()[0].degree;
    (0..g0.order())
        .map(|y| {
            let x0 = liftable.elements().iter().map(|&l| g0.mul(y, l)).min().unwrap();
            if x0 == y {
                return Ok(eye(d));
            }
            let basis = linalg::intertwiners(&twisted_generators(cm, &hgens, y), &twisted_generators(cm, &hgens, x0));
            if basis.len() != 1 {
                return Err(Error::ConvergenceFailure(format!("frame at point {y} spans {} dimensions", basis.len())));
            }
            Ok(linalg::fix_phase(&(&basis[0] * c((d as f64).sqrt(), 0.0))))
        })
        .collect()
}

/// Pulls normalized data back to the covering and reads off one
/// `GL(m_k)`-valued cocycle per factor.
///
/// Over the lifted edge from `(β, y)` to `(α, y·a⁻¹)` the fiber map of factor
/// `k` intertwines isotypic fibers; after the frames `I ⊗ t_y` it has the form
/// `B ⊗ I_{d_k}` and `B` is recovered by a partial trace.
pub fn extract_multiplicity_cocycles(
    group: &ComponentAutGroup,
    v: &EdgeCocycle<Vec<AutElement>>,
    covering: &CoveringSpace,
) -> Result<Vec<EdgeCocycle<CMat>>> {
    check_shape(group, v)?;
    let g0 = group.base_group();
    let n = g0.order();
    for l in &v.labels {
        if l.iter().any(|x| x.a() != l[0].a()) {
            return Err(Error::PreconditionFailed("transition data is not normalized".into()));
        }
    }
    if covering.base != v.complex || covering.fiber != n {
        return Err(Error::ModelMismatch);
    }
    let mut out = Vec::new();
    for (k, cm) in group.components.iter().enumerate() {
        let slot = cm.slots()[0];
        let (m, d) = (slot.multiplicity, slot.degree);
        let t = frames(cm, &group.liftable[k])?;
        let mut labels = vec![CMat::zeros(0, 0); covering.complex.edges().len()];
        for (&[alpha, beta], lab) in v.complex.edges().iter().zip(&v.labels) {
            let psi = &lab[k];
            for y in 0..n {
                let ya = psi.target(y);
                let frame_in = linalg::kron(&eye(m), &t[y]);
                let frame_out = linalg::kron(&eye(m), &t[ya]);
                let x = frame_out.adjoint() * psi.map(y) * frame_in;
                let bk = CMat::from_fn(m, m, |f, g| {
                    let mut acc = c(0.0, 0.0);
                    for j in 0..d {
                        acc += x[(f * d + j, g * d + j)];
                    }
                    acc / d as f64
                });
                let resid = linalg::max_diff(&linalg::kron(&bk, &eye(d)), &x);
                if resid > tolerance::ACCEPT {
                    return Err(Error::ConvergenceFailure(format!("fiber map is not B ⊗ I (residual {resid:.2e})")));
                }
                let i = covering
                    .complex
                    .edge_index(covering.vertex(alpha, ya), covering.vertex(beta, y))
                    .expect("lifted edge");
                labels[i] = bk;
            }
        }
        out.push(EdgeCocycle { complex: covering.complex.clone(), labels });
    }
    Ok(out)
}

/// Largest `GL(m_k)` cocycle defect over the extracted factors.
pub fn multiplicity_cocycle_residual(group: &ComponentAutGroup, cocycles: &[EdgeCocycle<CMat>]) -> f64 {
    cocycles
        .iter()
        .zip(&group.components)
        .map(|(c, cm)| c.validate(&GeneralLinear { n: cm.slots()[0].multiplicity }, tolerance::ACCEPT).max_residual)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aut::{phi, BlockTuple};
    use crate::cocycle::{discrete_cohomologous, random_gauge, random_normalized_vect, BaseComplex};
    use crate::group::FiniteGroup;
    use crate::model::build_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z6_z3() -> ComponentAutGroup {
        let g = Arc::new(FiniteGroup::cyclic(6));
        let h = g.subgroup_closure(&[2]);
        ComponentAutGroup::new(Arc::new(build_model(g, h, &[(1, 2), (2, 1)]).unwrap()))
    }

    #[test]
    fn normalized_input_is_unchanged() {
        let grp = z6_z3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_normalized_vect(&grp, &BaseComplex::cycle(4), &mut rng);
        let n = normalize_transitions(&grp, &v, &mut rng).unwrap();
        assert_eq!(n.cocycle.distance(&grp, &v), 0.0);
        assert_eq!(n.discrete.labels, v.labels.iter().map(|l| l[0].a()).collect::<Vec<_>>());
    }

    #[test]
    fn per_factor_gauge_is_undone() {
        let grp = z6_z3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for complex in [BaseComplex::cycle(5), BaseComplex::simplex(4)] {
            let v = random_normalized_vect(&grp, &complex, &mut rng);
            let gauge = random_gauge(&grp, complex.charts(), &mut rng);
            let w = v.apply_coboundary(&grp, &gauge);
            let n = normalize_transitions(&grp, &w, &mut rng).unwrap();
            for l in &n.cocycle.labels {
                assert!(l.iter().all(|x| x.a() == l[0].a()));
            }
            assert!(n.cocycle.distance(&grp, &w.apply_coboundary(&grp, &n.witness)) < 1e-12);
            assert!(n.cocycle.validate(&grp, 1e-7).valid);
            let v_discrete = v.map(|l| l[0].a());
            assert!(discrete_cohomologous(grp.base_group(), &v_discrete, &n.discrete).is_some());
        }
    }

    #[test]
    fn different_holonomies_are_incompatible() {
        let grp = z6_z3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let twist = lift(&grp.components[0], 1, &mut rng).unwrap();
        let labels = (0..3)
            .map(|i| {
                let first = if i == 0 { twist.clone() } else { AutElement::identity(grp.components[0].clone()) };
                vec![first, AutElement::identity(grp.components[1].clone())]
            })
            .collect();
        let v = EdgeCocycle::new(BaseComplex::cycle(3), labels).unwrap();
        assert!(!is_compatible(&grp, &v));
        assert!(matches!(normalize_transitions(&grp, &v, &mut rng), Err(Error::NotCompatible(_))));
    }

    #[test]
    fn include_then_decompose() {
        let grp = z6_z3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_normalized_vect(&grp, &BaseComplex::cycle(3), &mut rng);
        let (b, n) = include(&grp, &v, &mut rng).unwrap();
        assert!(b.validate(&AutGroup { model: grp.model.clone() }, 1e-7).valid);
        let d = decompose(&grp.model, &b).unwrap();
        assert_eq!(d.discrete.labels, n.discrete.labels);
        assert!(d.vect.distance(&grp, &n.cocycle) < 1e-12);
        let cocycles = extract_multiplicity_cocycles(&grp, &d.vect, &d.covering).unwrap();
        assert_eq!(cocycles.len(), 2);
        assert!(multiplicity_cocycle_residual(&grp, &cocycles) < 1e-9);
    }

    #[test]
    fn constant_blocks_extract_to_themselves() {
        let grp = z6_z3();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let complex = BaseComplex::cycle(3);
        let blocks: Vec<BlockTuple> = (0..3).map(|_| BlockTuple::random(&grp.model, &mut rng)).collect();
        let labels = blocks
            .iter()
            .map(|b| {
                grp.components
                    .iter()
                    .zip(&b.blocks)
                    .map(|(cm, blk)| phi(cm, &BlockTuple { blocks: vec![blk.clone()] }).unwrap())
                    .collect::<Vec<AutElement>>()
            })
            .collect();
        let v = EdgeCocycle::new(complex, labels).unwrap();
        let covering = CoveringSpace::new(grp.base_group(), &v.map(|l| l[0].a())).unwrap();
        assert_eq!(covering.components, 2);
        let cocycles = extract_multiplicity_cocycles(&grp, &v, &covering).unwrap();
        for (k, c) in cocycles.iter().enumerate() {
            for (i, &[u, w]) in c.complex.edges().iter().enumerate() {
                let e = v.complex.edge_index(u / 2, w / 2).unwrap();
                assert!(linalg::max_diff(&c.labels[i], &blocks[e].blocks[k]) < 1e-12);
            }
        }
    }
}
