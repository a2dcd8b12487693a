use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qfree_core::cocycle::{
    discrete_cohomologous, holonomy_index, include, random_discrete_cocycle, random_normalized_vect,
    simultaneously_conjugate, BaseComplex, ComponentAutGroup, CoveringSpace, EdgeCocycle,
};
use qfree_core::group::{catalog, from_permutations, FiniteGroup, Subgroup};
use qfree_core::linalg;
use qfree_core::model::{build_model, subgroup_irreps};
use qfree_core::rep::{irreducibles, isotypic_decompose, multiplicity, unitarize, Representation};
use qfree_core::verify::cocycle_round_trip;

fn catalog_group() -> impl Strategy<Value = FiniteGroup> {
    let all = catalog::all();
    (0..all.len()).prop_map(move |i| all[i].1.clone())
}

fn permutation(degree: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..degree).collect::<Vec<_>>()).prop_shuffle()
}

fn complex() -> impl Strategy<Value = BaseComplex> {
    prop_oneof![
        (3usize..7).prop_map(BaseComplex::cycle),
        (3usize..6).prop_map(BaseComplex::simplex),
        (2usize..6).prop_map(BaseComplex::path),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permutation_closures_are_groups(gens in prop::collection::vec(permutation(4), 1..3)) {
        let p = from_permutations(4, &gens).unwrap();
        let g = &p.group;
        prop_assert!(g.verify_axioms());
        prop_assert_eq!(24 % g.order(), 0);
        for x in 0..g.order() {
            prop_assert_eq!(g.mul(x, g.inv(x)), 0);
            prop_assert_eq!(g.mul(0, x), x);
        }
        let sizes: usize = g.conjugacy_classes().iter().map(Vec::len).sum();
        prop_assert_eq!(sizes, g.order());
    }

    #[test]
    fn relabelled_tables_keep_their_class_structure(g in catalog_group(), seed in any::<u64>()) {
        let n = g.order();
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        // new[sigma[x]][sigma[y]] = sigma[x·y]
        let mut table = vec![vec![0; n]; n];
        for x in 0..n {
            for y in 0..n {
                table[sigma[x]][sigma[y]] = sigma[g.mul(x, y)];
            }
        }
        let h = FiniteGroup::from_table(table).unwrap();
        let mut a: Vec<usize> = g.conjugacy_classes().iter().map(Vec::len).collect();
        let mut b: Vec<usize> = h.conjugacy_classes().iter().map(Vec::len).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        prop_assert_eq!(g.is_abelian(), h.is_abelian());
    }

    #[test]
    fn conjugated_sums_decompose_to_their_multiplicities(
        g in catalog_group(),
        mults in prop::collection::vec(0usize..3, 8),
        seed in any::<u64>(),
        unitary in any::<bool>(),
    ) {
        let g = Arc::new(g);
        let irr = irreducibles(&g).unwrap();
        let mut mults = mults[..irr.len()].to_vec();
        if mults.iter().all(|&m| m == 0) {
            mults[0] = 1;
        }
        let parts: Vec<&Representation> =
            mults.iter().enumerate().flat_map(|(k, &m)| std::iter::repeat_n(&irr.reps[k], m)).collect();
        let sum = Representation::direct_sum(&parts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = if unitary {
            sum.conjugate_by(&linalg::random_unitary(sum.degree(), &mut rng)).unwrap()
        } else {
            let p = linalg::random_invertible(sum.degree(), &mut rng);
            let pinv = linalg::inverse(&p).unwrap();
            let twisted = sum.matrices().iter().map(|m| &p * m * &pinv).collect();
            unitarize(g.clone(), twisted).unwrap()
        };
        let dec = isotypic_decompose(&rep, &irr).unwrap();
        prop_assert_eq!(dec.multiplicities(&irr), mults.clone());
        for (k, &m) in mults.iter().enumerate() {
            prop_assert_eq!(multiplicity(&rep, &irr, k).unwrap().0, m);
        }
        prop_assert!(dec.round_trip_residual(&rep, &irr) < 1e-7);
    }

    #[test]
    fn coboundaries_compose_and_preserve_validity(
        g in catalog_group(),
        complex in complex(),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let whole = Subgroup::whole(&g);
        let c = random_discrete_cocycle(&g, &whole, &complex, &mut rng);
        prop_assert!(c.validate(&g, 0.5).valid);
        let n = complex.charts();
        let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> {
            (0..n).map(|_| rand::Rng::random_range(rng, 0..g.order())).collect()
        };
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        let xy: Vec<usize> = x.iter().zip(&y).map(|(&a, &b)| g.mul(a, b)).collect();
        let twice = c.apply_coboundary(&g, &x).apply_coboundary(&g, &y);
        prop_assert_eq!(&twice.labels, &c.apply_coboundary(&g, &xy).labels);
        prop_assert!(twice.validate(&g, 0.5).valid);
        let identity = vec![0; n];
        prop_assert_eq!(&c.apply_coboundary(&g, &identity).labels, &c.labels);
    }

    #[test]
    fn monodromy_is_a_gauge_invariant(
        g in catalog_group(),
        n in 3usize..7,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let complex = BaseComplex::cycle(n);
        let c = random_discrete_cocycle(&g, &Subgroup::whole(&g), &complex, &mut rng);
        let gauge: Vec<usize> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0..g.order())).collect();
        let d = c.apply_coboundary(&g, &gauge);
        prop_assert!(simultaneously_conjugate(&g, &c.holonomies(&g), &d.holonomies(&g)));
        prop_assert_eq!(holonomy_index(&g, &c), holonomy_index(&g, &d));
        let witness = discrete_cohomologous(&g, &c, &d).expect("gauge-equivalent data is cohomologous");
        prop_assert_eq!(&c.apply_coboundary(&g, &witness).labels, &d.labels);
        let cov = CoveringSpace::new(&g, &c).unwrap();
        prop_assert_eq!(cov.components, holonomy_index(&g, &c));
        prop_assert!(cov.deck_action_is_free(&g));
    }

    #[test]
    fn sampled_cocycles_round_trip(seed in any::<u64>(), shape in 0usize..3) {
        let g = Arc::new(FiniteGroup::cyclic(6));
        let h = g.subgroup_closure(&[2]);
        let spec = [(1, 1), (2, 1)];
        let model = Arc::new(build_model(g.clone(), h, &spec).unwrap());
        let group = ComponentAutGroup::new(model.clone());
        let complex = [BaseComplex::cycle(4), BaseComplex::simplex(4), BaseComplex::path(3)][shape].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_normalized_vect(&group, &complex, &mut rng);
        let (aut, _) = include(&group, &v, &mut rng).unwrap();
        let report = cocycle_round_trip(&model, &aut, seed, 1e-8).unwrap();
        prop_assert!(report.pass);
        let covering = report.covering.unwrap();
        prop_assert_eq!(covering.components, holonomy_index(model.base_group(), &aut.map(|a| a.a())));
    }
}

#[test]
fn regular_subgroup_spec_matches_degrees() {
    let g = catalog::d4();
    let h = g.subgroup_closure(&[g.find("(1 3)(2 4)").unwrap()]);
    let irr = subgroup_irreps(&g, &h).unwrap();
    assert_eq!(irr.table.degrees, vec![1, 1]);
}

#[test]
fn a_trivial_discrete_cocycle_gives_disjoint_sheets() {
    let g = catalog::s3();
    let c = EdgeCocycle::new(BaseComplex::cycle(5), vec![0; 5]).unwrap();
    let cov = CoveringSpace::new(&g, &c).unwrap();
    assert_eq!(cov.components, 6);
}
