use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qfree_bench::{alternating_gx, cyclic_model, dihedral_model};
use qfree_core::aut::lift;
use qfree_core::cocycle::{
    decompose, include, normalize_transitions, random_gauge, random_normalized_vect, BaseComplex, ComponentAutGroup,
};
use qfree_core::group::catalog;
use qfree_core::nonnormal::{round_trip_from_g, verify_fixed_set_identity};
use qfree_core::rep::irreducibles;
use qfree_core::verify::cocycle_round_trip;

fn representations(c: &mut Criterion) {
    let mut group = c.benchmark_group("irreducibles");
    for (name, g) in catalog::all() {
        let g = Arc::new(g);
        group.bench_function(name, |b| b.iter(|| irreducibles(black_box(&g)).unwrap()));
    }
    group.finish();
}

fn automorphisms(c: &mut Criterion) {
    let model = dihedral_model().unwrap();
    let a = model.base_group().order() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("lift translation", |b| b.iter(|| lift(&model, black_box(a), &mut rng).unwrap()));
}

fn cocycles(c: &mut Criterion) {
    let model = cyclic_model().unwrap();
    let group = ComponentAutGroup::new(model.clone());
    let complex = BaseComplex::simplex(5);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = random_normalized_vect(&group, &complex, &mut rng);
    let gauged = v.apply_coboundary(&group, &random_gauge(&group, complex.charts(), &mut rng));
    c.bench_function("normalize transitions", |b| {
        b.iter(|| normalize_transitions(&group, black_box(&gauged), &mut rng).unwrap())
    });
    let (aut, _) = include(&group, &v, &mut rng).unwrap();
    c.bench_function("decompose", |b| b.iter(|| decompose(&model, black_box(&aut)).unwrap()));
    c.bench_function("cocycle round trip", |b| b.iter(|| cocycle_round_trip(&model, black_box(&aut), 3, 1e-8).unwrap()));
}

fn reduction(c: &mut Criterion) {
    c.bench_function("build induced model", |b| b.iter(|| alternating_gx().unwrap()));
    let (gx, h) = alternating_gx().unwrap();
    c.bench_function("induce after reduce", |b| b.iter(|| round_trip_from_g(black_box(gx.bundle()), &h).unwrap()));
    c.bench_function("fixed set identity", |b| b.iter(|| verify_fixed_set_identity(black_box(&gx))));
}

criterion_group!(benches, representations, automorphisms, cocycles, reduction);
criterion_main!(benches);
