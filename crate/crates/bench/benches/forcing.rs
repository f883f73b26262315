use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use forcinglab_core::names::{name_universe, truth_value};
use forcinglab_core::poset::separative_posets;
use forcinglab_core::{
    build_iteration, enumerate_generics, make_context, parse_closed_formula, ro_algebra,
    AlgebraLimits, Iteration, IterationCaps, Poset, StepProvider,
};

fn two_atom_tower(stages: usize) -> StepProvider {
    StepProvider::constant(vec![Some(Poset::antichain(2)); stages])
}

fn iteration(stages: usize) -> Arc<Iteration> {
    Arc::new(build_iteration(two_atom_tower(stages), IterationCaps::default()).unwrap())
}

fn algebras(c: &mut Criterion) {
    let posets = separative_posets(5);
    c.bench_function("ro_algebra/separative<=5", |b| {
        b.iter(|| {
            for p in &posets {
                black_box(ro_algebra(p, AlgebraLimits::default()).unwrap());
            }
        })
    });
}

fn iterations(c: &mut Criterion) {
    for stages in [2, 3] {
        c.bench_function(&format!("build_iteration/A2^{stages}"), |b| {
            b.iter(|| {
                black_box(
                    build_iteration(two_atom_tower(stages), IterationCaps::default()).unwrap(),
                )
            })
        });
    }
}

fn truth_values(c: &mut Criterion) {
    let alg = Arc::new(ro_algebra(&Poset::antichain(2), AlgebraLimits::default()).unwrap());
    let u = name_universe(alg, 1, 1000).unwrap();
    let f = parse_closed_formula("forall x (exists y (x in y | x = y))").unwrap();
    c.bench_function("truth_value/A2-rank1", |b| {
        b.iter(|| black_box(truth_value(&f, &u).unwrap()))
    });
}

fn contexts(c: &mut Criterion) {
    let it = iteration(3);
    let g = enumerate_generics(it.stage(1).poset()).unwrap().remove(0);
    c.bench_function("make_context/A2^3@1", |b| {
        b.iter(|| black_box(make_context(it.clone(), 1, &g).unwrap()))
    });
}

criterion_group!(benches, algebras, iterations, truth_values, contexts);
criterion_main!(benches);
