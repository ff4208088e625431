use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rigidview::constraints::{ConstraintSystem, Family, FamilyParams};
use rigidview::forms::{polarize, unit_distance_q};
use rigidview::polyspace::{random_prime, span_facts, OcticExpander, PrimeField};
use rigidview::triangulate::triangulate;
use rigidview::{Rational, Tolerances};
use rigidview_bench::unit_pair_fixture;

fn octic_evaluation(c: &mut Criterion) {
    let (rig, u, v) = unit_pair_fixture(1, 2);
    let exact = ConstraintSystem::new(&rig, Family::OcticNine, FamilyParams::default()).unwrap();
    c.bench_function("octic nine, exact, n=2", |b| {
        b.iter(|| exact.evaluate(black_box(&[&u, &v])).unwrap())
    });
    let rig_f = rig.to_f64();
    let (uf, vf): (Vec<_>, Vec<_>) = (
        u.iter().map(|p| p.to_f64()).collect(),
        v.iter().map(|p| p.to_f64()).collect(),
    );
    let float = ConstraintSystem::new(&rig_f, Family::OcticFull, FamilyParams::default()).unwrap();
    c.bench_function("octic full, float, n=2", |b| {
        b.iter(|| float.evaluate(black_box(&[&uf, &vf])).unwrap())
    });
}

fn exact_triangulation(c: &mut Criterion) {
    let (rig, u, _) = unit_pair_fixture(2, 4);
    let tol = Tolerances::default();
    c.bench_function("triangulate, exact, n=4", |b| {
        b.iter(|| triangulate(&rig, black_box(&u), &tol).unwrap())
    });
}

fn symbolic_expansion(c: &mut Criterion) {
    let (rig, _, _) = unit_pair_fixture(3, 2);
    let t = polarize(&unit_distance_q::<Rational>()).unwrap();
    let ring = PrimeField::new(random_prime(3)).unwrap();
    let mut group = c.benchmark_group("polyspace");
    group.sample_size(10);
    group.bench_function("expand 441 octics mod p", |b| {
        b.iter(|| {
            OcticExpander::new(&rig, &t, &ring)
                .unwrap()
                .full_family((0, 1), (0, 1))
                .unwrap()
        })
    });
    group.bench_function("span facts mod p", |b| {
        b.iter(|| span_facts(black_box(&rig), 3).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    octic_evaluation,
    exact_triangulation,
    symbolic_expansion
);
criterion_main!(benches);
