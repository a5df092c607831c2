use criterion::{black_box, criterion_group, criterion_main, Criterion};
use torelli_core::delaunay::{decompositions_equivalent, delaunay, delaunay_of_graph};
use torelli_core::forms::{arithmetically_equivalent, QuadraticForm};
use torelli_core::named::{cycle_weighted, k4};
use torelli_core::stable::{twist_orbit, CurveModel};
use torelli_core::tropical::{jacobian, TropicalCurve};
use torelli_core::{enumerate_stable_weighted_graphs, Limits, Rational};

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate genus 3", |b| b.iter(|| enumerate_stable_weighted_graphs(black_box(3)).unwrap()));
}

fn arithmetic(c: &mut Criterion) {
    let lengths = |v: [i64; 6]| v.iter().map(|&x| Rational::from_integer(x.into())).collect();
    let q1 = jacobian(&TropicalCurve::from_vec(k4(), lengths([1, 2, 3, 4, 5, 6])).unwrap());
    let q2 = jacobian(&TropicalCurve::from_vec(k4(), lengths([6, 5, 4, 3, 2, 1])).unwrap());
    c.bench_function("arithmetic equivalence K4", |b| {
        b.iter(|| arithmetically_equivalent(black_box(&q1), black_box(&q2)).unwrap())
    });
}

fn delaunay_decomposition(c: &mut Criterion) {
    let d3 = QuadraticForm::from_integers(vec![vec![3, -1, -1], vec![-1, 3, -1], vec![-1, -1, 3]]).unwrap();
    c.bench_function("delaunay rank 3", |b| b.iter(|| delaunay(black_box(&d3)).unwrap()));
    let (x, y) = (delaunay_of_graph(&k4()).unwrap(), delaunay(&d3).unwrap());
    c.bench_function("delaunay equivalence", |b| b.iter(|| decompositions_equivalent(&x, &y).unwrap()));
}

fn twists(c: &mut Criterion) {
    let g = cycle_weighted(&[1, 1, 1, 1, 1]);
    let labels = g
        .vertices()
        .iter()
        .zip(["A", "B", "C", "D", "E"])
        .map(|(v, l)| (v.id.clone(), l.to_string()))
        .collect();
    let x = CurveModel::new(g, &labels).unwrap();
    c.bench_function("twist orbit 5-cycle", |b| b.iter(|| twist_orbit(&x, &Limits::default()).unwrap()));
}

criterion_group!(benches, enumeration, arithmetic, delaunay_decomposition, twists);
criterion_main!(benches);
