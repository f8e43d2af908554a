use std::hint::black_box;

use clairaut_bench::{first_point, scenario};
use clairaut_core::ricci_decomp::{self, DecompContext};
use clairaut_core::{clairaut, expr, models};
use criterion::{criterion_group, criterion_main, Criterion};

fn expressions(c: &mut Criterion) {
    let coords: Vec<String> = ["u1", "u2", "u3"].iter().map(|s| s.to_string()).collect();
    let e = expr::parse(
        "exp(-2*u1) * sin(u2)^2 + u3^3 / (1 + u1^2)",
        &coords,
        &Default::default(),
    )
    .unwrap();
    let p = [0.3, -0.7, 1.1];
    c.bench_function("expr/eval", |b| b.iter(|| e.eval(black_box(&p)).unwrap()));
    c.bench_function("expr/eval_jet2", |b| b.iter(|| e.eval_jet2(black_box(&p)).unwrap()));
}

fn curvature(c: &mut Criterion) {
    let m = models::conformal_example();
    let p = [0.4, 0.1, -0.2];
    c.bench_function("chart/christoffel", |b| {
        b.iter(|| m.christoffel(black_box(&p)).unwrap())
    });
    c.bench_function("chart/ricci", |b| b.iter(|| m.ricci(black_box(&p)).unwrap()));
    let h = models::twisted_heisenberg_submersion();
    let q = [0.2, -0.5, 0.3];
    c.bench_function("chart/ricci_non_diagonal", |b| {
        b.iter(|| h.total().ricci(black_box(&q)).unwrap())
    });
}

fn submersion(c: &mut Criterion) {
    let scn = scenario("golden");
    let p = first_point(&scn);
    c.bench_function("submersion/at", |b| {
        b.iter(|| scn.submersion.at(black_box(&p)).unwrap())
    });
    c.bench_function("ricci_decomp/context", |b| {
        b.iter(|| DecompContext::new(&scn.submersion, black_box(&p)).unwrap())
    });
    let ctx = DecompContext::new(&scn.submersion, &p).unwrap();
    c.bench_function("ricci_decomp/breakdowns", |b| {
        b.iter(|| ricci_decomp::breakdowns(black_box(&ctx), None))
    });
}

fn geodesic(c: &mut Criterion) {
    let scn = scenario("golden");
    let p = first_point(&scn);
    let v = [0.3, 0.2, 0.4];
    c.bench_function("clairaut/geodesic_1000_steps", |b| {
        b.iter(|| clairaut::geodesic_integrate(scn.submersion.total(), black_box(&p), &v, 1.0, 1e-3).unwrap())
    });
}

criterion_group!(benches, expressions, curvature, submersion, geodesic);
criterion_main!(benches);
