use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use degennes::{assemble, contour_for, eigs, extend_mu, riesz_projection, Complex64, Discretization, OperatorSpec};

const R0: f64 = 0.438;

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for disc in [Discretization::finite_difference(2000), Discretization::collocation(96)] {
        let id = BenchmarkId::from_parameter(format!("{:?}-{}", disc.scheme, disc.n_points));
        group.bench_with_input(id, &disc, |b, d| {
            b.iter(|| assemble(black_box(&OperatorSpec::de_gennes(Complex64::new(0.8, 0.1))), d).unwrap())
        });
    }
    group.finish();
}

fn eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigs");
    for disc in [
        Discretization::finite_difference(2000),
        Discretization::finite_difference(20_000),
        Discretization::collocation(64),
        Discretization::collocation(96),
    ] {
        let op = assemble(&OperatorSpec::de_gennes(0.8), &disc).unwrap();
        let id = BenchmarkId::from_parameter(format!("{:?}-{}", disc.scheme, disc.n_points));
        group.bench_with_input(id, &op, |b, op| b.iter(|| eigs(black_box(op), 3).unwrap()));
    }
    group.finish();
}

fn extension(c: &mut Criterion) {
    let disc = Discretization::collocation(64);
    let xi = Complex64::new(0.8, 0.1);
    let contour = contour_for(xi, R0, 32, &disc).unwrap();
    c.bench_function("riesz_projection/colloc-64", |b| {
        b.iter(|| riesz_projection(black_box(xi), &contour, &disc).unwrap())
    });
    c.bench_function("extend_mu/colloc-64", |b| b.iter(|| extend_mu(black_box(xi), &disc, &contour).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = assembly, eigenvalues, extension
}
criterion_main!(benches);
