use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use eulercong_core::lambda::{twist_euler_factor, weierstrass_prepare, LambdaElement, DEFAULT_DEGREE};
use eulercong_core::padic::{hensel_unit_root, padic_log, PadicNumber};

fn preparation(c: &mut Criterion) {
    let mut g = c.benchmark_group("weierstrass_prepare");
    // λ grows with the index of the first unit coefficient.
    for lambda in [1usize, 4, 8] {
        let mut cs: Vec<i64> = (0..lambda).map(|i| 5 * (i as i64 + 2)).collect();
        cs.push(3);
        cs.extend([7, -11, 13]);
        let f = LambdaElement::from_poly_i64(5, &cs, DEFAULT_DEGREE, 30).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(lambda), &f, |b, f| b.iter(|| weierstrass_prepare(black_box(f)).unwrap()));
    }
    g.finish();
}

fn twist(c: &mut Criterion) {
    let poly = [1, 1, 361].map(BigInt::from);
    let nv = BigInt::from(361);
    let mut g = c.benchmark_group("twist_euler_factor");
    for precision in [10u32, 30, 60] {
        g.bench_with_input(BenchmarkId::from_parameter(precision), &precision, |b, &n| {
            b.iter(|| twist_euler_factor(black_box(&poly), &nv, 5, DEFAULT_DEGREE, n).unwrap())
        });
    }
    g.finish();
}

fn padic(c: &mut Criterion) {
    c.bench_function("hensel_unit_root p=5 N=100", |b| b.iter(|| hensel_unit_root(black_box(&BigInt::from(2)), 5, 100).unwrap()));
    let x = PadicNumber::from_i64(6, 5, 60);
    c.bench_function("padic_log p=5 N=60", |b| b.iter(|| padic_log(black_box(&x)).unwrap()));
}

criterion_group!(benches, preparation, twist, padic);
criterion_main!(benches);
