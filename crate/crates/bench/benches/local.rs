use criterion::{black_box, criterion_group, criterion_main, Criterion};

use eulercong_core::curve::{local_data, local_data_over, tate_algorithm, BaseField, CurveModel};
use eulercong_core::pipeline::{analyze_pair, bundled_records, AnalysisConfig};

fn curve_462d1() -> CurveModel {
    CurveModel::from_i64("462d1", [1, 0, 1, -1676, 5058506]).unwrap()
}

fn tate(c: &mut Criterion) {
    let e = curve_462d1();
    c.bench_function("tate_algorithm 462d1 at 2 (I26)", |b| b.iter(|| tate_algorithm(black_box(&e), 2).unwrap()));
    c.bench_function("local_data 462d1 at all bad primes", |b| {
        b.iter(|| [2u64, 3, 7, 11].map(|l| local_data(black_box(&e), l).unwrap()))
    });
}

fn point_counting(c: &mut Criterion) {
    let e = curve_462d1();
    let mut g = c.benchmark_group("count_points");
    for l in [101u64, 997] {
        g.bench_function(format!("F_{l}"), |b| b.iter(|| local_data(black_box(&e), l).unwrap()));
    }
    g.bench_function("F_{19^2} (inert place over Q(i))", |b| {
        let eq = e.over(BaseField::Qi);
        b.iter(|| local_data_over(black_box(&eq), 19).unwrap())
    });
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let records = bundled_records();
    let config = AnalysisConfig::default();
    let mut g = c.benchmark_group("analyze_pair");
    g.sample_size(10);
    g.bench_function("66a1/462d1 over Q", |b| {
        b.iter(|| analyze_pair(&records, "66a1", "462d1", 5, BaseField::Q, &config).unwrap())
    });
    g.bench_function("38a1/114b1 over Q(i)", |b| {
        b.iter(|| analyze_pair(&records, "38a1", "114b1", 5, BaseField::Qi, &config).unwrap())
    });
    g.finish();
}

criterion_group!(benches, tate, point_counting, pipeline);
criterion_main!(benches);
