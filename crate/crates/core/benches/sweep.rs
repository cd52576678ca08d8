use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use unifex::besselexp::Method;
use unifex::errormodel::{sweep, Execution, RegionSpec, Settings};
use unifex::Complex64;

fn params(xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn bench_sweep(c: &mut Criterion) {
    let cases = [
        (
            "bessel",
            Method::BesselKernel,
            params(&[3.0]),
            params(&[3.5, 5.0]),
            RegionSpec::strip(2.0, (-20.0, 20.0), (41, 5)),
        ),
        (
            "bessel-elem",
            Method::TrigElementary,
            params(&[3.0]),
            params(&[3.5, 5.0]),
            RegionSpec::strip(2.0, (-20.0, 20.0), (41, 5)),
        ),
        (
            "kummer",
            Method::KummerKernel,
            params(&[1.0, 1.5]),
            params(&[2.0, 3.0]),
            RegionSpec::half_plane(0.0, (0.0, 40.0), (-5.0, 5.0), (41, 5)),
        ),
        (
            "kummer-elem",
            Method::ExpElementary,
            params(&[1.0, 1.5]),
            params(&[2.0, 3.0]),
            RegionSpec::half_plane(0.0, (0.0, 40.0), (-5.0, 5.0), (41, 5)),
        ),
    ];
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, method, a, b, region) in cases {
        let region = region.expect("valid region");
        for (label, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            let settings = Settings {
                execution,
                ..Settings::default()
            };
            group.bench_with_input(BenchmarkId::new(name, label), &settings, |bench, s| {
                bench.iter(|| {
                    sweep(method, &a, &b, &region, black_box(&[8, 16, 32]), s).expect("sweep")
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
