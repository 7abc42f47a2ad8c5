use bubblescope::fit::solve_linear;
use bubblescope::{fit_window, scan, FitConfig, QualificationFilter, ScanGrid, Window};
use bubblescope_bench::bubble_series;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_solve_linear(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_linear");
    for span in [200, 500, 1000] {
        let (series, truth) = bubble_series(span, 0.01, 1);
        let log = series.to_log();
        group.bench_with_input(BenchmarkId::from_parameter(span), &log, |b, log| {
            b.iter(|| solve_linear(black_box(truth.tc), black_box(truth.alpha), black_box(truth.omega), log))
        });
    }
    group.finish();
}

fn bench_fit_window(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_window");
    group.sample_size(10);
    for span in [200, 500] {
        let (series, _) = bubble_series(span, 0.01, 2);
        let log = series.to_log();
        let window = Window::new(series.first_date(), series.last_date());
        group.bench_with_input(BenchmarkId::from_parameter(span), &log, |b, log| {
            b.iter(|| fit_window(log, window, &FitConfig::default(), &QualificationFilter::default()))
        });
    }
    group.finish();
}

fn bench_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    let (series, _) = bubble_series(200, 0.01, 3);
    let grid = ScanGrid { dt1: 14, dt2: 14, ..ScanGrid::default() };
    let config = FitConfig { n_starts: 5, ..FitConfig::default() };
    group.bench_function("200d_dt14", |b| b.iter(|| scan(&series, &grid, &config, &QualificationFilter::default())));
    group.finish();
}

criterion_group!(benches, bench_solve_linear, bench_fit_window, bench_scan);
criterion_main!(benches);
