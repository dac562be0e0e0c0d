use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use proxplay_bench::workloads;
use proxplay_core::{solve_play, Point, SetSpec, SolverOptions};

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_play");
    let opts = SolverOptions::default();
    for segments in [256, 4096] {
        group.throughput(Throughput::Elements(segments as u64));
        for w in workloads(segments) {
            group.bench_with_input(BenchmarkId::new(w.name, segments), &w, |b, w| {
                b.iter(|| solve_play(&w.set, black_box(&w.input), &w.z0, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_project(c: &mut Criterion) {
    let sets = [
        ("ball", SetSpec::ball([0.0, 0.0], 1.0).unwrap()),
        ("box", SetSpec::cube([-1.0, -1.0], [1.0, 1.0]).unwrap()),
        ("halfspace", SetSpec::halfspace([0.6, 0.8], 0.5).unwrap()),
        (
            "complement",
            SetSpec::complement_of_ball([0.0, 0.0], 1.0).unwrap(),
        ),
        (
            "union",
            SetSpec::union(
                vec![
                    SetSpec::ball([-2.0, 0.0], 1.0).unwrap(),
                    SetSpec::ball([2.0, 0.0], 1.0).unwrap(),
                ],
                2.0,
            )
            .unwrap(),
        ),
    ];
    let p = Point::from([-2.9, 0.4]);
    let mut group = c.benchmark_group("project");
    for (name, set) in &sets {
        group.bench_function(*name, |b| b.iter(|| set.project(black_box(&p)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_solve, bench_project);
criterion_main!(benches);
