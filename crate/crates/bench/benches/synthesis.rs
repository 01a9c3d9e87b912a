use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fibertopo::corpus;
use fibertopo::solver::{solve, BranchAndBound, SolverParams};
use fibertopo::validate::{audit, decode};
use fibertopo::{build, expand_max_topology};

fn model_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for name in ["scenario1", "scenario4", "scenario5", "ife"] {
        let max = expand_max_topology(&corpus::scenario(name).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(name), &max, |b, max| {
            b.iter(|| build(black_box(max)).unwrap())
        });
    }
    g.finish();
}

fn reference_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_bb");
    g.sample_size(10);
    for name in ["scenario1", "scenario2", "scenario5"] {
        let max = expand_max_topology(&corpus::scenario(name).unwrap()).unwrap();
        let art = build(&max).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(name), &art, |b, art| {
            b.iter(|| {
                solve(
                    &BranchAndBound::default(),
                    black_box(&art.problem),
                    &SolverParams::default(),
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

fn decode_and_audit(c: &mut Criterion) {
    let max = expand_max_topology(&corpus::scenario("scenario4").unwrap()).unwrap();
    let art = build(&max).unwrap();
    let sol = solve(&BranchAndBound::default(), &art.problem, &SolverParams::default()).unwrap();
    c.bench_function("decode_audit/scenario4", |b| {
        b.iter(|| {
            let t = decode(black_box(&sol), &max, &art).unwrap();
            audit(&t, &max.scenario)
        })
    });
}

criterion_group!(benches, model_build, reference_solve, decode_and_audit);
criterion_main!(benches);
