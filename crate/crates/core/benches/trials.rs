use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stochorder::maxitive::MaxitivityParams;
use stochorder::random::Generator;
use stochorder::verify::run_check;
use stochorder::{check_maxitivity, Execution, FunctionalSpec, OrderRelation};

fn maxitivity(c: &mut Criterion) {
    let mut rng = stochorder::random::trial_rng(11, 0);
    let curve = Generator::default().concave_curve(&mut rng);
    let spec = FunctionalSpec::PenaltyIcx { curve };
    let params = MaxitivityParams {
        trials: 200,
        ..MaxitivityParams::default()
    };
    let mut group = c.benchmark_group("maxitivity_penalty_icx");
    for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &exec, |b, &exec| {
            b.iter(|| check_maxitivity(OrderRelation::Icx, &spec, &params, exec).unwrap())
        });
    }
    group.finish();
}

fn tv_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("tv_oracle_check");
    group.sample_size(10);
    for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &exec, |b, &exec| {
            b.iter(|| run_check("lattice.tv_oracle", 100, 0, 1e-9, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, maxitivity, tv_oracle);
criterion_main!(benches);
