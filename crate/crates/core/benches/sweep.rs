use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optoforce::analysis::{run_sweep_with, Model, ModelParams, SweepSpec, TimeGrid};
use optoforce::exec::Execution;

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for model in [Model::Cavityless, Model::Cavity] {
        let grid = TimeGrid::new(0.0, 8.0 * std::f64::consts::PI, 4001).unwrap();
        let mut spec = SweepSpec::new(ModelParams::reference(model), grid, vec![0.0, 5.0], vec![0.0, 300.0]).unwrap();
        spec.spot_checks = 0;
        for (name, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            group.bench_with_input(BenchmarkId::new(name, model.name()), &spec, |b, spec| {
                b.iter(|| run_sweep_with(spec, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
