use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use growthlab::asymptotics::sweep_rv_grid;
use growthlab::dynamics::{integrate, IntegrationOptions, Problem};
use growthlab::measures::MeasureKernel;
use growthlab::nonlinearity::Nonlinearity;
use growthlab::Execution;

// Without the `parallel` feature both variants run on the calling thread.
fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn volterra(c: &mut Criterion) {
    let n = Nonlinearity::example(1.0).unwrap();
    let p = Problem::Vde { kernel: MeasureKernel::powerlaw(3.0, 2.0).unwrap(), x0: 1.0 };
    let mut g = c.benchmark_group("vde_t400");
    g.sample_size(10);
    for (name, exec) in modes() {
        let opts = IntegrationOptions { t_end: 400.0, h: 1.0 / 32.0, exec, ..Default::default() };
        g.bench_function(name, |b| b.iter(|| integrate(&n, &p, black_box(&opts)).unwrap()));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let thetas = [1.5, 2.0, 3.0];
    let alphas = [1.1, 1.35, 1.6, 1.9];
    let mut g = c.benchmark_group("rv_sweep");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_function(name, |b| b.iter(|| sweep_rv_grid(black_box(&thetas), &alphas, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, volterra, sweep);
criterion_main!(benches);
