use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use zitterlab::algebra::Complex;
use zitterlab::dynamics::{init_gaussian, GaussianPacket, Grid1D, SplitStepPropagator};
use zitterlab::pairsim::{pair_mode_sum_series, ModeSumConfig, PotentialSpec};
use zitterlab::par::Execution;
use zitterlab::planewave::PhysConsts;

fn mode_sum(c: &mut Criterion) {
    let k = PhysConsts::atomic();
    let mut group = c.benchmark_group("pair_mode_sum");
    group.sample_size(10);
    for n in [128usize, 256] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let cfg = ModeSumConfig {
                grid: Grid1D::centered(n, 1.0).unwrap(),
                execution: exec,
                ..ModeSumConfig::desk(PotentialSpec::TanhStep {
                    v0: 2.5 * k.c * k.c,
                    width: 0.3 / k.c,
                })
            };
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &cfg, |b, cfg| {
                b.iter(|| pair_mode_sum_series(cfg, &[1e-4], &k).unwrap())
            });
        }
    }
    group.finish();
}

fn split_steps(c: &mut Criterion) {
    let k = PhysConsts::atomic();
    let grid = Grid1D::centered(1024, 2.0).unwrap();
    let packet = GaussianPacket {
        x0: 0.0,
        p0: 0.0,
        sigma_x: 0.1,
        c_plus: Complex::new(0.5f64.sqrt(), 0.0),
        c_minus: Complex::new(0.5f64.sqrt(), 0.0),
    };
    let field = init_gaussian(grid, &packet, &k).unwrap();
    let pot = PotentialSpec::TanhStep {
        v0: 2.5 * k.c * k.c,
        width: 0.3 / k.c,
    };
    let prop = SplitStepPropagator::new(grid, 2e-6, &pot, &k).unwrap();
    let mut ws = prop.workspace();
    c.bench_function("split_step_1024_x100", |b| {
        b.iter(|| {
            let mut f = field.clone();
            prop.evolve(&mut f, 100, &mut ws);
            f
        })
    });
}

criterion_group!(benches, mode_sum, split_steps);
criterion_main!(benches);
