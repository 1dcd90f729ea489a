use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperperc::oracle::{self, DEFAULT_BUDGET};
use hyperperc::par;
use hyperperc::verify::{self, Suite, SuiteParams};
use hyperperc::{CubeShape, Exec, Simulator, VertexSet};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn capped_oracle(c: &mut Criterion) {
    let shape = CubeShape::new(3, 3).unwrap();
    let mut group = c.benchmark_group("oracle_capped_q3_n3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "cap4"), |b| {
            b.iter(|| oracle::max_time_capped(shape, 4, DEFAULT_BUDGET, exec).unwrap())
        });
    }
    group.finish();
}

fn pair_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("two_subcube_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        let params = SuiteParams {
            q: Some(3),
            n: Some(3),
            exec,
            ..SuiteParams::default()
        };
        group.bench_function(BenchmarkId::new(name, "q3_n3"), |b| {
            b.iter(|| verify::run_suite(Suite::Lemma13, &params).unwrap())
        });
    }
    group.finish();
}

fn batch_runs(c: &mut Criterion) {
    let shape = CubeShape::new(6, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let seeds: Vec<VertexSet> = (0..256)
        .map(|_| {
            let mut s = VertexSet::empty(shape);
            for v in shape.vertices() {
                if rng.gen_bool(0.08) {
                    s.insert(v);
                }
            }
            s
        })
        .collect();
    let mut group = c.benchmark_group("batch_runs_q3_n6");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, seeds.len()), |b| {
            b.iter(|| {
                par::map_init(
                    exec,
                    seeds.clone(),
                    || Simulator::new(shape, 2).unwrap(),
                    |sim, s| sim.run_set(&s).unwrap().rounds,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, capped_oracle, pair_sweep, batch_runs);
criterion_main!(benches);
