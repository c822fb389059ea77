use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use treepin_bench::irreducible_instance;
use treepin_core::scheme::DEFAULT_MAX_ATTEMPTS;
use treepin_core::{make_ext_field, run_protocol, synth_random, FMatrix};

fn field_mul(c: &mut Criterion) {
    for (q, n) in [(2u64, 8usize), (3, 5), (2, 20)] {
        let f = make_ext_field(q, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<_> = (0..1024).map(|_| f.random(&mut rng)).collect();
        c.bench_function(&format!("mul F_{q}^{n} x1024"), |b| {
            b.iter(|| xs.windows(2).fold(f.one(), |acc, w| f.mul(acc, f.mul(w[0], w[1]))))
        });
    }
}

fn rank(c: &mut Criterion) {
    let f = make_ext_field(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for size in [16usize, 48] {
        c.bench_function(&format!("rank {size}x{size} over F_16"), |b| {
            b.iter_batched(|| FMatrix::random(&f, size, size, &mut rng), |m| black_box(m.rank()), BatchSize::SmallInput)
        });
    }
}

fn synthesis(c: &mut Criterion) {
    for vertices in [5usize, 9] {
        let inst = irreducible_instance(vertices, 3);
        c.bench_function(&format!("synth_random |V|={vertices}"), |b| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap()
            })
        });
        let sch = synth_random(&inst, 0, DEFAULT_MAX_ATTEMPTS).unwrap();
        c.bench_function(&format!("simulate 16 trials |V|={vertices}"), |b| {
            b.iter(|| run_protocol(&sch, &inst, 0, 16).unwrap())
        });
    }
}

criterion_group!(benches, field_mul, rank, synthesis);
criterion_main!(benches);
