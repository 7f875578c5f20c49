use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rcc8::algebra::{compose_sets, BaseRelation, Lexicon, RelationSet};
use rcc8::oracle::{classify, random_region_with, soundness_sample, Bounds};
use rcc8::scoring::{parse_preferred, parse_relation_set};
use rcc8::{CompositionTable, ConstraintNetwork};

fn bench_classify(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs: Vec<_> = (0..256)
        .map(|i| {
            let one_piece = i % 2 == 0;
            (
                random_region_with(&mut rng, Bounds::DEFAULT, one_piece),
                random_region_with(&mut rng, Bounds::DEFAULT, one_piece),
            )
        })
        .collect();
    c.bench_function("classify 6x6 x256", |b| {
        b.iter(|| {
            pairs
                .iter()
                .map(|(x, y)| classify(black_box(x), black_box(y)) as u8 as u32)
                .sum::<u32>()
        })
    });

    let wide = Bounds::new(96, 4);
    let pairs: Vec<_> = (0..64)
        .map(|_| {
            (
                random_region_with(&mut rng, wide, true),
                random_region_with(&mut rng, wide, true),
            )
        })
        .collect();
    c.bench_function("classify 96x4 x64", |b| {
        b.iter(|| {
            pairs
                .iter()
                .map(|(x, y)| classify(black_box(x), black_box(y)) as u8 as u32)
                .sum::<u32>()
        })
    });
}

fn bench_algebra(c: &mut Criterion) {
    let table = CompositionTable::rcc8();
    c.bench_function("compose all set pairs", |b| {
        b.iter(|| {
            let mut acc = 0u32;
            for x in RelationSet::all_subsets() {
                for y in [
                    RelationSet::from_bits(0x03),
                    RelationSet::from_bits(0x5a),
                    RelationSet::ALL,
                ] {
                    acc += compose_sets(black_box(x), y, &table).len() as u32;
                }
            }
            acc
        })
    });

    let mut net = ConstraintNetwork::unconstrained(8);
    let chain = [
        BaseRelation::TPP,
        BaseRelation::EC,
        BaseRelation::NTPPi,
        BaseRelation::PO,
    ];
    for i in 0..7 {
        net.add_constraint(
            &format!("v{i}"),
            &format!("v{}", i + 1),
            RelationSet::singleton(chain[i % 4]),
        )
        .unwrap();
    }
    c.bench_function("closure 8 vars", |b| {
        b.iter_batched(
            || net.clone(),
            |n| n.algebraic_closure(&table).is_ok(),
            BatchSize::SmallInput,
        )
    });
    c.bench_function("scenario 8 vars", |b| {
        b.iter(|| net.refine_to_scenario(&table).is_some())
    });
}

fn bench_parse(c: &mut Criterion) {
    let text = "The relations DC(x,y) and DC(y,z) say nothing about x and z. They could be DC(x,z), \
                EC(x,z) or PO(x,z), among others. However, the most likely relation is DC(x,z). \
                Final answer: DC(x,z), EC(x,z), PO(x,z), TPP(x,z), NTPP(x,z), TPPi(x,z), NTPPi(x,z), EQ(x,z).";
    c.bench_function("parse relation set", |b| {
        b.iter(|| parse_relation_set(black_box(text), &Lexicon::CANONICAL))
    });
    c.bench_function("parse preferred", |b| {
        b.iter(|| parse_preferred(black_box(text), &Lexicon::CANONICAL))
    });
}

fn bench_soundness(c: &mut Criterion) {
    let table = CompositionTable::rcc8();
    let mut group = c.benchmark_group("soundness");
    group.sample_size(10);
    group.bench_function("10k samples 6x6", |b| {
        b.iter(|| soundness_sample(&table, 10_000, Bounds::DEFAULT, 7).len())
    });
    group.finish();
}

criterion_group!(benches, bench_classify, bench_algebra, bench_parse, bench_soundness);
criterion_main!(benches);
