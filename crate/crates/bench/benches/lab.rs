use criterion::{black_box, criterion_group, criterion_main, Criterion};

use parrep_bench::{ghz_squared, parity};
use parrep_core::abelian::{smith_normal_form, relation_matrix, universal_embedding};
use parrep_core::lab::{greedy_hard_chain, simulate_embedding_strategy, EmbeddingConfig};
use parrep_core::restrictions::{pairing_error_exact, uniformize};
use parrep_core::analysis::ProbabilitySpace;
use parrep_core::{classify, gallery, repeat_game, value, ProductEvent};

fn structure(c: &mut Criterion) {
    let s = gallery::random_3cnf(96, 8, 1).unwrap().support_set();
    c.bench_function("classify 3cnf-96-8", |b| b.iter(|| classify(black_box(&s))));
    c.bench_function("universal embedding 3cnf-96-8", |b| b.iter(|| universal_embedding(black_box(&s)).unwrap()));
    let m = relation_matrix(&gallery::rect(3, 3).unwrap().support_set()).unwrap();
    c.bench_function("snf rect-3-3", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn games(c: &mut Criterion) {
    let g2 = repeat_game(&gallery::ghz(), 2).unwrap();
    let mut group = c.benchmark_group("value");
    group.sample_size(10);
    group.bench_function("ghz^2", |b| b.iter(|| value(black_box(&g2)).unwrap()));
    group.finish();
    let (g, s) = ghz_squared();
    c.bench_function("chain ghz^2", |b| b.iter(|| greedy_hard_chain(black_box(&g), &s).unwrap()));
    let cfg = EmbeddingConfig::new(0.5, 3);
    let e = ProductEvent::full(&g);
    c.bench_function("exact embedding ghz^2", |b| {
        b.iter(|| simulate_embedding_strategy(black_box(&g), &s, &e, &cfg).unwrap())
    });
}

fn restrictions(c: &mut Criterion) {
    let f = parity(8);
    c.bench_function("uniformize parity-8", |b| b.iter(|| uniformize(&[black_box(f.clone())], 0.1, 0.5, 1).unwrap()));
    let space = ProbabilitySpace::uniform(3);
    c.bench_function("pairing error |S|=32", |b| b.iter(|| pairing_error_exact(black_box(&space), 32, 2).unwrap()));
}

criterion_group!(benches, structure, games, restrictions);
criterion_main!(benches);
