use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};

use knowref_bench::{instances, sentences};
use knowref_core::evaluation::{fleiss_kappa, AgreementMatrix};
use knowref_core::labeling::infer_label;
use knowref_core::mining::Miner;
use knowref_core::resolvers::{binary_softmax, substitute_candidate, NGramModel};
use knowref_core::switching::switch_antecedents;
use knowref_core::tagging::TaggerHandle;
use knowref_core::{AntecedentId, GenderLexicon};

fn tagging(c: &mut Criterion) {
    let tagger = TaggerHandle::bundled();
    let records = sentences(256);
    let mut group = c.benchmark_group("tagging");
    group.throughput(Throughput::Elements(records.len() as u64));
    group.bench_function("perceptron", |b| {
        b.iter(|| {
            for r in &records {
                black_box(tagger.tag(&r.tokens).unwrap());
            }
        })
    });
    group.finish();
}

fn mining(c: &mut Criterion) {
    let miner = Miner::new(TaggerHandle::bundled());
    let records = sentences(256);
    let mut group = c.benchmark_group("mining");
    group.throughput(Throughput::Elements(records.len() as u64));
    group.bench_function("all_stages", |b| {
        b.iter_batched(
            || records.clone(),
            |mut rs| {
                for r in &mut rs {
                    black_box(miner.mine(r).unwrap());
                }
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn labeling_and_switching(c: &mut Criterion) {
    let lexicon = GenderLexicon::bundled();
    let corpus = instances(1024);
    let mut group = c.benchmark_group("instances");
    group.throughput(Throughput::Elements(corpus.len() as u64));
    group.bench_function("infer_label", |b| {
        b.iter(|| {
            for x in &corpus {
                black_box(infer_label(x, &lexicon));
            }
        })
    });
    group.bench_function("switch_antecedents", |b| {
        b.iter(|| {
            for x in &corpus {
                black_box(switch_antecedents(x).unwrap());
            }
        })
    });
    group.finish();
}

fn ngram(c: &mut Criterion) {
    let corpus = instances(1024);
    let train: Vec<Vec<String>> = corpus.iter().map(|x| x.tokens.clone()).collect();
    let model = NGramModel::train(&train, 3, 0.1).unwrap();
    let mut group = c.benchmark_group("ngram");
    group.bench_function("train_1024", |b| b.iter(|| black_box(NGramModel::train(&train, 3, 0.1).unwrap())));
    group.throughput(Throughput::Elements(corpus.len() as u64));
    group.bench_function("substitution_scores", |b| {
        b.iter(|| {
            for x in &corpus {
                let s1 = model.score(&substitute_candidate(x, AntecedentId::First));
                let s2 = model.score(&substitute_candidate(x, AntecedentId::Second));
                black_box(binary_softmax(s1, s2));
            }
        })
    });
    group.finish();
}

fn kappa(c: &mut Criterion) {
    let rows: Vec<[u32; 4]> = (0..10_000u32)
        .map(|i| {
            let a = i % 7;
            [a.min(6), 6 - a.min(6), 0, 0]
        })
        .collect();
    let matrix = AgreementMatrix::new(6, rows).unwrap();
    c.bench_function("fleiss_kappa_10k", |b| b.iter(|| black_box(fleiss_kappa(&matrix).unwrap())));
}

criterion_group!(benches, tagging, mining, labeling_and_switching, ngram, kappa);
criterion_main!(benches);
