use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use littlestone_lab::dimensions::ldim_by_trees;
use littlestone_lab::fooling::fool_many_with;
use littlestone_lab::gen;
use littlestone_lab::learners::{soa, worst_case_mistakes, ConstantLearner, Learner, MajorityLearner, SeededLearner};
use littlestone_lab::par::Exec;

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn trees(c: &mut Criterion) {
    let mut rng = gen::rng(7);
    let h = gen::random_class_with_ldim(&mut rng, 5, 24, 2..=2, 10_000).unwrap();
    let mut g = c.benchmark_group("ldim_by_trees");
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| ldim_by_trees(black_box(&h), 3, exec))
        });
    }
    g.finish();
}

fn worst_case(c: &mut Criterion) {
    let mut rng = gen::rng(11);
    let h = gen::random_class(&mut rng, 4, 10).unwrap();
    let l = soa(&h).unwrap();
    let mut g = c.benchmark_group("worst_case_mistakes");
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| worst_case_mistakes(&l, black_box(&h), 4, 1_000_000, exec))
        });
    }
    g.finish();
}

fn fooling(c: &mut Criterion) {
    let learners: Vec<Box<dyn Learner>> = vec![
        Box::new(ConstantLearner::new(false)),
        Box::new(ConstantLearner::new(true)),
        Box::new(MajorityLearner),
        Box::new(SeededLearner::new(3)),
    ];
    let mut g = c.benchmark_group("fool_many");
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| fool_many_with(black_box(&learners), 26, 5, 5, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, trees, worst_case, fooling);
criterion_main!(benches);
