use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tricon_bench::{fixture, ladder};
use tricon_core::emitter::{emit_model, EmitMode};
use tricon_core::kb::{derive_relations, DEFAULT_TOLERANCE};
use tricon_core::verifier::check_plan;
use tricon_core::planner::Planner;
use tricon_core::{Catalog, PlannerConfig, Strategy};

fn solve(c: &mut Criterion) {
    let (catalog, kb) = fixture();
    let planner = Planner::new(&kb);
    let mut group = c.benchmark_group("solve");
    for (label, problem) in ladder(&catalog) {
        for strategy in Strategy::ALL {
            let config = PlannerConfig { strategy, ..PlannerConfig::default() };
            group.bench_with_input(BenchmarkId::new(strategy.name(), label), &problem, |b, p| {
                b.iter(|| planner.solve(black_box(p), &config))
            });
        }
    }
    group.finish();
}

fn derive(c: &mut Criterion) {
    let catalog = Catalog::builtin();
    let mut group = c.benchmark_group("derive");
    group.sample_size(10);
    group.bench_function("probes_5", |b| b.iter(|| derive_relations(&catalog, 5, DEFAULT_TOLERANCE, black_box(1)).unwrap()));
    group.finish();
}

fn verify_and_emit(c: &mut Criterion) {
    let (catalog, kb) = fixture();
    let planner = Planner::new(&kb);
    let (_, problem) = ladder(&catalog).into_iter().find(|(l, _)| *l == "A,G,O").unwrap();
    let plan = planner.solve(&problem, &PlannerConfig::default()).plan.expect("A,G,O is solvable");
    c.bench_function("verify/A,G,O", |b| b.iter(|| check_plan(black_box(&plan), &problem, &kb, &catalog).unwrap()));
    let config = PlannerConfig { max_steps: plan.len(), ..PlannerConfig::default() };
    c.bench_function("emit/A,G,O", |b| b.iter(|| emit_model(black_box(&problem), &kb, &catalog, &config, EmitMode::Fixed).unwrap()));
}

criterion_group!(benches, solve, derive, verify_and_emit);
criterion_main!(benches);
