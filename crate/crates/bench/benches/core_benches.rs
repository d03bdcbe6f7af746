use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use efg_core::eval::{adversarial_loss_vector, best_response_value, exploitability};
use efg_core::game::{build_kuhn, build_leduc, build_liars_dice, sample_episode, Player};
use efg_core::harness::{run_selfplay_on, ExperimentConfig, GameSelect};
use efg_core::learner::{theorem4_eta, Learner, RateSchedule};
use efg_core::omd::{stabilized_simplex_update, SimplexPoint, StabilizedStep};
use efg_core::seq::{balanced_policy, kappa, realization_plan, BehavioralPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_game_construction(c: &mut Criterion) {
    c.bench_function("build_kuhn", |b| b.iter(|| black_box(build_kuhn())));
    c.bench_function("build_leduc", |b| b.iter(|| black_box(build_leduc())));
    c.bench_function("build_liars_dice_1_4", |b| {
        b.iter(|| black_box(build_liars_dice(1, 4).unwrap()))
    });
}

fn bench_kappa(c: &mut Criterion) {
    let leduc = build_leduc();
    let balanced = balanced_policy(&leduc, Player::Min);
    c.bench_function("kappa_leduc_balanced", |b| {
        b.iter(|| black_box(kappa(&leduc, &balanced, Player::Min).unwrap().total))
    });
    c.bench_function("realization_plan_leduc", |b| {
        b.iter(|| black_box(realization_plan(&leduc, &balanced).unwrap()))
    });
}

fn bench_stabilized_update(c: &mut Criterion) {
    let step = StabilizedStep::new(
        vec![1.3, 0.0, 0.2, 0.0],
        SimplexPoint::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap(),
        SimplexPoint::uniform(4),
        2.0,
        2.5,
    )
    .unwrap();
    c.bench_function("stabilized_simplex_update_k4", |b| {
        b.iter(|| black_box(stabilized_simplex_update(black_box(&step))))
    });
}

fn bench_evaluation(c: &mut Criterion) {
    let leduc = build_leduc();
    let min = BehavioralPolicy::uniform(&leduc, Player::Min);
    let max = BehavioralPolicy::uniform(&leduc, Player::Max);
    c.bench_function("adversarial_loss_vector_leduc", |b| {
        b.iter(|| black_box(adversarial_loss_vector(&leduc, &max, Player::Min)))
    });
    c.bench_function("best_response_leduc", |b| {
        b.iter(|| black_box(best_response_value(&leduc, &max, Player::Min).value))
    });
    c.bench_function("exploitability_leduc", |b| {
        b.iter(|| black_box(exploitability(&leduc, &min, &max)))
    });
}

fn bench_episode_and_update(c: &mut Criterion) {
    let kuhn = build_kuhn();
    let sampling = balanced_policy(&kuhn, Player::Min);
    let max_policy = BehavioralPolicy::uniform(&kuhn, Player::Max);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("sample_episode_kuhn", |b| {
        b.iter(|| black_box(sample_episode(&kuhn, &sampling, &max_policy, &mut rng).unwrap()))
    });

    let eta = theorem4_eta(&kuhn, &sampling, 10_000, Player::Min).unwrap();
    let schedule = RateSchedule::theorem4(&kuhn, &sampling, Player::Min, eta).unwrap();
    let learner = Learner::new(
        &kuhn,
        Player::Min,
        sampling.clone(),
        BehavioralPolicy::uniform(&kuhn, Player::Min),
        schedule,
    )
    .unwrap();
    let trajectory = sample_episode(&kuhn, &sampling, &max_policy, &mut rng).unwrap();
    c.bench_function("learner_observe_and_update_kuhn", |b| {
        b.iter_batched(
            || learner.clone(),
            |mut l| {
                l.observe_and_update(&kuhn, &trajectory).unwrap();
                black_box(l.round())
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_selfplay(c: &mut Criterion) {
    let kuhn = build_kuhn();
    let mut config = ExperimentConfig::new(GameSelect::Kuhn);
    config.rounds = 1000;
    config.checkpoints = 1;
    config.zero_seconds = true;
    c.bench_function("selfplay_kuhn_1000_rounds", |b| {
        b.iter(|| black_box(run_selfplay_on(&kuhn, &config).unwrap().final_exploitability))
    });
}

criterion_group!(
    benches,
    bench_game_construction,
    bench_kappa,
    bench_stabilized_update,
    bench_evaluation,
    bench_episode_and_update,
    bench_selfplay
);
criterion_main!(benches);
