//! Sequence-form machinery against brute-force oracles.

mod common;

use common::*;
use efg_core::game::{build_kuhn, build_leduc, build_liars_dice, parse_game, Player};
use efg_core::seq::{
    average_plans, balanced_policy, behavioral_from_plan, kappa, realization_plan,
    BehavioralPolicy,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn kappa_recursion_equals_brute_force_on_small_games() {
    let pennies = parse_game(MATCHING_PENNIES).unwrap();
    let games = vec![
        ("pennies", pennies),
        ("two-level", two_level_toy()),
        ("chance", chance_interleaved_toy()),
        ("chain", chain_toy()),
        ("kuhn", build_kuhn()),
        ("liars-1-2", build_liars_dice(1, 2).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (name, game) in &games {
        for player in Player::BOTH {
            if game.infosets(player).is_empty() {
                continue;
            }
            let mut policies = vec![
                BehavioralPolicy::uniform(game, player),
                balanced_policy(game, player),
            ];
            policies.push(random_positive_policy(game, player, &mut rng));
            policies.push(random_positive_policy(game, player, &mut rng));
            for policy in &policies {
                let recursive = kappa(game, policy, player).unwrap().total;
                let brute = kappa_brute_force(game, policy, player);
                assert_close(recursive, brute, 1e-9 * brute.max(1.0));

                // exact-rational check of the same pair of routes
                let recursive_exact = kappa_recursive_rational(game, policy, player);
                let brute_exact = kappa_brute_force_rational(game, policy, player);
                assert_eq!(
                    recursive_exact, brute_exact,
                    "exact kappa mismatch on {name} for {player}"
                );
            }
        }
    }
}

#[test]
fn kappa_dominates_the_action_count_with_balanced_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for game in [
        build_kuhn(),
        build_leduc(),
        build_liars_dice(1, 3).unwrap(),
        build_liars_dice(1, 6).unwrap(),
    ] {
        for player in Player::BOTH {
            let a_total = game.seq_count(player) as f64;
            let balanced = balanced_policy(&game, player);
            let report = kappa(&game, &balanced, player).unwrap();
            assert_close(report.total, a_total, 1e-9 * a_total);
            for _ in 0..3 {
                let random = random_positive_policy(&game, player, &mut rng);
                let total = kappa(&game, &random, player).unwrap().total;
                assert!(
                    total >= a_total - 1e-9 * a_total,
                    "kappa {total} below {a_total} on {}",
                    game.name()
                );
            }
        }
    }
}

#[test]
fn leduc_round_trip_over_random_positive_policies() {
    let game = build_leduc();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for player in Player::BOTH {
        for _ in 0..100 {
            let policy = random_positive_policy(&game, player, &mut rng);
            let plan = realization_plan(&game, &policy).unwrap();
            plan.check_flow(&game, 1e-12).unwrap();
            let back = behavioral_from_plan(&game, &plan).unwrap();
            for x in game.infosets(player) {
                for pos in 0..x.num_actions() {
                    assert_close(back.prob(x.id, pos), policy.prob(x.id, pos), 1e-10);
                }
            }
        }
    }
}

#[test]
fn plan_average_is_linear_in_value() {
    // The value of the averaged plan against a fixed opponent equals the
    // mean of the per-plan values.
    let game = build_kuhn();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let opponent = random_positive_policy(&game, Player::Max, &mut rng);
    let loss = efg_core::eval::adversarial_loss_vector(&game, &opponent, Player::Min);

    let t = 50;
    let mut sum = vec![0.0; game.seq_count(Player::Min)];
    let mut per_round_values = Vec::new();
    for _ in 0..t {
        let policy = random_positive_policy(&game, Player::Min, &mut rng);
        let plan = realization_plan(&game, &policy).unwrap();
        for (s, v) in sum.iter_mut().zip(plan.values()) {
            *s += v;
        }
        per_round_values.push(loss.value_against(plan.values()));
    }
    let avg = average_plans(Player::Min, &sum, t as u64).unwrap();
    avg.check_flow(&game, 1e-12).unwrap();
    let mean: f64 = per_round_values.iter().sum::<f64>() / t as f64;
    assert_close(loss.value_against(avg.values()), mean, 1e-9);
}
