//! Shared test oracles: brute-force enumerations kept deliberately
//! independent of the library's recursive implementations.

#![allow(dead_code)]

use efg_core::game::{GameBuilder, GameSpec, InfosetId, NodeKind, Player};
use efg_core::seq::{realization_plan, BehavioralPolicy};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Iterates every deterministic policy of the player (odometer over the
/// per-infoset action choices), invoking `f` with the choice vector.
pub fn for_each_deterministic<F: FnMut(&[usize])>(game: &GameSpec, player: Player, mut f: F) {
    let sizes: Vec<usize> = game
        .infosets(player)
        .iter()
        .map(|x| x.num_actions())
        .collect();
    let mut choice = vec![0usize; sizes.len()];
    loop {
        f(&choice);
        let mut i = 0;
        loop {
            if i == choice.len() {
                return;
            }
            choice[i] += 1;
            if choice[i] < sizes[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if choice.iter().all(|&c| c == 0) {
            return;
        }
    }
}

pub fn deterministic_policy(game: &GameSpec, player: Player, choice: &[usize]) -> BehavioralPolicy {
    let mut policy = BehavioralPolicy::uniform(game, player);
    for x in game.infosets(player) {
        let mut dist = vec![0.0; x.num_actions()];
        dist[choice[x.id]] = 1.0;
        policy.set(x.id, dist);
    }
    policy
}

/// Brute-force kappa: max over deterministic policies of the summed inverse
/// sampling-plan values along the reachable chosen sequences.
pub fn kappa_brute_force(game: &GameSpec, sampling: &BehavioralPolicy, player: Player) -> f64 {
    let plan = realization_plan(game, sampling).unwrap();
    let mut best = f64::NEG_INFINITY;
    for_each_deterministic(game, player, |choice| {
        let mut total = 0.0;
        let mut stack: Vec<InfosetId> = game.root_infosets(player).to_vec();
        while let Some(id) = stack.pop() {
            let x = game.infoset(player, id);
            let pos = choice[id];
            total += 1.0 / plan.value(x.seq_index(pos));
            stack.extend(&x.children[pos]);
        }
        best = best.max(total);
    });
    best
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

/// Exact-rational brute force over deterministic policies; every f64
/// probability is treated as the exact rational it is.
pub fn kappa_brute_force_rational(
    game: &GameSpec,
    sampling: &BehavioralPolicy,
    player: Player,
) -> BigRational {
    let mut best: Option<BigRational> = None;
    for_each_deterministic(game, player, |choice| {
        let mut total = BigRational::zero();
        // (infoset, product of inverse probabilities along its own history)
        let mut stack: Vec<(InfosetId, BigRational)> = game
            .root_infosets(player)
            .iter()
            .map(|&id| (id, BigRational::one()))
            .collect();
        while let Some((id, inv_reach)) = stack.pop() {
            let x = game.infoset(player, id);
            let pos = choice[id];
            let inv_here = inv_reach / rational(sampling.prob(id, pos));
            total += inv_here.clone();
            for &child in &x.children[pos] {
                stack.push((child, inv_here.clone()));
            }
        }
        match &best {
            Some(b) if *b >= total => {}
            _ => best = Some(total),
        }
    });
    best.expect("at least one deterministic policy")
}

/// Exact-rational mirror of the kappa recursion.
pub fn kappa_recursive_rational(
    game: &GameSpec,
    sampling: &BehavioralPolicy,
    player: Player,
) -> BigRational {
    let infosets = game.infosets(player);
    let mut per_infoset: Vec<BigRational> = vec![BigRational::zero(); infosets.len()];
    for id in (0..infosets.len()).rev() {
        let x = &infosets[id];
        let mut worst: Option<BigRational> = None;
        for pos in 0..x.num_actions() {
            let mut below = BigRational::from_integer(BigInt::from(1));
            for &child in &x.children[pos] {
                below += per_infoset[child].clone();
            }
            let candidate = below / rational(sampling.prob(id, pos));
            match &worst {
                Some(w) if *w >= candidate => {}
                _ => worst = Some(candidate),
            }
        }
        per_infoset[id] = worst.expect("infoset has actions");
    }
    let mut total = BigRational::zero();
    for &id in game.root_infosets(player) {
        total += per_infoset[id].clone();
    }
    total
}

/// Min over deterministic policies of the exact expected own loss, computed
/// by plain state-tree traversals (no sequence-form machinery).
pub fn best_response_by_enumeration(
    game: &GameSpec,
    opponent: &BehavioralPolicy,
    player: Player,
) -> f64 {
    let mut best = f64::INFINITY;
    for_each_deterministic(game, player, |choice| {
        let det = deterministic_policy(game, player, choice);
        let v = match player {
            Player::Min => efg_core::eval::expected_value(game, &det, opponent),
            Player::Max => 1.0 - efg_core::eval::expected_value(game, opponent, &det),
        };
        best = best.min(v);
    });
    best
}

/// Exact probability that each of the player's infosets is visited under a
/// policy pair, by accumulating path probabilities into infoset members.
pub fn exact_infoset_reach(
    game: &GameSpec,
    min_policy: &BehavioralPolicy,
    max_policy: &BehavioralPolicy,
    player: Player,
) -> Vec<f64> {
    let mut reach = vec![0.0; game.infosets(player).len()];
    let mut stack = vec![(game.root(), 1.0f64)];
    while let Some((node, p)) = stack.pop() {
        if p == 0.0 {
            continue;
        }
        match &game.node(node).kind {
            NodeKind::Terminal { .. } => {}
            NodeKind::Chance { outcomes } => {
                for &(child, q) in outcomes {
                    stack.push((child, p * q));
                }
            }
            NodeKind::Decision {
                player: acting,
                infoset,
                edges,
            } => {
                if *acting == player {
                    reach[*infoset] += p;
                }
                let policy = match acting {
                    Player::Min => min_policy,
                    Player::Max => max_policy,
                };
                for (pos, &(_, child)) in edges.iter().enumerate() {
                    stack.push((child, p * policy.prob(*infoset, pos)));
                }
            }
        }
    }
    reach
}

/// Exact terminal distribution under a policy pair.
pub fn exact_terminal_distribution(
    game: &GameSpec,
    min_policy: &BehavioralPolicy,
    max_policy: &BehavioralPolicy,
) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(game.root(), 1.0f64)];
    while let Some((node, p)) = stack.pop() {
        match &game.node(node).kind {
            NodeKind::Terminal { .. } => out.push((node, p)),
            NodeKind::Chance { outcomes } => {
                for &(child, q) in outcomes {
                    stack.push((child, p * q));
                }
            }
            NodeKind::Decision {
                player,
                infoset,
                edges,
            } => {
                let policy = match player {
                    Player::Min => min_policy,
                    Player::Max => max_policy,
                };
                for (pos, &(_, child)) in edges.iter().enumerate() {
                    stack.push((child, p * policy.prob(*infoset, pos)));
                }
            }
        }
    }
    out
}

/// Upper chi-square critical value by the Wilson-Hilferty cube approximation.
pub fn chi_square_critical(df: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

pub fn random_positive_policy(
    game: &GameSpec,
    player: Player,
    rng: &mut ChaCha8Rng,
) -> BehavioralPolicy {
    let mut policy = BehavioralPolicy::uniform(game, player);
    for x in game.infosets(player) {
        let raw: Vec<f64> = (0..x.num_actions())
            .map(|_| rng.random_range(0.05..1.0))
            .collect();
        let sum: f64 = raw.iter().sum();
        policy.set(x.id, raw.into_iter().map(|v| v / sum).collect());
    }
    policy
}

/// Matching pennies as a loaded file.
pub const MATCHING_PENNIES: &str = "\
node r player min infoset x {0:a,1:b}
node a player max infoset y {0:t00,1:t01}
node b player max infoset y {0:t10,1:t11}
node t00 terminal 0
node t01 terminal 1
node t10 terminal 1
node t11 terminal 0
";

/// A two-level tree whose opening action subtrees hold 3 and 1 sequences.
pub fn two_level_toy() -> GameSpec {
    let mut b = GameBuilder::new("two-level");
    let t0 = b.terminal(0.1);
    let t1 = b.terminal(0.2);
    let t2 = b.terminal(0.3);
    let t3 = b.terminal(0.4);
    let sub3 = b.decision(Player::Min, "sub3", vec![(0, t0), (1, t1), (2, t2)]);
    let sub1 = b.decision(Player::Min, "sub1", vec![(0, t3)]);
    let root = b.decision(Player::Min, "open", vec![(0, sub3), (1, sub1)]);
    b.finalize(root).unwrap()
}

/// Chance nodes interleaved between the player's decisions.
pub fn chance_interleaved_toy() -> GameSpec {
    let mut b = GameBuilder::new("chance-toy");
    let t0 = b.terminal(0.0);
    let t1 = b.terminal(1.0);
    let deep = b.decision(Player::Min, "deep", vec![(0, t0), (1, t1)]);
    let t2 = b.terminal(0.5);
    let mid_chance = b.chance(vec![(deep, 0.5), (t2, 0.5)]);
    let t3 = b.terminal(0.25);
    let t4 = b.terminal(0.75);
    let xb = b.decision(
        Player::Min,
        "xb",
        vec![(0, mid_chance), (1, t3), (2, t4)],
    );
    let t5 = b.terminal(0.6);
    let t6 = b.terminal(0.4);
    let xa = b.decision(Player::Min, "xa", vec![(0, t5), (1, t6)]);
    let root = b.chance(vec![(xa, 0.3), (xb, 0.7)]);
    b.finalize(root).unwrap()
}

/// A depth-three chain of two-action decisions.
pub fn chain_toy() -> GameSpec {
    let mut b = GameBuilder::new("chain");
    let t0 = b.terminal(0.0);
    let t1 = b.terminal(1.0);
    let x2 = b.decision(Player::Min, "x2", vec![(0, t0), (1, t1)]);
    let t2 = b.terminal(0.5);
    let x1 = b.decision(Player::Min, "x1", vec![(0, x2), (1, t2)]);
    let t3 = b.terminal(0.9);
    let x0 = b.decision(Player::Min, "x0", vec![(0, x1), (1, t3)]);
    b.finalize(x0).unwrap()
}
