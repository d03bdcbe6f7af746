//! Exact game evaluation: expected values, adversarial loss vectors, best
//! responses, exploitability, importance-sampled loss estimates and the
//! regret audits built from them.
//!
//! Everything here works in "own loss" terms: the min player pays the
//! terminal loss, the max player pays one minus it, and each player's best
//! response minimizes its own adversarial loss vector.

use crate::error::{Error, Result};
use crate::game::{GameSpec, NodeKind, Player, Trajectory};
use crate::seq::{kappa, BehavioralPolicy, RealizationPlan};

/// Per-sequence losses absorbing chance and the opponent, making the
/// player's expected loss linear in its realization plan.
///
/// `offset` collects the loss mass of paths on which the player never acts;
/// it is zero on the built-in games and keeps the chain rule exact on
/// arbitrary loaded games.
#[derive(Clone, Debug)]
pub struct AdversarialLossVector {
    pub owner: Player,
    pub values: Vec<f64>,
    pub offset: f64,
}

impl AdversarialLossVector {
    pub fn zeros(game: &GameSpec, owner: Player) -> Self {
        AdversarialLossVector {
            owner,
            values: vec![0.0; game.seq_count(owner)],
            offset: 0.0,
        }
    }

    /// The player's expected loss under a plan: `offset + <values, plan>`.
    pub fn value_against(&self, plan_values: &[f64]) -> f64 {
        self.offset
            + self
                .values
                .iter()
                .zip(plan_values)
                .map(|(&l, &p)| l * p)
                .sum::<f64>()
    }
}

/// Exact expected min-player loss under a policy pair, by one traversal
/// accumulating probability-weighted terminal losses.
pub fn expected_value(
    game: &GameSpec,
    min_policy: &BehavioralPolicy,
    max_policy: &BehavioralPolicy,
) -> f64 {
    let mut total = 0.0;
    let mut stack = vec![(game.root(), 1.0f64)];
    while let Some((node, reach)) = stack.pop() {
        if reach == 0.0 {
            continue;
        }
        match &game.node(node).kind {
            NodeKind::Terminal { loss } => total += reach * loss,
            NodeKind::Chance { outcomes } => {
                for &(child, p) in outcomes {
                    stack.push((child, reach * p));
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
                    stack.push((child, reach * policy.prob(*infoset, pos)));
                }
            }
        }
    }
    total
}

/// One traversal accumulating, per own sequence, the chance-and-opponent
/// probability mass times the own loss attributed at the player's last
/// decision before each terminal.
pub fn adversarial_loss_vector(
    game: &GameSpec,
    opponent_policy: &BehavioralPolicy,
    player: Player,
) -> AdversarialLossVector {
    let mut out = AdversarialLossVector::zeros(game, player);
    // (node, chance-and-opponent reach, last own sequence index)
    let mut stack: Vec<(usize, f64, Option<usize>)> = vec![(game.root(), 1.0, None)];
    while let Some((node, reach, last)) = stack.pop() {
        if reach == 0.0 {
            continue;
        }
        match &game.node(node).kind {
            NodeKind::Terminal { loss } => {
                let own = match player {
                    Player::Min => *loss,
                    Player::Max => 1.0 - *loss,
                };
                match last {
                    Some(seq) => out.values[seq] += reach * own,
                    None => out.offset += reach * own,
                }
            }
            NodeKind::Chance { outcomes } => {
                for &(child, p) in outcomes {
                    stack.push((child, reach * p, last));
                }
            }
            NodeKind::Decision {
                player: acting,
                infoset,
                edges,
            } => {
                if *acting == player {
                    for (pos, &(_, child)) in edges.iter().enumerate() {
                        let seq = game.seq_index(player, *infoset, pos);
                        stack.push((child, reach, Some(seq)));
                    }
                } else {
                    for (pos, &(_, child)) in edges.iter().enumerate() {
                        stack.push((child, reach * opponent_policy.prob(*infoset, pos), last));
                    }
                }
            }
        }
    }
    out
}

/// A deterministic policy attaining the best-response value.
#[derive(Clone, Debug)]
pub struct BestResponse {
    /// Minimal own loss against the fixed opponent.
    pub value: f64,
    pub policy: BehavioralPolicy,
}

/// Leaves-first dynamic programming on the player's infoset tree with the
/// adversarial loss vector as edge weights. Exact because the objective is
/// linear in the realization plan.
pub fn best_response_to_loss(
    game: &GameSpec,
    player: Player,
    loss: &AdversarialLossVector,
) -> BestResponse {
    let infosets = game.infosets(player);
    let mut dp = vec![0.0; infosets.len()];
    let mut probs: Vec<Vec<f64>> = Vec::with_capacity(infosets.len());
    probs.resize(infosets.len(), Vec::new());
    for id in (0..infosets.len()).rev() {
        let x = &infosets[id];
        let mut best = f64::INFINITY;
        let mut best_pos = 0;
        for pos in 0..x.num_actions() {
            let mut cost = loss.values[x.seq_index(pos)];
            for &child in &x.children[pos] {
                cost += dp[child];
            }
            if cost < best {
                best = cost;
                best_pos = pos;
            }
        }
        dp[id] = best;
        let mut dist = vec![0.0; x.num_actions()];
        dist[best_pos] = 1.0;
        probs[id] = dist;
    }
    let value = loss.offset
        + game
            .root_infosets(player)
            .iter()
            .map(|&id| dp[id])
            .sum::<f64>();
    BestResponse {
        value,
        policy: BehavioralPolicy::from_probs(player, probs),
    }
}

/// Best response against a fixed opponent policy: the player's minimal own
/// loss over the treeplex and one deterministic policy attaining it.
pub fn best_response_value(
    game: &GameSpec,
    opponent_policy: &BehavioralPolicy,
    player: Player,
) -> BestResponse {
    let loss = adversarial_loss_vector(game, opponent_policy, player);
    best_response_to_loss(game, player, &loss)
}

/// Exploitability gap of a profile:
/// `max over opponents of V(min_policy, .) - min over deviations of V(., max_policy)`.
/// Nonnegative, and zero exactly at a Nash profile.
pub fn exploitability(
    game: &GameSpec,
    min_policy: &BehavioralPolicy,
    max_policy: &BehavioralPolicy,
) -> f64 {
    let br_min = best_response_value(game, max_policy, Player::Min);
    let br_max = best_response_value(game, min_policy, Player::Max);
    // br_max.value is the max player's minimal own loss, i.e. 1 - max_v V.
    (1.0 - br_max.value) - br_min.value
}

/// Importance-sampling loss estimate from one episode, supported on the
/// visited own sequences.
#[derive(Clone, Debug, Default)]
pub struct SparseLoss {
    pub entries: Vec<(usize, f64)>,
}

impl SparseLoss {
    pub fn dot(&self, plan_values: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| v * plan_values[i])
            .sum()
    }

    pub fn add_into(&self, dense: &mut [f64]) {
        for &(i, v) in &self.entries {
            dense[i] += v;
        }
    }
}

/// `estimate(x, a) = 1{(x, a) visited} * step loss / sampling_plan(x, a)`.
///
/// Under the terminal-only loss convention the only nonzero entry sits on
/// the player's last visited sequence.
pub fn estimated_loss(
    game: &GameSpec,
    player: Player,
    trajectory: &Trajectory,
    sampling_plan: &RealizationPlan,
) -> Result<SparseLoss> {
    let (records, losses) = trajectory.player_view(player);
    let mut entries = Vec::with_capacity(records.len());
    for (rec, &loss) in records.iter().zip(losses) {
        let seq = game.seq_index(player, rec.infoset, rec.action_pos);
        let denom = sampling_plan.value(seq);
        if denom <= 0.0 {
            return Err(Error::ZeroSamplingProbability {
                infoset: game.infoset(player, rec.infoset).label.clone(),
            });
        }
        entries.push((seq, loss / denom));
    }
    Ok(SparseLoss { entries })
}

/// Natural-log `iota = log((A_X + 1) / delta)` of the estimation bound.
pub fn estimation_iota(game: &GameSpec, player: Player, delta: f64) -> f64 {
    ((game.seq_count(player) as f64 + 1.0) / delta).ln()
}

/// The estimation-gap bound `4 sqrt(iota * H * kappa * T)`.
pub fn theorem2_bound(
    game: &GameSpec,
    player: Player,
    kappa_total: f64,
    delta: f64,
    rounds: u64,
) -> f64 {
    let h = game.player_depth(player) as f64;
    4.0 * (estimation_iota(game, player, delta) * h * kappa_total * rounds as f64).sqrt()
}

/// The constant-rate regret bound
/// `(4 + 2 sqrt(3)) * H^(3/2) * sqrt(log(A) * iota * kappa * T)`,
/// with `iota = log(2 (A_X + 1) / delta)`.
pub fn theorem4_regret_bound(
    game: &GameSpec,
    player: Player,
    kappa_total: f64,
    delta: f64,
    rounds: u64,
) -> f64 {
    let h = game.player_depth(player) as f64;
    let log_a = (game.max_actions(player) as f64).ln();
    let iota = (2.0 * (game.seq_count(player) as f64 + 1.0) / delta).ln();
    (4.0 + 2.0 * 3.0f64.sqrt())
        * h.powf(1.5)
        * (log_a * iota * kappa_total * rounds as f64).sqrt()
}

/// Running accumulator for the regret audits: exact loss vectors and
/// importance-sampled estimates are summed round by round, the two regrets
/// are then single best-response computations over the sums.
#[derive(Clone, Debug)]
pub struct RegretAccumulator {
    player: Player,
    rounds: u64,
    exact_sum: Vec<f64>,
    exact_offset: f64,
    exact_played: f64,
    exact_rounds: u64,
    est_sum: Vec<f64>,
    est_played: f64,
    est_rounds: u64,
}

impl RegretAccumulator {
    pub fn new(game: &GameSpec, player: Player) -> Self {
        RegretAccumulator {
            player,
            rounds: 0,
            exact_sum: vec![0.0; game.seq_count(player)],
            exact_offset: 0.0,
            exact_played: 0.0,
            exact_rounds: 0,
            est_sum: vec![0.0; game.seq_count(player)],
            est_played: 0.0,
            est_rounds: 0,
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn advance_round(&mut self) {
        self.rounds += 1;
    }

    pub fn add_exact(&mut self, loss: &AdversarialLossVector, plan_values: &[f64]) {
        debug_assert_eq!(loss.owner, self.player);
        self.exact_played += loss.value_against(plan_values);
        self.exact_offset += loss.offset;
        for (s, &l) in self.exact_sum.iter_mut().zip(&loss.values) {
            *s += l;
        }
        self.exact_rounds += 1;
    }

    pub fn add_estimated(&mut self, estimate: &SparseLoss, plan_values: &[f64]) {
        self.est_played += estimate.dot(plan_values);
        estimate.add_into(&mut self.est_sum);
        self.est_rounds += 1;
    }

    /// True regret: played loss minus the best fixed plan against the
    /// summed exact loss vectors.
    pub fn true_regret(&self, game: &GameSpec) -> Option<f64> {
        if self.exact_rounds == 0 {
            return None;
        }
        let summed = AdversarialLossVector {
            owner: self.player,
            values: self.exact_sum.clone(),
            offset: self.exact_offset,
        };
        Some(self.exact_played - best_response_to_loss(game, self.player, &summed).value)
    }

    /// Estimated regret: same computation on the summed estimates.
    pub fn estimated_regret(&self, game: &GameSpec) -> Option<f64> {
        if self.est_rounds == 0 {
            return None;
        }
        let summed = AdversarialLossVector {
            owner: self.player,
            values: self.est_sum.clone(),
            offset: 0.0,
        };
        Some(self.est_played - best_response_to_loss(game, self.player, &summed).value)
    }

    pub fn finish(
        &self,
        game: &GameSpec,
        sampling_policy: &BehavioralPolicy,
        delta: f64,
    ) -> Result<RegretAudit> {
        let kappa_total = kappa(game, sampling_policy, self.player)?.total;
        let bound = theorem2_bound(game, self.player, kappa_total, delta, self.rounds);
        let true_regret = self.true_regret(game);
        let estimated_regret = self.estimated_regret(game);
        let holds = match (true_regret, estimated_regret) {
            (Some(r), Some(re)) => r <= re.max(0.0) + bound + 1e-9,
            _ => true,
        };
        Ok(RegretAudit {
            player: self.player,
            rounds: self.rounds,
            true_regret,
            estimated_regret,
            kappa_total,
            delta,
            iota: estimation_iota(game, self.player, delta),
            bound,
            holds,
        })
    }
}

/// Outcome of a regret audit over an aligned sequence of rounds.
#[derive(Clone, Debug)]
pub struct RegretAudit {
    pub player: Player,
    pub rounds: u64,
    pub true_regret: Option<f64>,
    pub estimated_regret: Option<f64>,
    pub kappa_total: f64,
    pub delta: f64,
    pub iota: f64,
    /// `4 sqrt(iota * H * kappa * T)`.
    pub bound: f64,
    /// Whether `true regret <= max(estimated regret, 0) + bound`.
    pub holds: bool,
}

/// Audits aligned per-round plans and opponent policies (plus optional
/// per-round loss estimates) against the estimation bound.
pub fn regret_audit(
    game: &GameSpec,
    player: Player,
    plans: &[RealizationPlan],
    opponent_policies: &[BehavioralPolicy],
    estimates: Option<&[SparseLoss]>,
    sampling_policy: &BehavioralPolicy,
    delta: f64,
) -> Result<RegretAudit> {
    if plans.len() != opponent_policies.len() {
        return Err(Error::LengthMismatch {
            left: plans.len(),
            right: opponent_policies.len(),
        });
    }
    if let Some(est) = estimates {
        if est.len() != plans.len() {
            return Err(Error::LengthMismatch {
                left: plans.len(),
                right: est.len(),
            });
        }
    }
    let mut acc = RegretAccumulator::new(game, player);
    for (t, (plan, opp)) in plans.iter().zip(opponent_policies).enumerate() {
        acc.advance_round();
        let loss = adversarial_loss_vector(game, opp, player);
        acc.add_exact(&loss, plan.values());
        if let Some(est) = estimates {
            acc.add_estimated(&est[t], plan.values());
        }
    }
    acc.finish(game, sampling_policy, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_kuhn, parse_game, GameBuilder};
    use crate::seq::realization_plan;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn random_policy(game: &GameSpec, player: Player, rng: &mut ChaCha8Rng) -> BehavioralPolicy {
        let mut policy = BehavioralPolicy::uniform(game, player);
        for x in game.infosets(player) {
            let raw: Vec<f64> = (0..x.num_actions())
                .map(|_| rng.random_range(0.01..1.0))
                .collect();
            let sum: f64 = raw.iter().sum();
            policy.set(x.id, raw.into_iter().map(|v| v / sum).collect());
        }
        policy
    }

    #[test]
    fn deterministic_game_value_is_the_terminal_loss() {
        let mut b = GameBuilder::new("line");
        let t0 = b.terminal(0.3);
        let t1 = b.terminal(0.9);
        let d = b.decision(Player::Max, "y", vec![(0, t0), (1, t1)]);
        let root = b.decision(Player::Min, "x", vec![(0, d)]);
        let g = b.finalize(root).unwrap();
        let min = BehavioralPolicy::uniform(&g, Player::Min);
        let mut max = BehavioralPolicy::uniform(&g, Player::Max);
        max.set(0, vec![0.0, 1.0]);
        assert_eq!(expected_value(&g, &min, &max), 0.9);
    }

    #[test]
    fn chain_rule_identity_on_kuhn() {
        let g = build_kuhn();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let min = random_policy(&g, Player::Min, &mut rng);
            let max = random_policy(&g, Player::Max, &mut rng);
            let v = expected_value(&g, &min, &max);

            let loss_min = adversarial_loss_vector(&g, &max, Player::Min);
            let plan_min = realization_plan(&g, &min).unwrap();
            assert_close(loss_min.value_against(plan_min.values()), v, 1e-12);
            assert_eq!(loss_min.offset, 0.0);

            let loss_max = adversarial_loss_vector(&g, &min, Player::Max);
            let plan_max = realization_plan(&g, &max).unwrap();
            assert_close(loss_max.value_against(plan_max.values()), 1.0 - v, 1e-12);
        }
    }

    #[test]
    fn opponent_never_acts_gives_pure_chance_weights() {
        let mut b = GameBuilder::new("solitaire");
        let t0 = b.terminal(0.2);
        let t1 = b.terminal(0.8);
        let t2 = b.terminal(0.5);
        let d = b.decision(Player::Min, "x", vec![(0, t0), (1, t1)]);
        let root = b.chance(vec![(d, 0.75), (t2, 0.25)]);
        let g = b.finalize(root).unwrap();
        let loss = adversarial_loss_vector(&g, &BehavioralPolicy::uniform(&g, Player::Max), Player::Min);
        assert_close(loss.values[0], 0.75 * 0.2, 1e-15);
        assert_close(loss.values[1], 0.75 * 0.8, 1e-15);
        // the chance-only branch has no min decision and lands in the offset
        assert_close(loss.offset, 0.25 * 0.5, 1e-15);
    }

    #[test]
    fn zero_terminal_losses_give_the_zero_vector() {
        let mut b = GameBuilder::new("zero");
        let t0 = b.terminal(0.0);
        let t1 = b.terminal(0.0);
        let root = b.decision(Player::Min, "x", vec![(0, t0), (1, t1)]);
        let g = b.finalize(root).unwrap();
        let loss = adversarial_loss_vector(&g, &BehavioralPolicy::uniform(&g, Player::Max), Player::Min);
        assert_eq!(loss.values, vec![0.0, 0.0]);
        assert_eq!(loss.offset, 0.0);
    }

    #[test]
    fn single_infoset_best_response_picks_the_argmin() {
        let mut b = GameBuilder::new("pick");
        let t0 = b.terminal(0.3);
        let t1 = b.terminal(0.7);
        let root = b.decision(Player::Min, "x", vec![(0, t0), (1, t1)]);
        let g = b.finalize(root).unwrap();
        let br = best_response_value(&g, &BehavioralPolicy::uniform(&g, Player::Max), Player::Min);
        assert_close(br.value, 0.3, 1e-15);
        assert_eq!(br.policy.infoset_probs(0).unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn best_response_never_beats_itself() {
        let g = build_kuhn();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let min = random_policy(&g, Player::Min, &mut rng);
            let max = random_policy(&g, Player::Max, &mut rng);
            let br = best_response_value(&g, &max, Player::Min);
            assert!(br.value <= expected_value(&g, &min, &max) + 1e-12);
        }
    }

    #[test]
    fn matching_pennies_uniform_profile_has_zero_exploitability() {
        let text = "\
node r player min infoset x {0:a,1:b}
node a player max infoset y {0:t00,1:t01}
node b player max infoset y {0:t10,1:t11}
node t00 terminal 0
node t01 terminal 1
node t10 terminal 1
node t11 terminal 0
";
        let g = parse_game(text).unwrap();
        let min = BehavioralPolicy::uniform(&g, Player::Min);
        let max = BehavioralPolicy::uniform(&g, Player::Max);
        assert_close(exploitability(&g, &min, &max), 0.0, 1e-12);
    }

    #[test]
    fn exploitability_is_nonnegative_on_random_profiles() {
        let g = build_kuhn();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let min = random_policy(&g, Player::Min, &mut rng);
            let max = random_policy(&g, Player::Max, &mut rng);
            assert!(exploitability(&g, &min, &max) >= -1e-12);
        }
    }

    #[test]
    fn estimated_loss_on_a_one_step_game() {
        // One min decision with two actions, uniform sampling, loss 1 on the
        // sampled action: the visited sequence carries 1 / (1/2) = 2.
        let mut b = GameBuilder::new("h1");
        let t0 = b.terminal(1.0);
        let t1 = b.terminal(1.0);
        let root = b.decision(Player::Min, "x", vec![(0, t0), (1, t1)]);
        let g = b.finalize(root).unwrap();
        let uniform = BehavioralPolicy::uniform(&g, Player::Min);
        let plan = realization_plan(&g, &uniform).unwrap();
        let traj = crate::game::sample_episode_seeded(
            &g,
            &uniform,
            &BehavioralPolicy::uniform(&g, Player::Max),
            9,
        )
        .unwrap();
        let est = estimated_loss(&g, Player::Min, &traj, &plan).unwrap();
        assert_eq!(est.entries.len(), 1);
        assert_eq!(est.entries[0].1, 2.0);

        // zero-loss episode estimates the zero vector
        let mut bz = GameBuilder::new("z");
        let tz = bz.terminal(0.0);
        let tz2 = bz.terminal(0.0);
        let rz = bz.decision(Player::Min, "x", vec![(0, tz), (1, tz2)]);
        let gz = bz.finalize(rz).unwrap();
        let uz = BehavioralPolicy::uniform(&gz, Player::Min);
        let pz = realization_plan(&gz, &uz).unwrap();
        let tj = crate::game::sample_episode_seeded(
            &gz,
            &uz,
            &BehavioralPolicy::uniform(&gz, Player::Max),
            1,
        )
        .unwrap();
        let est = estimated_loss(&gz, Player::Min, &tj, &pz).unwrap();
        assert!(est.entries.iter().all(|&(_, v)| v == 0.0));
    }

    #[test]
    fn single_round_audit_matches_the_definition() {
        let g = build_kuhn();
        let min = BehavioralPolicy::uniform(&g, Player::Min);
        let max = BehavioralPolicy::uniform(&g, Player::Max);
        let plan = realization_plan(&g, &min).unwrap();
        let audit = regret_audit(
            &g,
            Player::Min,
            &[plan],
            std::slice::from_ref(&max),
            None,
            &min,
            0.1,
        )
        .unwrap();
        let expected =
            expected_value(&g, &min, &max) - best_response_value(&g, &max, Player::Min).value;
        assert_close(audit.true_regret.unwrap(), expected, 1e-12);
    }

    #[test]
    fn constant_sequences_have_linear_regret() {
        let g = build_kuhn();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let min = random_policy(&g, Player::Min, &mut rng);
        let max = random_policy(&g, Player::Max, &mut rng);
        let plan = realization_plan(&g, &min).unwrap();
        let per_round =
            expected_value(&g, &min, &max) - best_response_value(&g, &max, Player::Min).value;
        let t = 37;
        let plans = vec![plan; t];
        let opps = vec![max; t];
        let sampling = BehavioralPolicy::uniform(&g, Player::Min);
        let audit = regret_audit(&g, Player::Min, &plans, &opps, None, &sampling, 0.1).unwrap();
        assert_close(audit.true_regret.unwrap(), t as f64 * per_round, 1e-9);
    }

    #[test]
    fn audit_rejects_misaligned_lengths() {
        let g = build_kuhn();
        let min = BehavioralPolicy::uniform(&g, Player::Min);
        let plan = realization_plan(&g, &min).unwrap();
        let err = regret_audit(&g, Player::Min, &[plan], &[], None, &min, 0.1).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }
}
