use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GameSpec, InfosetId, NodeId, NodeKind, Player};
use crate::error::{Error, Result};
use crate::seq::BehavioralPolicy;

/// One decision of one player inside an episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionRecord {
    pub infoset: InfosetId,
    pub action_pos: usize,
    /// Probability the episode policy assigned to the chosen action.
    pub prob: f64,
}

/// A sampled root-to-terminal path with per-player views.
///
/// Losses follow the terminal-only convention: every own decision carries
/// loss 0 except the last one, which carries the player's normalized terminal
/// loss (the raw loss for the min player, one minus it for the max player).
#[derive(Clone, Debug)]
pub struct Trajectory {
    records: [Vec<DecisionRecord>; 2],
    step_losses: [Vec<f64>; 2],
    pub terminal: NodeId,
    /// Min-player loss at the terminal, in [0, 1].
    pub terminal_loss: f64,
    /// Stream id the episode was drawn from, when known.
    pub seed: Option<u64>,
}

impl Trajectory {
    /// The player's own decisions in visit order, with aligned step losses.
    pub fn player_view(&self, player: Player) -> (&[DecisionRecord], &[f64]) {
        let i = player.index();
        (&self.records[i], &self.step_losses[i])
    }

    pub fn own_loss(&self, player: Player) -> f64 {
        match player {
            Player::Min => self.terminal_loss,
            Player::Max => 1.0 - self.terminal_loss,
        }
    }
}

/// Samples one episode by walking the tree from the root: chance nodes by
/// their distributions, decision nodes by the acting player's policy.
pub fn sample_episode<R: Rng>(
    game: &GameSpec,
    min_policy: &BehavioralPolicy,
    max_policy: &BehavioralPolicy,
    rng: &mut R,
) -> Result<Trajectory> {
    let mut records: [Vec<DecisionRecord>; 2] = [Vec::new(), Vec::new()];
    let mut node = game.root();
    loop {
        match &game.node(node).kind {
            NodeKind::Terminal { loss } => {
                let mut step_losses = [
                    vec![0.0; records[0].len()],
                    vec![0.0; records[1].len()],
                ];
                if let Some(last) = step_losses[0].last_mut() {
                    *last = *loss;
                }
                if let Some(last) = step_losses[1].last_mut() {
                    *last = 1.0 - *loss;
                }
                return Ok(Trajectory {
                    records,
                    step_losses,
                    terminal: node,
                    terminal_loss: *loss,
                    seed: None,
                });
            }
            NodeKind::Chance { outcomes } => {
                let draw: f64 = rng.random();
                node = pick(outcomes.iter().map(|&(c, p)| (c, p)), draw);
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
                let probs = policy.infoset_probs(*infoset).ok_or_else(|| Error::Policy {
                    infoset: game.infoset(*player, *infoset).label.clone(),
                    message: "policy does not cover this infoset".into(),
                })?;
                if probs.len() != edges.len() {
                    return Err(Error::Policy {
                        infoset: game.infoset(*player, *infoset).label.clone(),
                        message: format!(
                            "policy has {} entries for {} actions",
                            probs.len(),
                            edges.len()
                        ),
                    });
                }
                if probs.iter().any(|p| !p.is_finite()) {
                    return Err(Error::NonFinite {
                        what: format!(
                            "policy at infoset {}",
                            game.infoset(*player, *infoset).label
                        ),
                    });
                }
                let draw: f64 = rng.random();
                let pos = pick(probs.iter().copied().enumerate(), draw);
                records[player.index()].push(DecisionRecord {
                    infoset: *infoset,
                    action_pos: pos,
                    prob: probs[pos],
                });
                node = edges[pos].1;
            }
        }
    }
}

/// Seeded convenience wrapper; the trajectory records the seed it was drawn
/// from so an episode can be reproduced exactly.
pub fn sample_episode_seeded(
    game: &GameSpec,
    min_policy: &BehavioralPolicy,
    max_policy: &BehavioralPolicy,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traj = sample_episode(game, min_policy, max_policy, &mut rng)?;
    traj.seed = Some(seed);
    Ok(traj)
}

/// Cumulative-scan selection; the final bucket absorbs rounding slack.
fn pick<T: Copy>(weighted: impl Iterator<Item = (T, f64)>, draw: f64) -> T {
    let mut acc = 0.0;
    let mut last = None;
    for (item, w) in weighted {
        acc += w;
        last = Some(item);
        if draw < acc {
            return item;
        }
    }
    last.expect("picked from an empty distribution")
}
