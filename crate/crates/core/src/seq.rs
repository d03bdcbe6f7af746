//! Sequence-form machinery on the treeplex: realization plans, behavioral
//! conversion, plan averaging, the balanced policy and the kappa recursion.

use crate::error::{Error, Result};
use crate::game::{GameSpec, InfosetId, ParentSeq, Player, SIMPLEX_TOL};

/// A per-infoset action distribution for one player.
#[derive(Clone, Debug, PartialEq)]
pub struct BehavioralPolicy {
    owner: Player,
    probs: Vec<Vec<f64>>,
}

impl BehavioralPolicy {
    /// Uniform distribution at every infoset of the player.
    pub fn uniform(game: &GameSpec, player: Player) -> Self {
        let probs = game
            .infosets(player)
            .iter()
            .map(|x| vec![1.0 / x.num_actions() as f64; x.num_actions()])
            .collect();
        BehavioralPolicy {
            owner: player,
            probs,
        }
    }

    pub fn from_probs(player: Player, probs: Vec<Vec<f64>>) -> Self {
        BehavioralPolicy {
            owner: player,
            probs,
        }
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn num_infosets(&self) -> usize {
        self.probs.len()
    }

    pub fn infoset_probs(&self, infoset: InfosetId) -> Option<&[f64]> {
        self.probs.get(infoset).map(|v| v.as_slice())
    }

    pub fn prob(&self, infoset: InfosetId, action_pos: usize) -> f64 {
        self.probs[infoset][action_pos]
    }

    pub fn set(&mut self, infoset: InfosetId, probs: Vec<f64>) {
        self.probs[infoset] = probs;
    }

    /// Checks the simplex invariant at every infoset of the game.
    pub fn validate(&self, game: &GameSpec) -> Result<()> {
        let infosets = game.infosets(self.owner);
        if self.probs.len() != infosets.len() {
            return Err(Error::Policy {
                infoset: format!("{} infosets", infosets.len()),
                message: format!("policy covers {} infosets", self.probs.len()),
            });
        }
        for x in infosets {
            let p = &self.probs[x.id];
            if p.len() != x.num_actions() {
                return Err(Error::Policy {
                    infoset: x.label.clone(),
                    message: format!("{} entries for {} actions", p.len(), x.num_actions()),
                });
            }
            let mut sum = 0.0;
            for &v in p {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NotSimplex {
                        message: format!("entry {v} at infoset {}", x.label),
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::NotSimplex {
                    message: format!("infoset {} sums to {sum}", x.label),
                });
            }
        }
        Ok(())
    }

    /// True when every entry is strictly positive (required of sampling policies).
    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|p| p.iter().all(|&v| v > 0.0))
    }

    pub(crate) fn require_strictly_positive(&self, game: &GameSpec) -> Result<()> {
        for x in game.infosets(self.owner) {
            if self.probs[x.id].iter().any(|&v| v <= 0.0) {
                return Err(Error::ZeroSamplingProbability {
                    infoset: x.label.clone(),
                });
            }
        }
        Ok(())
    }
}

/// A sequence-form vector on the player's treeplex.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationPlan {
    owner: Player,
    values: Vec<f64>,
}

impl RealizationPlan {
    pub fn new(owner: Player, values: Vec<f64>) -> Self {
        RealizationPlan { owner, values }
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, seq_index: usize) -> f64 {
        self.values[seq_index]
    }

    /// Mass flowing into an infoset: the value of its parent sequence
    /// (one at the root).
    pub fn infoset_inflow(&self, game: &GameSpec, infoset: InfosetId) -> f64 {
        match game.infoset(self.owner, infoset).parent {
            ParentSeq::Root => 1.0,
            ParentSeq::Seq {
                infoset,
                action_pos,
            } => self.values[game.seq_index(self.owner, infoset, action_pos)],
        }
    }

    /// Total mass on an infoset's own sequences.
    pub fn infoset_mass(&self, game: &GameSpec, infoset: InfosetId) -> f64 {
        let x = game.infoset(self.owner, infoset);
        (0..x.num_actions()).map(|a| self.values[x.seq_index(a)]).sum()
    }

    /// Verifies flow conservation at every infoset within `tol`.
    pub fn check_flow(&self, game: &GameSpec, tol: f64) -> Result<()> {
        for x in game.infosets(self.owner) {
            let inflow = self.infoset_inflow(game, x.id);
            let outflow = self.infoset_mass(game, x.id);
            if (inflow - outflow).abs() > tol {
                return Err(Error::NotSimplex {
                    message: format!(
                        "flow violated at infoset {}: in {inflow}, out {outflow}",
                        x.label
                    ),
                });
            }
            for a in 0..x.num_actions() {
                let v = self.values[x.seq_index(a)];
                if !(0.0..=1.0 + tol).contains(&v) {
                    return Err(Error::NotSimplex {
                        message: format!("plan entry {v} outside [0, 1] at {}", x.label),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Computes the realization plan of a behavioral policy: the product of the
/// policy's probabilities along each sequence's unique perfect-recall history.
/// Products are accumulated in the log domain and exponentiated.
pub fn realization_plan(game: &GameSpec, policy: &BehavioralPolicy) -> Result<RealizationPlan> {
    let player = policy.owner();
    policy.validate(game)?;
    let values = log_plan(game, policy)?
        .into_iter()
        .map(f64::exp)
        .collect();
    Ok(RealizationPlan {
        owner: player,
        values,
    })
}

/// Log-domain plan: entry `(x, a)` holds the sum of log-probabilities along
/// the history of `(x, a)`. Zero-probability actions map to `-inf`.
pub(crate) fn log_plan(game: &GameSpec, policy: &BehavioralPolicy) -> Result<Vec<f64>> {
    let player = policy.owner();
    let mut logs = vec![0.0; game.seq_count(player)];
    for id in game.infoset_ids_topological(player) {
        let x = game.infoset(player, id);
        let parent_log = match x.parent {
            ParentSeq::Root => 0.0,
            ParentSeq::Seq {
                infoset,
                action_pos,
            } => logs[game.seq_index(player, infoset, action_pos)],
        };
        let probs = policy.infoset_probs(id).ok_or_else(|| Error::Policy {
            infoset: x.label.clone(),
            message: "policy does not cover this infoset".into(),
        })?;
        for (pos, &p) in probs.iter().enumerate() {
            logs[x.seq_index(pos)] = parent_log + p.ln();
        }
    }
    Ok(logs)
}

/// Recovers the behavioral policy of a flow-conserving plan:
/// `policy(a|x) = plan(x, a) / plan(x)`, uniform where `plan(x) = 0`.
pub fn behavioral_from_plan(game: &GameSpec, plan: &RealizationPlan) -> Result<BehavioralPolicy> {
    let player = plan.owner();
    let mut probs = Vec::with_capacity(game.infosets(player).len());
    for x in game.infosets(player) {
        let mass = plan.infoset_mass(game, x.id);
        let k = x.num_actions();
        if mass < 0.0 {
            return Err(Error::NotSimplex {
                message: format!("negative mass {mass} at infoset {}", x.label),
            });
        }
        let mut dist = Vec::with_capacity(k);
        if mass == 0.0 {
            dist.resize(k, 1.0 / k as f64);
        } else {
            for a in 0..k {
                let v = plan.value(x.seq_index(a));
                if v < 0.0 {
                    return Err(Error::NotSimplex {
                        message: format!("negative plan entry {v} at infoset {}", x.label),
                    });
                }
                dist.push(v / mass);
            }
        }
        probs.push(dist);
    }
    Ok(BehavioralPolicy {
        owner: player,
        probs,
    })
}

/// Divides an entrywise sum of plans by the number of plans summed.
/// Treeplex convexity makes the result a valid plan again.
pub fn average_plans(owner: Player, running_sum: &[f64], count: u64) -> Result<RealizationPlan> {
    if count == 0 {
        return Err(Error::EmptyAverage);
    }
    let values = running_sum.iter().map(|v| v / count as f64).collect();
    Ok(RealizationPlan { owner, values })
}

/// Exact integer subtree action counts.
///
/// `per_seq[(x, a)]` counts one for the sequence itself plus the actions of
/// every infoset below `(x, a)`; `per_infoset[x]` sums the counts of the
/// infoset's own sequences.
pub fn subtree_action_counts(game: &GameSpec, player: Player) -> (Vec<u64>, Vec<u64>) {
    let infosets = game.infosets(player);
    let mut per_seq = vec![0u64; game.seq_count(player)];
    let mut per_infoset = vec![0u64; infosets.len()];
    // Children carry larger ids, so one reverse sweep is leaves-first.
    for id in (0..infosets.len()).rev() {
        let x = &infosets[id];
        let mut total = 0;
        for pos in 0..x.num_actions() {
            let mut count = 1;
            for &child in &x.children[pos] {
                count += per_infoset[child];
            }
            per_seq[x.seq_index(pos)] = count;
            total += count;
        }
        per_infoset[id] = total;
    }
    (per_seq, per_infoset)
}

/// The balanced policy: plays each action proportionally to the number of
/// sequences in its subtree. Strictly positive by construction.
pub fn balanced_policy(game: &GameSpec, player: Player) -> BehavioralPolicy {
    let (per_seq, per_infoset) = subtree_action_counts(game, player);
    let probs = game
        .infosets(player)
        .iter()
        .map(|x| {
            (0..x.num_actions())
                .map(|pos| per_seq[x.seq_index(pos)] as f64 / per_infoset[x.id] as f64)
                .collect()
        })
        .collect();
    BehavioralPolicy {
        owner: player,
        probs,
    }
}

/// The worst-case realization-ratio weight of a sampling policy, with its
/// per-infoset decomposition and the exact subtree action counts it is
/// benchmarked against.
#[derive(Clone, Debug)]
pub struct KappaReport {
    pub total: f64,
    pub per_infoset: Vec<f64>,
    /// Exact counts attained by the balanced policy: per sequence and per
    /// infoset.
    pub subtree_actions_per_seq: Vec<u64>,
    pub subtree_actions_per_infoset: Vec<u64>,
}

/// Leaves-first evaluation of the recursion
/// `kappa(x) = max_a (1 + sum over children of kappa) / policy(a|x)`,
/// totaled over the depth-one infosets.
pub fn kappa(
    game: &GameSpec,
    sampling_policy: &BehavioralPolicy,
    player: Player,
) -> Result<KappaReport> {
    assert_eq!(sampling_policy.owner(), player);
    sampling_policy.validate(game)?;
    sampling_policy.require_strictly_positive(game)?;

    let infosets = game.infosets(player);
    let mut per_infoset = vec![0.0; infosets.len()];
    for id in (0..infosets.len()).rev() {
        let x = &infosets[id];
        let mut worst = f64::NEG_INFINITY;
        for pos in 0..x.num_actions() {
            let mut below = 1.0;
            for &child in &x.children[pos] {
                below += per_infoset[child];
            }
            worst = worst.max(below / sampling_policy.prob(id, pos));
        }
        per_infoset[id] = worst;
    }
    let total = game
        .root_infosets(player)
        .iter()
        .map(|&id| per_infoset[id])
        .sum();
    let (subtree_actions_per_seq, subtree_actions_per_infoset) =
        subtree_action_counts(game, player);
    Ok(KappaReport {
        total,
        per_infoset,
        subtree_actions_per_seq,
        subtree_actions_per_infoset,
    })
}
