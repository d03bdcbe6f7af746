//! The per-infoset stabilized mirror-descent learner.
//!
//! Each observed episode is replayed backward over the player's own
//! decisions: the backed-up value `q` regularizes the step loss, the chosen
//! action's loss is importance-weighted by the sampling probability of that
//! action alone, and the visited infoset performs one stabilized simplex
//! update. Unvisited infosets keep both their policy and their learning rate.

use crate::error::{Error, Result};
use crate::game::{GameSpec, InfosetId, ParentSeq, Player, Trajectory};
use crate::omd::{stabilized_simplex_update, SimplexPoint, StabilizedStep};
use crate::seq::{
    average_plans, behavioral_from_plan, kappa, log_plan, BehavioralPolicy, RealizationPlan,
};

/// Per-infoset learning-rate schedules. Rates are stored as inverses, which
/// must never decrease over a learner's lifetime.
#[derive(Clone, Debug)]
pub enum RateSchedule {
    /// Constant rates `eta / weight(x)`; with the kappa weights of the
    /// sampling policy this is the theoretically optimal constant choice.
    Theorem4 { eta: f64, weights: Vec<f64> },
    /// `eta / sqrt(visit count)`, starting from `eta` before the first visit.
    CountAdaptive { eta: f64 },
    /// `eta / sqrt(sum of squared observed regularized losses)`, clamped to
    /// keep the inverse rate nondecreasing.
    LossAdaptive { eta: f64 },
}

impl RateSchedule {
    /// The constant schedule with per-infoset kappa weights of the given
    /// sampling policy.
    pub fn theorem4(
        game: &GameSpec,
        sampling_policy: &BehavioralPolicy,
        player: Player,
        eta: f64,
    ) -> Result<RateSchedule> {
        let report = kappa(game, sampling_policy, player)?;
        Ok(RateSchedule::Theorem4 {
            eta,
            weights: report.per_infoset,
        })
    }

    pub fn eta(&self) -> f64 {
        match self {
            RateSchedule::Theorem4 { eta, .. }
            | RateSchedule::CountAdaptive { eta }
            | RateSchedule::LossAdaptive { eta } => *eta,
        }
    }

    fn initial_inverse_rate(&self, infoset: InfosetId) -> f64 {
        match self {
            RateSchedule::Theorem4 { eta, weights } => weights[infoset] / eta,
            RateSchedule::CountAdaptive { eta } | RateSchedule::LossAdaptive { eta } => 1.0 / eta,
        }
    }

    /// New inverse rate after a visit. `visit_count` and `sq_loss_sum`
    /// already include the current visit.
    pub fn advance(
        &self,
        prev_inverse: f64,
        visit_count: u64,
        sq_loss_sum: f64,
    ) -> f64 {
        match self {
            RateSchedule::Theorem4 { .. } => prev_inverse,
            RateSchedule::CountAdaptive { eta } => {
                ((visit_count as f64).sqrt() / eta).max(prev_inverse)
            }
            RateSchedule::LossAdaptive { eta } => (sq_loss_sum.sqrt() / eta).max(prev_inverse),
        }
    }
}

/// The constant-schedule rate `sqrt(log(A) * kappa / (3 H T))` with `A` the
/// largest action count over the player's infosets and `H` the player's
/// decision depth.
pub fn theorem4_eta(
    game: &GameSpec,
    sampling_policy: &BehavioralPolicy,
    rounds: u64,
    player: Player,
) -> Result<f64> {
    if rounds == 0 {
        return Err(Error::Config("rounds must be at least 1".into()));
    }
    let a = game.max_actions(player);
    if a <= 1 {
        return Err(Error::Config(
            "degenerate game: every infoset has a single action, log(A) = 0".into(),
        ));
    }
    let h = game.player_depth(player);
    if h == 0 {
        return Err(Error::Config("player never acts".into()));
    }
    let report = kappa(game, sampling_policy, player)?;
    Ok(((a as f64).ln() * report.total / (3.0 * h as f64 * rounds as f64)).sqrt())
}

/// One player's learner state.
#[derive(Clone, Debug)]
pub struct Learner {
    player: Player,
    current: BehavioralPolicy,
    anchor: BehavioralPolicy,
    sampling: BehavioralPolicy,
    schedule: RateSchedule,
    inverse_rates: Vec<f64>,
    visit_counts: Vec<u64>,
    sq_loss_sums: Vec<f64>,
    max_regularized_loss: Vec<f64>,
    min_regularized_loss: Vec<f64>,
    /// Current realization plan, maintained incrementally in the log domain.
    log_plan: Vec<f64>,
    plan: Vec<f64>,
    plan_sum: Vec<f64>,
    rounds_completed: u64,
    round: u64,
}

impl Learner {
    pub fn new(
        game: &GameSpec,
        player: Player,
        sampling_policy: BehavioralPolicy,
        initial_policy: BehavioralPolicy,
        schedule: RateSchedule,
    ) -> Result<Self> {
        assert_eq!(sampling_policy.owner(), player);
        assert_eq!(initial_policy.owner(), player);
        sampling_policy.validate(game)?;
        sampling_policy.require_strictly_positive(game)?;
        initial_policy.validate(game)?;
        if !(schedule.eta().is_finite() && schedule.eta() > 0.0) {
            return Err(Error::Config(format!(
                "learning rate eta must be positive, got {}",
                schedule.eta()
            )));
        }
        let n = game.infosets(player).len();
        if let RateSchedule::Theorem4 { weights, .. } = &schedule {
            if weights.len() != n {
                return Err(Error::Config(format!(
                    "schedule carries {} weights for {} infosets",
                    weights.len(),
                    n
                )));
            }
            if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
                return Err(Error::Config("schedule weights must be positive".into()));
            }
        }

        let inverse_rates = (0..n).map(|x| schedule.initial_inverse_rate(x)).collect();
        let log_plan = log_plan(game, &initial_policy)?;
        let plan: Vec<f64> = log_plan.iter().map(|&l| l.exp()).collect();
        let plan_sum = vec![0.0; plan.len()];
        Ok(Learner {
            player,
            anchor: initial_policy.clone(),
            current: initial_policy,
            sampling: sampling_policy,
            schedule,
            inverse_rates,
            visit_counts: vec![0; n],
            sq_loss_sums: vec![0.0; n],
            max_regularized_loss: vec![0.0; n],
            min_regularized_loss: vec![0.0; n],
            log_plan,
            plan,
            plan_sum,
            rounds_completed: 0,
            round: 1,
        })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    /// Current interaction policy (the round-`t` policy).
    pub fn current_policy(&self) -> &BehavioralPolicy {
        &self.current
    }

    pub fn sampling_policy(&self) -> &BehavioralPolicy {
        &self.sampling
    }

    /// Realization-plan values of the current policy.
    pub fn current_plan_values(&self) -> &[f64] {
        &self.plan
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn rounds_completed(&self) -> u64 {
        self.rounds_completed
    }

    pub fn inverse_rates(&self) -> &[f64] {
        &self.inverse_rates
    }

    pub fn visit_counts(&self) -> &[u64] {
        &self.visit_counts
    }

    /// Largest regularized loss observed at each infoset so far.
    pub fn max_regularized_loss(&self) -> &[f64] {
        &self.max_regularized_loss
    }

    /// Smallest regularized loss observed at each infoset (zero when the
    /// infoset was never visited).
    pub fn min_regularized_loss(&self) -> &[f64] {
        &self.min_regularized_loss
    }

    /// Replays the episode backward over the player's own decisions and
    /// applies one stabilized update per visited infoset.
    pub fn observe_and_update(&mut self, game: &GameSpec, trajectory: &Trajectory) -> Result<()> {
        let (records, losses) = trajectory.player_view(self.player);
        for rec in records {
            let expected = self.sampling.prob(rec.infoset, rec.action_pos);
            if (rec.prob - expected).abs() > 1e-12 {
                return Err(Error::TrajectoryMismatch {
                    infoset: game.infoset(self.player, rec.infoset).label.clone(),
                });
            }
        }

        let mut backed_up = 0.0;
        for (rec, &loss) in records.iter().zip(losses).rev() {
            let x = rec.infoset;
            let k = game.infoset(self.player, x).num_actions();
            let raw = (loss + backed_up) / self.sampling.prob(x, rec.action_pos);
            let mut step_loss = vec![0.0; k];
            step_loss[rec.action_pos] = raw;

            self.visit_counts[x] += 1;
            self.sq_loss_sums[x] += raw * raw;
            if raw > self.max_regularized_loss[x] {
                self.max_regularized_loss[x] = raw;
            }
            if raw < self.min_regularized_loss[x] {
                self.min_regularized_loss[x] = raw;
            }
            let new_inverse =
                self.schedule
                    .advance(self.inverse_rates[x], self.visit_counts[x], self.sq_loss_sums[x]);

            let step = StabilizedStep::new(
                step_loss,
                SimplexPoint::new(self.current.infoset_probs(x).unwrap().to_vec())?,
                SimplexPoint::new(self.anchor.infoset_probs(x).unwrap().to_vec())?,
                self.inverse_rates[x],
                new_inverse,
            )?;
            let (point, q) = stabilized_simplex_update(&step);
            self.current.set(x, point.into_vec());
            self.inverse_rates[x] = new_inverse;
            // Nonnegative losses make the step objective nonnegative; guard
            // the backed-up value against sub-epsilon negative drift.
            backed_up = q.max(0.0);
        }

        if let Some(first) = records.first() {
            self.rebuild_plan_subtree(game, first.infoset);
        }
        for (sum, &p) in self.plan_sum.iter_mut().zip(&self.plan) {
            *sum += p;
        }
        self.round += 1;
        self.rounds_completed += 1;
        Ok(())
    }

    /// Recomputes plan entries in the subtree of the first visited infoset.
    /// Entries equal the log-sum of current probabilities along each history,
    /// exactly as a full recomputation would produce them.
    fn rebuild_plan_subtree(&mut self, game: &GameSpec, root: InfosetId) {
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let x = game.infoset(self.player, id);
            let parent_log = match x.parent {
                ParentSeq::Root => 0.0,
                ParentSeq::Seq {
                    infoset,
                    action_pos,
                } => self.log_plan[game.seq_index(self.player, infoset, action_pos)],
            };
            for pos in 0..x.num_actions() {
                let idx = x.seq_index(pos);
                self.log_plan[idx] = parent_log + self.current.prob(id, pos).ln();
                self.plan[idx] = self.log_plan[idx].exp();
                stack.extend(&x.children[pos]);
            }
        }
    }

    /// Plan-space running sum divided by the number of completed rounds.
    pub fn average_plan(&self) -> Result<RealizationPlan> {
        average_plans(self.player, &self.plan_sum, self.rounds_completed)
    }

    /// The time-averaged policy: the averaged plan converted to behavioral
    /// form. Requires at least one completed round.
    pub fn average_policy(&self, game: &GameSpec) -> Result<BehavioralPolicy> {
        behavioral_from_plan(game, &self.average_plan()?)
    }
}
