//! Experiment driver: fixed-sampling self-play runs, learning-rate grid
//! search, run logging and file outputs.
//!
//! One round consumes exactly two episodes: the min player observes an
//! episode played by (its sampling policy, the max player's current policy),
//! the max player observes one played by (the min player's current policy,
//! its sampling policy); both episodes are drawn before either learner
//! updates.
//!
//! Randomness is derived from one master seed through ChaCha streams: the
//! episode at round `t` (1-based) for player `p` uses stream
//! `2 * (t - 1) + p`. Grid-search cells reseed from the master seed mixed
//! with the cell's learning rate, so cells are independent of grid order.

mod config;
mod outputs;
mod policy_io;

pub use config::{
    ConfigDraft, EtaSelect, ExperimentConfig, GameSelect, InitSelect, SamplingSelect,
    ScheduleSelect,
};
pub use outputs::{emit_outputs, parse_curve_csv, render_curve_svg, CURVE_CSV_HEADER};
pub use policy_io::{load_policy, parse_policy_str, policy_to_string, write_policy_file};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::eval::{
    adversarial_loss_vector, estimated_loss, exploitability, theorem4_regret_bound,
    RegretAccumulator, RegretAudit,
};
use crate::game::{sample_episode, GameSpec, Player};
use crate::learner::{theorem4_eta, Learner, RateSchedule};
use crate::seq::{balanced_policy, realization_plan, BehavioralPolicy};

/// One logged checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointRow {
    pub round: u64,
    /// Total episodes consumed so far; always twice the round.
    pub episodes: u64,
    /// Exact exploitability of the current time-averaged profile.
    pub exploitability: f64,
    pub regret_min_est: f64,
    pub regret_max_est: f64,
    pub seconds: f64,
}

/// Bound audits of a completed run (exact-loss accounting enabled).
#[derive(Clone, Debug)]
pub struct RunAudits {
    /// Estimation-gap audit per player, on the pre-update round pairs.
    pub estimation_min: RegretAudit,
    pub estimation_max: RegretAudit,
    /// Constant-schedule regret bounds evaluated at the run's horizon.
    pub regret_bound_min: f64,
    pub regret_bound_max: f64,
    /// Averaged-profile identity, on the post-update round pairs: the
    /// exploitability of the averages, the regret sum divided by rounds,
    /// and their absolute gap.
    pub avg_exploitability: f64,
    pub regret_sum_over_rounds: f64,
    pub identity_gap: f64,
    /// True regrets on the post-update pairs backing the identity.
    pub post_true_regret_min: f64,
    pub post_true_regret_max: f64,
}

/// Everything a self-play run produces.
#[derive(Clone, Debug)]
pub struct RunLog {
    pub rows: Vec<CheckpointRow>,
    pub config_echo: String,
    pub seed: u64,
    pub version: String,
    pub final_avg_min: BehavioralPolicy,
    pub final_avg_max: BehavioralPolicy,
    pub final_exploitability: f64,
    pub audits: Option<RunAudits>,
}

fn episode_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Log-spaced checkpoint rounds, deduplicated, always ending at `total`.
pub fn checkpoint_rounds(total: u64, count: u64) -> Vec<u64> {
    let count = count.max(1);
    let mut rounds = Vec::new();
    for i in 1..=count {
        let r = (total as f64)
            .powf(i as f64 / count as f64)
            .round()
            .clamp(1.0, total as f64) as u64;
        if rounds.last() != Some(&r) {
            rounds.push(r);
        }
    }
    if rounds.last() != Some(&total) {
        rounds.push(total);
    }
    rounds
}

fn resolve_sampling(
    game: &GameSpec,
    select: &SamplingSelect,
    player: Player,
) -> Result<BehavioralPolicy> {
    match select {
        SamplingSelect::Balanced => Ok(balanced_policy(game, player)),
        SamplingSelect::Uniform => Ok(BehavioralPolicy::uniform(game, player)),
        SamplingSelect::File(path) => load_policy(game, player, path),
    }
}

fn resolve_initial(
    game: &GameSpec,
    select: &InitSelect,
    player: Player,
) -> Result<BehavioralPolicy> {
    match select {
        InitSelect::Uniform => Ok(BehavioralPolicy::uniform(game, player)),
        InitSelect::File(path) => load_policy(game, player, path),
    }
}

fn build_learner(
    game: &GameSpec,
    config: &ExperimentConfig,
    player: Player,
) -> Result<Learner> {
    let pi = player.index();
    let sampling = resolve_sampling(game, &config.sampling[pi], player)?;
    let initial = resolve_initial(game, &config.initial[pi], player)?;
    let eta = match config.eta[pi] {
        EtaSelect::Fixed(eta) => eta,
        EtaSelect::Auto => theorem4_eta(game, &sampling, config.rounds, player)?,
    };
    let schedule = match config.schedule[pi] {
        ScheduleSelect::Theorem4 => RateSchedule::theorem4(game, &sampling, player, eta)?,
        ScheduleSelect::Count => RateSchedule::CountAdaptive { eta },
        ScheduleSelect::Loss => RateSchedule::LossAdaptive { eta },
    };
    Learner::new(game, player, sampling, initial, schedule)
}

/// Runs the full self-play protocol described by the config.
pub fn run_selfplay(config: &ExperimentConfig) -> Result<RunLog> {
    let game = config.game.build()?;
    run_selfplay_on(&game, config)
}

/// Same as [`run_selfplay`] on an already-built game (grid search reuses it).
pub fn run_selfplay_on(game: &GameSpec, config: &ExperimentConfig) -> Result<RunLog> {
    config.validate()?;
    let mut min = build_learner(game, config, Player::Min)?;
    let mut max = build_learner(game, config, Player::Max)?;
    let sampling_plan_min = realization_plan(game, min.sampling_policy())?;
    let sampling_plan_max = realization_plan(game, max.sampling_policy())?;

    let mut est_min = RegretAccumulator::new(game, Player::Min);
    let mut est_max = RegretAccumulator::new(game, Player::Max);
    // Exact accounting over the pre-update pairs (estimation audits) and the
    // post-update pairs (the averaged-profile identity).
    let mut pre_min = RegretAccumulator::new(game, Player::Min);
    let mut pre_max = RegretAccumulator::new(game, Player::Max);
    let mut post_min = RegretAccumulator::new(game, Player::Min);
    let mut post_max = RegretAccumulator::new(game, Player::Max);

    let checkpoints = checkpoint_rounds(config.rounds, config.checkpoints);
    let mut next_checkpoint = 0;
    let mut rows = Vec::with_capacity(checkpoints.len());
    let started = Instant::now();

    for t in 1..=config.rounds {
        let stream = 2 * (t - 1);
        let mut traj_min = {
            let mut rng = episode_rng(config.seed, stream);
            sample_episode(game, min.sampling_policy(), max.current_policy(), &mut rng)
                .map_err(|e| round_context(e, t))?
        };
        traj_min.seed = Some(stream);
        let mut traj_max = {
            let mut rng = episode_rng(config.seed, stream + 1);
            sample_episode(game, min.current_policy(), max.sampling_policy(), &mut rng)
                .map_err(|e| round_context(e, t))?
        };
        traj_max.seed = Some(stream + 1);

        let est_loss_min = estimated_loss(game, Player::Min, &traj_min, &sampling_plan_min)
            .map_err(|e| round_context(e, t))?;
        est_min.advance_round();
        est_min.add_estimated(&est_loss_min, min.current_plan_values());
        let est_loss_max = estimated_loss(game, Player::Max, &traj_max, &sampling_plan_max)
            .map_err(|e| round_context(e, t))?;
        est_max.advance_round();
        est_max.add_estimated(&est_loss_max, max.current_plan_values());

        if config.audit_exact {
            let loss_min = adversarial_loss_vector(game, max.current_policy(), Player::Min);
            pre_min.advance_round();
            pre_min.add_exact(&loss_min, min.current_plan_values());
            pre_min.add_estimated(&est_loss_min, min.current_plan_values());
            let loss_max = adversarial_loss_vector(game, min.current_policy(), Player::Max);
            pre_max.advance_round();
            pre_max.add_exact(&loss_max, max.current_plan_values());
            pre_max.add_estimated(&est_loss_max, max.current_plan_values());
        }

        min.observe_and_update(game, &traj_min)
            .map_err(|e| round_context(e, t))?;
        max.observe_and_update(game, &traj_max)
            .map_err(|e| round_context(e, t))?;

        if config.audit_exact {
            let loss_min = adversarial_loss_vector(game, max.current_policy(), Player::Min);
            post_min.advance_round();
            post_min.add_exact(&loss_min, min.current_plan_values());
            let loss_max = adversarial_loss_vector(game, min.current_policy(), Player::Max);
            post_max.advance_round();
            post_max.add_exact(&loss_max, max.current_plan_values());
        }

        if next_checkpoint < checkpoints.len() && checkpoints[next_checkpoint] == t {
            next_checkpoint += 1;
            let avg_min = min.average_policy(game).map_err(|e| round_context(e, t))?;
            let avg_max = max.average_policy(game).map_err(|e| round_context(e, t))?;
            let seconds = if config.zero_seconds {
                0.0
            } else {
                started.elapsed().as_secs_f64()
            };
            rows.push(CheckpointRow {
                round: t,
                episodes: 2 * t,
                exploitability: exploitability(game, &avg_min, &avg_max),
                regret_min_est: est_min.estimated_regret(game).unwrap_or(0.0),
                regret_max_est: est_max.estimated_regret(game).unwrap_or(0.0),
                seconds,
            });
        }
    }

    let final_avg_min = min.average_policy(game)?;
    let final_avg_max = max.average_policy(game)?;
    let final_exploitability = rows
        .last()
        .map(|r| r.exploitability)
        .expect("at least one checkpoint");

    let audits = if config.audit_exact {
        // The estimation audit pairs each round's plan with the episode that
        // estimated the same round's loss vector.
        let estimation_min = pre_min.finish(game, min.sampling_policy(), config.delta)?;
        let estimation_max = pre_max.finish(game, max.sampling_policy(), config.delta)?;
        let regret_bound_min = theorem4_regret_bound(
            game,
            Player::Min,
            estimation_min.kappa_total,
            config.delta,
            config.rounds,
        );
        let regret_bound_max = theorem4_regret_bound(
            game,
            Player::Max,
            estimation_max.kappa_total,
            config.delta,
            config.rounds,
        );
        let post_true_regret_min = post_min.true_regret(game).unwrap_or(0.0);
        let post_true_regret_max = post_max.true_regret(game).unwrap_or(0.0);
        let avg_exploitability = exploitability(game, &final_avg_min, &final_avg_max);
        let regret_sum_over_rounds =
            (post_true_regret_min + post_true_regret_max) / config.rounds as f64;
        Some(RunAudits {
            estimation_min,
            estimation_max,
            regret_bound_min,
            regret_bound_max,
            avg_exploitability,
            regret_sum_over_rounds,
            identity_gap: (avg_exploitability - regret_sum_over_rounds).abs(),
            post_true_regret_min,
            post_true_regret_max,
        })
    } else {
        None
    };

    Ok(RunLog {
        rows,
        config_echo: config.echo(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        final_avg_min,
        final_avg_max,
        final_exploitability,
        audits,
    })
}

fn round_context(e: Error, round: u64) -> Error {
    match e {
        Error::Config(msg) => Error::Config(format!("round {round}: {msg}")),
        other => Error::Config(format!("round {round}: {other}")),
    }
}

/// One grid-search cell.
#[derive(Clone, Debug)]
pub struct GridRow {
    pub eta: f64,
    pub seed: u64,
    pub final_exploitability: f64,
}

#[derive(Clone, Debug)]
pub struct GridSearchResult {
    pub rows: Vec<GridRow>,
    pub best_eta: f64,
}

/// Runs one self-play per grid point with a seed derived from the master
/// seed and the cell's rate (independent of grid order), and reports the
/// final exploitabilities with the argmin rate.
pub fn grid_search(base: &ExperimentConfig, eta_grid: &[f64]) -> Result<GridSearchResult> {
    if eta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let game = base.game.build()?;
    let mut rows = Vec::with_capacity(eta_grid.len());
    for &eta in eta_grid {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::Config(format!("grid rate {eta} must be positive")));
        }
        let mut config = base.clone();
        config.eta = [EtaSelect::Fixed(eta), EtaSelect::Fixed(eta)];
        config.seed = splitmix64(base.seed ^ eta.to_bits());
        config.out_dir = None;
        let log = run_selfplay_on(&game, &config)?;
        rows.push(GridRow {
            eta,
            seed: config.seed,
            final_exploitability: log.final_exploitability,
        });
    }
    let best = rows
        .iter()
        .min_by(|a, b| {
            a.final_exploitability
                .partial_cmp(&b.final_exploitability)
                .unwrap()
                .then(a.eta.partial_cmp(&b.eta).unwrap())
        })
        .unwrap();
    Ok(GridSearchResult {
        best_eta: best.eta,
        rows,
    })
}

/// SplitMix64 finalizer; used to derive independent cell seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}
