//! Learning near-optimal strategies in zero-sum imperfect-information
//! extensive-form games from trajectory feedback.
//!
//! The crate implements a fixed-sampling self-play protocol around a
//! per-infoset dual-stabilized mirror-descent learner with regularized
//! losses, together with the exact-evaluation machinery (best responses,
//! exploitability, adversarial loss vectors) and the regret audits used to
//! check the learner against its own guarantees.
//!
//! Module map:
//! - [`game`]: explicit game trees, the three benchmark games, a plain-text
//!   game format, and episode sampling.
//! - [`seq`]: realization plans on the treeplex, plan averaging, the
//!   balanced policy and the kappa recursion.
//! - [`omd`]: the stabilized simplex update in closed form, its numerical
//!   oracle, and a sequential runner with a regret audit.
//! - [`learner`]: the per-infoset learner with its three rate schedules.
//! - [`eval`]: exact values, best responses, exploitability, loss estimates
//!   and regret audits.
//! - [`harness`]: experiment configs, the self-play driver, grid search and
//!   file outputs.

pub mod error;
pub mod eval;
pub mod game;
pub mod harness;
pub mod learner;
pub mod omd;
pub mod seq;

pub use error::{Error, Result};
pub use game::{
    build_kuhn, build_leduc, build_liars_dice, load_game, sample_episode, sample_episode_seeded,
    GameSpec, Player, Trajectory,
};
pub use seq::{
    average_plans, balanced_policy, behavioral_from_plan, kappa, realization_plan,
    BehavioralPolicy, KappaReport, RealizationPlan,
};
