//! Command-line driver: self-play runs, learning-rate grid search, exact
//! evaluation of stored policies, and kappa reports.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use efg_core::game::Player;
use efg_core::harness::{
    emit_outputs, grid_search, load_policy, write_policy_file, ConfigDraft, ExperimentConfig,
    GameSelect, RunLog, SamplingSelect,
};
use efg_core::seq::{balanced_policy, kappa, BehavioralPolicy};

#[derive(Parser)]
#[command(
    name = "efg",
    version,
    about = "Self-play learning in zero-sum extensive-form games from sampled episodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run fixed-sampling self-play and log the exploitability curve.
    Solve(SolveArgs),
    /// Run one self-play per learning rate and report the best.
    Grid(GridArgs),
    /// Print the exact value and exploitability of stored policies.
    Eval(EvalArgs),
    /// Print kappa totals and the per-infoset table for a sampling policy.
    Kappa(KappaArgs),
}

/// Flags shared by `solve` and `grid`. Any flag left unset falls back to the
/// config file (when given), then to the built-in defaults.
#[derive(Args, Clone)]
struct RunFlags {
    /// kuhn | leduc | liars-dice | file:PATH
    #[arg(long)]
    game: Option<String>,
    /// Number of self-play rounds (two episodes each).
    #[arg(long)]
    rounds: Option<u64>,
    /// theorem4 | count | loss
    #[arg(long)]
    schedule: Option<String>,
    /// Fixed learning rate.
    #[arg(long, conflicts_with = "eta_auto")]
    eta: Option<f64>,
    /// Derive the rate from the constant-schedule closed form.
    #[arg(long)]
    eta_auto: bool,
    /// balanced | uniform | file:PATH
    #[arg(long)]
    sampling: Option<String>,
    /// uniform | file:PATH
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of log-spaced evaluation checkpoints.
    #[arg(long)]
    checkpoints: Option<u64>,
    /// Confidence parameter for bound audits.
    #[arg(long)]
    delta: Option<f64>,
    /// Output directory for curve.csv, config.echo and curve.svg.
    #[arg(long)]
    out: Option<String>,
    /// Track exact loss vectors each round and attach bound audits.
    #[arg(long)]
    audit_exact: bool,
    /// Record 0 in the seconds column (byte-reproducible outputs).
    #[arg(long)]
    zero_seconds: bool,
    /// key=value config file; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunFlags {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ConfigDraft::from_file(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            None => ConfigDraft::default(),
        };
        let flags = ConfigDraft {
            game: self.game.clone(),
            rounds: self.rounds,
            schedule: self.schedule.clone(),
            eta: self.eta,
            eta_auto: if self.eta_auto { Some(true) } else { None },
            sampling: self.sampling.clone(),
            init: self.init.clone(),
            seed: self.seed,
            checkpoints: self.checkpoints,
            delta: self.delta,
            out: self.out.clone(),
            audit_exact: if self.audit_exact { Some(true) } else { None },
            zero_seconds: if self.zero_seconds { Some(true) } else { None },
        };
        Ok(base.overlay(flags).resolve()?)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    flags: RunFlags,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    flags: RunFlags,
    /// Comma-separated learning rates to sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    eta_grid: Vec<f64>,
}

#[derive(Args)]
struct EvalArgs {
    /// kuhn | leduc | liars-dice | file:PATH
    #[arg(long)]
    game: String,
    #[arg(long)]
    min_policy: PathBuf,
    #[arg(long)]
    max_policy: PathBuf,
}

#[derive(Args)]
struct KappaArgs {
    /// kuhn | leduc | liars-dice | file:PATH
    #[arg(long)]
    game: String,
    /// balanced | uniform | file:PATH
    #[arg(long, default_value = "balanced")]
    policy: String,
    /// min | max | both
    #[arg(long, default_value = "both")]
    player: String,
    /// Suppress the per-infoset table.
    #[arg(long)]
    totals_only: bool,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Solve(args) => solve(args),
        Command::Grid(args) => grid(args),
        Command::Eval(args) => eval(args),
        Command::Kappa(args) => kappa_cmd(args),
    }
}

fn print_run_summary(log: &RunLog) {
    let last = log.rows.last().expect("runs log at least one checkpoint");
    println!(
        "final exploitability {} at round {} ({} episodes)",
        last.exploitability, last.round, last.episodes
    );
    println!(
        "estimated regrets: min {} max {}",
        last.regret_min_est, last.regret_max_est
    );
    if let Some(audits) = &log.audits {
        println!(
            "estimation audit (delta {}): min regret {} <= max(est, 0) {} + bound {} -> {}",
            audits.estimation_min.delta,
            audits.estimation_min.true_regret.unwrap_or(f64::NAN),
            audits
                .estimation_min
                .estimated_regret
                .unwrap_or(f64::NAN)
                .max(0.0),
            audits.estimation_min.bound,
            if audits.estimation_min.holds {
                "holds"
            } else {
                "VIOLATED"
            }
        );
        println!(
            "constant-schedule regret bounds: min {} max {}",
            audits.regret_bound_min, audits.regret_bound_max
        );
        println!(
            "averaged-profile identity gap: {} (exploitability {} vs regret sum / T {})",
            audits.identity_gap, audits.avg_exploitability, audits.regret_sum_over_rounds
        );
    }
}

fn solve(args: SolveArgs) -> anyhow::Result<()> {
    let config = args.flags.resolve()?;
    let game = config.game.build()?;
    let log = efg_core::harness::run_selfplay_on(&game, &config)?;
    print_run_summary(&log);
    if let Some(dir) = &config.out_dir {
        emit_outputs(&log, dir)?;
        write_policy_file(&game, &log.final_avg_min, dir.join("avg_min.policy"))?;
        write_policy_file(&game, &log.final_avg_max, dir.join("avg_max.policy"))?;
        println!(
            "wrote {}/curve.csv, config.echo, curve.svg, avg_min.policy, avg_max.policy",
            dir.display()
        );
    }
    Ok(())
}

fn grid(args: GridArgs) -> anyhow::Result<()> {
    let config = args.flags.resolve()?;
    let result = grid_search(&config, &args.eta_grid)?;
    println!(
        "{:>12}  {:>22}  {:>20}",
        "eta", "final exploitability", "seed"
    );
    for row in &result.rows {
        println!(
            "{:>12}  {:>22}  {:>20}",
            row.eta, row.final_exploitability, row.seed
        );
    }
    println!("best eta: {}", result.best_eta);
    Ok(())
}

fn eval(args: EvalArgs) -> anyhow::Result<()> {
    let game = GameSelect::parse(&args.game)?.build()?;
    let min = load_policy(&game, Player::Min, &args.min_policy)?;
    let max = load_policy(&game, Player::Max, &args.max_policy)?;
    let value = efg_core::eval::expected_value(&game, &min, &max);
    let gap = efg_core::eval::exploitability(&game, &min, &max);
    println!("value {value}");
    println!("exploitability {gap}");
    Ok(())
}

fn kappa_cmd(args: KappaArgs) -> anyhow::Result<()> {
    let game = GameSelect::parse(&args.game)?.build()?;
    let players: Vec<Player> = match args.player.as_str() {
        "min" => vec![Player::Min],
        "max" => vec![Player::Max],
        "both" => vec![Player::Min, Player::Max],
        other => bail!("unknown player {other}; expected min, max or both"),
    };
    for player in players {
        let policy = match SamplingSelect::parse(&args.policy)? {
            SamplingSelect::Balanced => balanced_policy(&game, player),
            SamplingSelect::Uniform => BehavioralPolicy::uniform(&game, player),
            SamplingSelect::File(path) => load_policy(&game, player, &path)?,
        };
        let report = kappa(&game, &policy, player)?;
        println!(
            "player {player}: kappa {} against {} sequences",
            report.total,
            game.seq_count(player)
        );
        if !args.totals_only {
            println!(
                "{:>10}  {:>6}  {:>18}  {:>10}  label",
                "infoset", "depth", "kappa", "subtree"
            );
            for x in game.infosets(player) {
                println!(
                    "{:>10}  {:>6}  {:>18}  {:>10}  {}",
                    x.id,
                    x.depth,
                    report.per_infoset[x.id],
                    report.subtree_actions_per_infoset[x.id],
                    x.label
                );
            }
        }
    }
    Ok(())
}
