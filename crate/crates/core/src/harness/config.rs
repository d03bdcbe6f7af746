use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::game::{build_kuhn, build_leduc, build_liars_dice, load_game, GameSpec};

/// Which game a run is played on.
#[derive(Clone, Debug, PartialEq)]
pub enum GameSelect {
    Kuhn,
    Leduc,
    /// One die per player, six faces.
    LiarsDice,
    File(PathBuf),
}

impl GameSelect {
    pub fn parse(s: &str) -> Result<GameSelect> {
        match s {
            "kuhn" => Ok(GameSelect::Kuhn),
            "leduc" => Ok(GameSelect::Leduc),
            "liars-dice" => Ok(GameSelect::LiarsDice),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(GameSelect::File(PathBuf::from(path))),
                _ => Err(Error::Config(format!(
                    "unknown game {other}; expected kuhn, leduc, liars-dice or file:PATH"
                ))),
            },
        }
    }

    pub fn build(&self) -> Result<GameSpec> {
        match self {
            GameSelect::Kuhn => Ok(build_kuhn()),
            GameSelect::Leduc => Ok(build_leduc()),
            GameSelect::LiarsDice => build_liars_dice(1, 6),
            GameSelect::File(path) => load_game(path),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleSelect {
    Theorem4,
    Count,
    Loss,
}

impl ScheduleSelect {
    pub fn parse(s: &str) -> Result<ScheduleSelect> {
        match s {
            "theorem4" => Ok(ScheduleSelect::Theorem4),
            "count" => Ok(ScheduleSelect::Count),
            "loss" => Ok(ScheduleSelect::Loss),
            other => Err(Error::Config(format!(
                "unknown schedule {other}; expected theorem4, count or loss"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EtaSelect {
    Fixed(f64),
    /// Resolve via the constant-schedule closed form at run start.
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SamplingSelect {
    Balanced,
    Uniform,
    File(PathBuf),
}

impl SamplingSelect {
    pub fn parse(s: &str) -> Result<SamplingSelect> {
        match s {
            "balanced" => Ok(SamplingSelect::Balanced),
            "uniform" => Ok(SamplingSelect::Uniform),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(SamplingSelect::File(PathBuf::from(path))),
                _ => Err(Error::Config(format!(
                    "unknown sampling policy {other}; expected balanced, uniform or file:PATH"
                ))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitSelect {
    Uniform,
    File(PathBuf),
}

impl InitSelect {
    pub fn parse(s: &str) -> Result<InitSelect> {
        match s {
            "uniform" => Ok(InitSelect::Uniform),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(InitSelect::File(PathBuf::from(path))),
                _ => Err(Error::Config(format!(
                    "unknown initial policy {other}; expected uniform or file:PATH"
                ))),
            },
        }
    }
}

/// Fully resolved description of one self-play run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub game: GameSelect,
    pub rounds: u64,
    /// Per player (min first).
    pub schedule: [ScheduleSelect; 2],
    pub eta: [EtaSelect; 2],
    pub sampling: [SamplingSelect; 2],
    pub initial: [InitSelect; 2],
    pub seed: u64,
    /// Number of log-spaced checkpoints.
    pub checkpoints: u64,
    /// Confidence parameter carried for bound audits only.
    pub delta: f64,
    pub out_dir: Option<PathBuf>,
    /// Track exact loss vectors every round and attach bound audits.
    pub audit_exact: bool,
    /// Write 0 in the seconds column for byte-reproducible outputs.
    pub zero_seconds: bool,
}

impl ExperimentConfig {
    pub fn new(game: GameSelect) -> Self {
        ExperimentConfig {
            game,
            rounds: 1000,
            schedule: [ScheduleSelect::Theorem4; 2],
            eta: [EtaSelect::Auto; 2],
            sampling: [SamplingSelect::Balanced, SamplingSelect::Balanced],
            initial: [InitSelect::Uniform, InitSelect::Uniform],
            seed: 0,
            checkpoints: 20,
            delta: 0.1,
            out_dir: None,
            audit_exact: false,
            zero_seconds: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if self.checkpoints == 0 {
            return Err(Error::Config("checkpoints must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        for eta in self.eta {
            if let EtaSelect::Fixed(v) = eta {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!("eta must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    /// The exact resolved configuration, one `key=value` per line in the
    /// config-file grammar.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("game", self.game_string());
        kv("rounds", self.rounds.to_string());
        kv("schedule", schedule_str(self.schedule[0]).to_string());
        match self.eta[0] {
            EtaSelect::Fixed(v) => kv("eta", v.to_string()),
            EtaSelect::Auto => kv("eta-auto", "true".to_string()),
        }
        kv("sampling", sampling_string(&self.sampling[0]));
        kv("init", init_string(&self.initial[0]));
        kv("seed", self.seed.to_string());
        kv("checkpoints", self.checkpoints.to_string());
        kv("delta", self.delta.to_string());
        if let Some(dir) = &self.out_dir {
            kv("out", dir.display().to_string());
        }
        kv("audit-exact", self.audit_exact.to_string());
        kv("zero-seconds", self.zero_seconds.to_string());
        out
    }

    fn game_string(&self) -> String {
        match &self.game {
            GameSelect::Kuhn => "kuhn".into(),
            GameSelect::Leduc => "leduc".into(),
            GameSelect::LiarsDice => "liars-dice".into(),
            GameSelect::File(p) => format!("file:{}", p.display()),
        }
    }
}

fn schedule_str(s: ScheduleSelect) -> &'static str {
    match s {
        ScheduleSelect::Theorem4 => "theorem4",
        ScheduleSelect::Count => "count",
        ScheduleSelect::Loss => "loss",
    }
}

fn sampling_string(s: &SamplingSelect) -> String {
    match s {
        SamplingSelect::Balanced => "balanced".into(),
        SamplingSelect::Uniform => "uniform".into(),
        SamplingSelect::File(p) => format!("file:{}", p.display()),
    }
}

fn init_string(s: &InitSelect) -> String {
    match s {
        InitSelect::Uniform => "uniform".into(),
        InitSelect::File(p) => format!("file:{}", p.display()),
    }
}

/// Partially specified configuration; config files and command-line flags
/// both produce drafts, flags overlaying the file.
#[derive(Clone, Debug, Default)]
pub struct ConfigDraft {
    pub game: Option<String>,
    pub rounds: Option<u64>,
    pub schedule: Option<String>,
    pub eta: Option<f64>,
    pub eta_auto: Option<bool>,
    pub sampling: Option<String>,
    pub init: Option<String>,
    pub seed: Option<u64>,
    pub checkpoints: Option<u64>,
    pub delta: Option<f64>,
    pub out: Option<String>,
    pub audit_exact: Option<bool>,
    pub zero_seconds: Option<bool>,
}

impl ConfigDraft {
    pub fn from_file(path: impl AsRef<Path>) -> Result<ConfigDraft> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        ConfigDraft::parse_str(&text)
    }

    /// Parses `key=value` lines; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<ConfigDraft> {
        let mut draft = ConfigDraft::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key=value, found {line}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Parse {
                line: i + 1,
                message: format!("bad {what}: {value}"),
            };
            match key {
                "game" => draft.game = Some(value.to_string()),
                "rounds" => draft.rounds = Some(value.parse().map_err(|_| bad("rounds"))?),
                "schedule" => draft.schedule = Some(value.to_string()),
                "eta" => draft.eta = Some(value.parse().map_err(|_| bad("eta"))?),
                "eta-auto" => draft.eta_auto = Some(value.parse().map_err(|_| bad("eta-auto"))?),
                "sampling" => draft.sampling = Some(value.to_string()),
                "init" => draft.init = Some(value.to_string()),
                "seed" => draft.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "checkpoints" => {
                    draft.checkpoints = Some(value.parse().map_err(|_| bad("checkpoints"))?)
                }
                "delta" => draft.delta = Some(value.parse().map_err(|_| bad("delta"))?),
                "out" => draft.out = Some(value.to_string()),
                "audit-exact" => {
                    draft.audit_exact = Some(value.parse().map_err(|_| bad("audit-exact"))?)
                }
                "zero-seconds" => {
                    draft.zero_seconds = Some(value.parse().map_err(|_| bad("zero-seconds"))?)
                }
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("unknown config key {other}"),
                    })
                }
            }
        }
        Ok(draft)
    }

    /// Overlays `flags` on `self`: any field set in `flags` wins.
    pub fn overlay(mut self, flags: ConfigDraft) -> ConfigDraft {
        macro_rules! take {
            ($field:ident) => {
                if flags.$field.is_some() {
                    self.$field = flags.$field;
                }
            };
        }
        take!(game);
        take!(rounds);
        take!(schedule);
        take!(eta);
        take!(eta_auto);
        take!(sampling);
        take!(init);
        take!(seed);
        take!(checkpoints);
        take!(delta);
        take!(out);
        take!(audit_exact);
        take!(zero_seconds);
        self
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let game = GameSelect::parse(
            self.game
                .as_deref()
                .ok_or_else(|| Error::Config("missing game".into()))?,
        )?;
        let mut config = ExperimentConfig::new(game);
        if let Some(rounds) = self.rounds {
            config.rounds = rounds;
        }
        if let Some(s) = &self.schedule {
            let s = ScheduleSelect::parse(s)?;
            config.schedule = [s; 2];
        }
        match (self.eta, self.eta_auto) {
            (Some(v), Some(true)) => {
                return Err(Error::Config(format!(
                    "eta={v} and eta-auto=true are mutually exclusive"
                )))
            }
            (Some(v), _) => config.eta = [EtaSelect::Fixed(v); 2],
            (None, _) => config.eta = [EtaSelect::Auto; 2],
        }
        if let Some(s) = &self.sampling {
            let s = SamplingSelect::parse(s)?;
            config.sampling = [s.clone(), s];
        }
        if let Some(s) = &self.init {
            let s = InitSelect::parse(s)?;
            config.initial = [s.clone(), s];
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(c) = self.checkpoints {
            config.checkpoints = c;
        }
        if let Some(d) = self.delta {
            config.delta = d;
        }
        if let Some(out) = &self.out {
            config.out_dir = Some(PathBuf::from(out));
        }
        if let Some(a) = self.audit_exact {
            config.audit_exact = a;
        }
        if let Some(z) = self.zero_seconds {
            config.zero_seconds = z;
        }
        config.validate()?;
        Ok(config)
    }
}
