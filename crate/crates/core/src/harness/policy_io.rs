//! Policy files: one line per infoset, `<infoset-label>: p1 p2 ...`.
//!
//! A single file may hold both players' policies; parsing for one player
//! picks out the labels that belong to that player and requires full
//! coverage of its infosets.

use std::path::Path;

use crate::error::{Error, Result};
use crate::game::{GameSpec, Player};
use crate::seq::BehavioralPolicy;

pub fn policy_to_string(game: &GameSpec, policy: &BehavioralPolicy) -> String {
    let mut out = String::new();
    for x in game.infosets(policy.owner()) {
        let probs = policy.infoset_probs(x.id).unwrap();
        let rendered: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
        out.push_str(&format!("{}: {}\n", x.label, rendered.join(" ")));
    }
    out
}

pub fn write_policy_file(
    game: &GameSpec,
    policy: &BehavioralPolicy,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, policy_to_string(game, policy))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn parse_policy_str(game: &GameSpec, player: Player, text: &str) -> Result<BehavioralPolicy> {
    let n = game.infosets(player).len();
    let mut probs: Vec<Option<Vec<f64>>> = vec![None; n];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, values) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected <label>: p1 p2 ..., found {line}"),
        })?;
        let label = label.trim();
        let id = match game.infoset_by_label(player, label) {
            Some(id) => id,
            None => {
                // Lines for the other player's infosets are skipped so one
                // file can carry a full profile.
                if game.infoset_by_label(player.opponent(), label).is_some() {
                    continue;
                }
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("unknown infoset label {label}"),
                });
            }
        };
        let mut dist = Vec::new();
        for tok in values.split_whitespace() {
            dist.push(tok.parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("bad probability {tok}"),
            })?);
        }
        if probs[id].is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate infoset label {label}"),
            });
        }
        probs[id] = Some(dist);
    }

    let mut resolved = Vec::with_capacity(n);
    for (id, dist) in probs.into_iter().enumerate() {
        match dist {
            Some(d) => resolved.push(d),
            None => {
                return Err(Error::Policy {
                    infoset: game.infoset(player, id).label.clone(),
                    message: "missing from policy file".into(),
                })
            }
        }
    }
    let policy = BehavioralPolicy::from_probs(player, resolved);
    policy.validate(game)?;
    Ok(policy)
}

pub fn load_policy(
    game: &GameSpec,
    player: Player,
    path: impl AsRef<Path>,
) -> Result<BehavioralPolicy> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_policy_str(game, player, text.as_str())
}
