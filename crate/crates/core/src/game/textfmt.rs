//! Plain-text game descriptions.
//!
//! One record per line, the first record being the root:
//!
//! ```text
//! node <id> chance {<child>:<prob>,...}
//! node <id> player <min|max> infoset <label> {<action>:<child>,...}
//! node <id> terminal <loss>
//! ```
//!
//! Infoset labels group decision nodes into information sets. Blank lines and
//! lines starting with `#` are ignored.

use std::collections::HashMap;
use std::path::Path;

use super::{GameBuilder, GameSpec, NodeId, NodeKind, Player};
use crate::error::{Error, Result};

pub fn load_game(path: impl AsRef<Path>) -> Result<GameSpec> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_game(&text)
}

pub fn parse_game(text: &str) -> Result<GameSpec> {
    let records: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if records.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no node records found".into(),
        });
    }

    // First pass: declare ids so records may reference nodes in any order.
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut builder = GameBuilder::new("file");
    for &(line, record) in &records {
        let mut tok = record.split_whitespace();
        expect(tok.next(), "node", line)?;
        let name = tok.next().ok_or_else(|| parse_err(line, "missing node id"))?;
        if ids.contains_key(name) {
            return Err(parse_err(line, format!("duplicate node id {name}")));
        }
        let id = builder.reserve();
        builder.set_display_name(id, name.to_string());
        ids.insert(name.to_string(), id);
    }

    for &(line, record) in &records {
        parse_record(&mut builder, &ids, line, record)?;
    }

    let root = ids[first_id(records[0].1)];
    builder.finalize(root)
}

fn first_id(record: &str) -> &str {
    record.split_whitespace().nth(1).unwrap()
}

fn parse_record(
    builder: &mut GameBuilder,
    ids: &HashMap<String, NodeId>,
    line: usize,
    record: &str,
) -> Result<()> {
    let (head, brace) = match record.find('{') {
        Some(i) => {
            let close = record
                .rfind('}')
                .ok_or_else(|| parse_err(line, "unterminated { group"))?;
            (record[..i].trim(), Some(&record[i + 1..close]))
        }
        None => (record, None),
    };
    let tokens: Vec<&str> = head.split_whitespace().collect();
    let id = ids[tokens[1]];
    match tokens.get(2) {
        Some(&"chance") => {
            let mut outcomes = Vec::new();
            for (child, prob) in brace_items(brace, line)? {
                let child = *ids
                    .get(child)
                    .ok_or_else(|| parse_err(line, format!("unknown child id {child}")))?;
                let prob: f64 = prob
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad probability {prob}")))?;
                outcomes.push((child, prob));
            }
            builder.set_chance(id, outcomes);
        }
        Some(&"player") => {
            let player = match tokens.get(3) {
                Some(&"min") => Player::Min,
                Some(&"max") => Player::Max,
                other => {
                    return Err(parse_err(
                        line,
                        format!("expected min or max, found {other:?}"),
                    ))
                }
            };
            expect(tokens.get(4).copied(), "infoset", line)?;
            let label = tokens
                .get(5)
                .ok_or_else(|| parse_err(line, "missing infoset label"))?;
            let mut edges = Vec::new();
            for (action, child) in brace_items(brace, line)? {
                let action: u32 = action
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad action index {action}")))?;
                let child = *ids
                    .get(child)
                    .ok_or_else(|| parse_err(line, format!("unknown child id {child}")))?;
                edges.push((action, child));
            }
            builder.set_decision(id, player, label.to_string(), edges);
        }
        Some(&"terminal") => {
            let loss = tokens
                .get(3)
                .ok_or_else(|| parse_err(line, "missing terminal loss"))?;
            let loss: f64 = loss
                .parse()
                .map_err(|_| parse_err(line, format!("bad terminal loss {loss}")))?;
            builder.set_terminal(id, loss);
        }
        other => {
            return Err(parse_err(
                line,
                format!("expected chance, player or terminal, found {other:?}"),
            ))
        }
    }
    Ok(())
}

fn brace_items(brace: Option<&str>, line: usize) -> Result<Vec<(&str, &str)>> {
    let brace = brace.ok_or_else(|| parse_err(line, "missing { } group"))?;
    let mut items = Vec::new();
    for item in brace.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (k, v) = item
            .split_once(':')
            .ok_or_else(|| parse_err(line, format!("expected key:value, found {item}")))?;
        items.push((k.trim(), v.trim()));
    }
    if items.is_empty() {
        return Err(parse_err(line, "empty { } group"));
    }
    Ok(items)
}

fn expect(found: Option<&str>, expected: &str, line: usize) -> Result<()> {
    match found {
        Some(tok) if tok == expected => Ok(()),
        other => Err(parse_err(
            line,
            format!("expected {expected}, found {other:?}"),
        )),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Serializes a game in the grammar above, root record first.
/// Numbers use the shortest representation that round-trips exactly.
pub fn serialize_game(game: &GameSpec) -> String {
    // Fresh names in DFS preorder so the root comes first.
    let mut order = Vec::with_capacity(game.num_nodes());
    let mut names: Vec<Option<usize>> = vec![None; game.num_nodes()];
    let mut stack = vec![game.root()];
    while let Some(id) = stack.pop() {
        names[id] = Some(order.len());
        order.push(id);
        match &game.node(id).kind {
            NodeKind::Chance { outcomes } => {
                stack.extend(outcomes.iter().rev().map(|&(c, _)| c))
            }
            NodeKind::Decision { edges, .. } => stack.extend(edges.iter().rev().map(|&(_, c)| c)),
            NodeKind::Terminal { .. } => {}
        }
    }

    let mut out = String::new();
    for &id in &order {
        let name = names[id].unwrap();
        match &game.node(id).kind {
            NodeKind::Chance { outcomes } => {
                let items: Vec<String> = outcomes
                    .iter()
                    .map(|&(c, p)| format!("n{}:{}", names[c].unwrap(), p))
                    .collect();
                out.push_str(&format!("node n{name} chance {{{}}}\n", items.join(",")));
            }
            NodeKind::Decision {
                player,
                infoset,
                edges,
            } => {
                let label = &game.infoset(*player, *infoset).label;
                let items: Vec<String> = edges
                    .iter()
                    .map(|&(a, c)| format!("{a}:n{}", names[c].unwrap()))
                    .collect();
                out.push_str(&format!(
                    "node n{name} player {player} infoset {label} {{{}}}\n",
                    items.join(",")
                ));
            }
            NodeKind::Terminal { loss } => {
                out.push_str(&format!("node n{name} terminal {loss}\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MATCHING_PENNIES: &str = "\
node r player min infoset x {0:a,1:b}
node a player max infoset y {0:t00,1:t01}
node b player max infoset y {0:t10,1:t11}
node t00 terminal 0
node t01 terminal 1
node t10 terminal 1
node t11 terminal 0
";

    #[test]
    fn parses_matching_pennies() {
        let g = parse_game(MATCHING_PENNIES).unwrap();
        assert_eq!(g.seq_count(Player::Min), 2);
        assert_eq!(g.seq_count(Player::Max), 2);
        assert_eq!(g.player_depth(Player::Min), 1);
        assert_eq!(g.player_depth(Player::Max), 1);
        assert_eq!(g.infosets(Player::Max).len(), 1);
        assert_eq!(g.infosets(Player::Max)[0].members.len(), 2);
    }

    #[test]
    fn bad_probabilities_report_the_sum() {
        let text = "\
node r chance {a:0.5,b:0.6}
node a terminal 0
node b terminal 1
";
        let err = parse_game(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("probabilities sum to 1.1"), "got: {msg}");
        assert!(msg.contains("node r"), "got: {msg}");
    }

    #[test]
    fn imperfect_recall_is_rejected() {
        // The min player forgets its own first move: both second-decision
        // nodes share a label but have different own histories.
        let text = "\
node r player min infoset x0 {0:a,1:b}
node a player min infoset x1 {0:t0,1:t1}
node b player min infoset x1 {0:t2,1:t3}
node t0 terminal 0
node t1 terminal 1
node t2 terminal 1
node t3 terminal 0
";
        let err = parse_game(text).unwrap_err();
        assert!(err.to_string().contains("perfect recall"), "got: {err}");
    }
}
