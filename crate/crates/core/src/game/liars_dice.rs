use super::{GameBuilder, GameSpec, NodeId, Player, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};

/// Builds liar's dice with one roll per player.
///
/// Rules: each player privately rolls `dice_per_player` dice with `faces`
/// sides. Starting with the min player, players alternate either raising the
/// bid or calling "liar". A bid `(quantity, face)` claims at least `quantity`
/// dice among all rolled dice show `face`; bids are ordered by quantity first,
/// then face. The highest face is wild and counts toward every other face.
/// When "liar" is called the last bid is checked against the actual rolls and
/// the loser pays 1, rescaled to a loss in `[0, 1]`.
pub fn build_liars_dice(dice_per_player: usize, faces: usize) -> Result<GameSpec> {
    build_liars_dice_with_budget(dice_per_player, faces, DEFAULT_NODE_BUDGET)
}

pub fn build_liars_dice_with_budget(
    dice_per_player: usize,
    faces: usize,
    budget: usize,
) -> Result<GameSpec> {
    assert!(dice_per_player >= 1, "need at least one die per player");
    assert!(faces >= 2, "need at least two faces");

    let num_bids = 2 * dice_per_player * faces;
    let rolls = multisets(dice_per_player, faces);
    // Upper bound on the node count: every pair of rolls spawns one bidding
    // tree with at most 2^(B+1) nodes, plus the root.
    let est = (rolls.len() as f64).powi(2) * 2f64.powi(num_bids as i32 + 1) + 1.0;
    if est > budget as f64 {
        return Err(Error::NodeBudget {
            nodes: est as usize,
            budget,
        });
    }

    let mut b = GameBuilder::new(format!("liars-dice-{dice_per_player}d{faces}f"))
        .with_node_budget(budget);
    let mut outcomes = Vec::new();
    for (r1, p1) in &rolls {
        for (r2, p2) in &rolls {
            let ctx = Ctx {
                rolls: [r1.clone(), r2.clone()],
                faces,
                num_bids,
            };
            let node = bid_node(&mut b, &ctx, None, Player::Min, String::new());
            outcomes.push((node, p1 * p2));
        }
    }
    let root = b.chance(outcomes);
    b.finalize(root)
}

struct Ctx {
    rolls: [Vec<usize>; 2],
    faces: usize,
    num_bids: usize,
}

/// All sorted rolls of `d` dice with their multinomial probabilities.
fn multisets(d: usize, faces: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        d: usize,
        faces: usize,
        min_face: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if current.len() == d {
            out.push((current.clone(), multiset_prob(current, faces)));
            return;
        }
        for f in min_face..faces {
            current.push(f);
            rec(d, faces, f, current, out);
            current.pop();
        }
    }
    rec(d, faces, 0, &mut current, &mut out);
    out
}

fn multiset_prob(roll: &[usize], faces: usize) -> f64 {
    let d = roll.len();
    let mut permutations = factorial(d);
    let mut i = 0;
    while i < d {
        let mut j = i;
        while j < d && roll[j] == roll[i] {
            j += 1;
        }
        permutations /= factorial(j - i);
        i = j;
    }
    permutations as f64 / (faces as f64).powi(d as i32)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

fn bid_node(
    b: &mut GameBuilder,
    ctx: &Ctx,
    last: Option<usize>,
    to_act: Player,
    seq: String,
) -> NodeId {
    let roll: String = ctx.rolls[to_act.index()]
        .iter()
        .map(|f| (f + 1).to_string())
        .collect();
    let label = format!("{roll}|{seq}");

    let mut edges: Vec<(u32, NodeId)> = Vec::new();
    let first = match last {
        None => 0,
        Some(l) => l + 1,
    };
    for bid in first..ctx.num_bids {
        let next_seq = if seq.is_empty() {
            bid.to_string()
        } else {
            format!("{seq}.{bid}")
        };
        let child = bid_node(b, ctx, Some(bid), to_act.opponent(), next_seq);
        edges.push((bid as u32, child));
    }
    if let Some(bid) = last {
        let child = b.terminal(resolve_liar(ctx, bid, to_act));
        edges.push((ctx.num_bids as u32, child));
    }
    b.decision(to_act, label, edges)
}

/// The caller challenges the last bid; the loser pays 1 (normalized to {0, 1}).
fn resolve_liar(ctx: &Ctx, bid: usize, caller: Player) -> f64 {
    let quantity = bid / ctx.faces + 1;
    let face = bid % ctx.faces;
    let wild = ctx.faces - 1;
    let matches: usize = ctx
        .rolls
        .iter()
        .flatten()
        .filter(|&&f| f == face || (face != wild && f == wild))
        .count();
    let bid_stands = matches >= quantity;
    let caller_loses = bid_stands;
    let raw = match (caller, caller_loses) {
        (Player::Min, true) | (Player::Max, false) => 1.0,
        (Player::Min, false) | (Player::Max, true) => -1.0,
    };
    (raw + 1.0) / 2.0
}
