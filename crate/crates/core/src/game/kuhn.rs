use super::{GameBuilder, GameSpec, Player};

const CARD_NAMES: [&str; 3] = ["J", "Q", "K"];

/// Builds standard three-card Kuhn poker.
///
/// Both players ante 1, bets have size 1, and the raw payoffs in
/// `{-2, -1, +1, +2}` are rescaled affinely to a min-player loss in `[0, 1]`
/// via `(raw + 2) / 4`. The first mover is the min player.
pub fn build_kuhn() -> GameSpec {
    let mut b = GameBuilder::new("kuhn");
    let mut deals = Vec::new();
    for c1 in 0..3u8 {
        for c2 in 0..3u8 {
            if c1 == c2 {
                continue;
            }
            let node = build_betting(&mut b, c1, c2);
            deals.push((node, 1.0 / 6.0));
        }
    }
    let root = b.chance(deals);
    b.finalize(root).expect("kuhn construction is valid")
}

/// Raw min-player loss, before normalization. `stake` is 1 for a
/// one-ante showdown and 2 after a called bet.
fn showdown(c1: u8, c2: u8, stake: f64) -> f64 {
    if c1 > c2 {
        -stake
    } else {
        stake
    }
}

fn norm(raw: f64) -> f64 {
    (raw + 2.0) / 4.0
}

fn build_betting(b: &mut GameBuilder, c1: u8, c2: u8) -> usize {
    let me = CARD_NAMES[c1 as usize];
    let opp = CARD_NAMES[c2 as usize];

    // check-check showdown, bet-fold, and called-bet terminals
    let t_kk = b.terminal(norm(showdown(c1, c2, 1.0)));
    let t_kbf = b.terminal(norm(1.0));
    let t_kbc = b.terminal(norm(showdown(c1, c2, 2.0)));
    let t_bf = b.terminal(norm(-1.0));
    let t_bc = b.terminal(norm(showdown(c1, c2, 2.0)));

    // min player facing a bet after checking: fold or call
    let p1_kb = b.decision(Player::Min, format!("{me}|kb"), vec![(0, t_kbf), (1, t_kbc)]);
    // max player after a check: check or bet
    let p2_k = b.decision(Player::Max, format!("{opp}|k"), vec![(0, t_kk), (1, p1_kb)]);
    // max player facing a bet: fold or call
    let p2_b = b.decision(Player::Max, format!("{opp}|b"), vec![(0, t_bf), (1, t_bc)]);
    // min player opens: check or bet
    b.decision(Player::Min, format!("{me}|"), vec![(0, p2_k), (1, p2_b)])
}
