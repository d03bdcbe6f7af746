use super::{GameBuilder, GameSpec, NodeId, Player};

/// Six-card deck: ranks J, Q, K in two suits. `card / 2` is the rank.
const CARDS: [&str; 6] = ["Js", "Jh", "Qs", "Qh", "Ks", "Kh"];

fn rank(card: u8) -> u8 {
    card / 2
}

/// Raw payoffs span [-13, 13]: ante 1, two bets of 2 in round one and two
/// bets of 4 in round two.
const MAX_POT: f64 = 13.0;

fn norm(raw: f64) -> f64 {
    (raw + MAX_POT) / (2.0 * MAX_POT)
}

/// Builds standard Leduc hold'em: one private card each from a six-card deck,
/// one board card, two betting rounds with a two-bet cap, bet sizes 2 then 4.
pub fn build_leduc() -> GameSpec {
    let mut b = GameBuilder::new("leduc");
    let mut deals = Vec::new();
    for c1 in 0..6u8 {
        for c2 in 0..6u8 {
            if c1 == c2 {
                continue;
            }
            let node = round(&mut b, c1, c2, None, String::new(), [1.0, 1.0]);
            deals.push((node, 1.0 / 30.0));
        }
    }
    let root = b.chance(deals);
    b.finalize(root).expect("leduc construction is valid")
}

#[derive(Clone, Copy)]
struct BetState {
    to_act: Player,
    bets_made: u8,
    outstanding: f64,
}

/// Builds one betting round. `board` is `None` in round one; after the round
/// closes without a fold, round one deals the board and recurses, round two
/// goes to showdown.
fn round(
    b: &mut GameBuilder,
    c1: u8,
    c2: u8,
    board: Option<u8>,
    prefix: String,
    pot: [f64; 2],
) -> NodeId {
    let state = BetState {
        to_act: Player::Min,
        bets_made: 0,
        outstanding: 0.0,
    };
    betting(b, c1, c2, board, &prefix, String::new(), state, pot)
}

#[allow(clippy::too_many_arguments)]
fn betting(
    b: &mut GameBuilder,
    c1: u8,
    c2: u8,
    board: Option<u8>,
    prefix: &str,
    seq: String,
    state: BetState,
    pot: [f64; 2],
) -> NodeId {
    let bet_size = if board.is_none() { 2.0 } else { 4.0 };
    let me = state.to_act;
    let my_card = if me == Player::Min { c1 } else { c2 };
    let label = format!("{}{}|{}", CARDS[my_card as usize], prefix, seq);

    let mut edges: Vec<(u32, NodeId)> = Vec::new();
    if state.outstanding == 0.0 {
        // check
        let check_seq = format!("{seq}k");
        let child = if seq.ends_with('k') {
            // both checked: the round closes
            round_over(b, c1, c2, board, prefix, &check_seq, pot)
        } else {
            betting(
                b,
                c1,
                c2,
                board,
                prefix,
                check_seq,
                BetState {
                    to_act: me.opponent(),
                    ..state
                },
                pot,
            )
        };
        edges.push((0, child));
        // bet
        let mut new_pot = pot;
        new_pot[me.index()] += bet_size;
        let child = betting(
            b,
            c1,
            c2,
            board,
            prefix,
            format!("{seq}b"),
            BetState {
                to_act: me.opponent(),
                bets_made: 1,
                outstanding: bet_size,
            },
            new_pot,
        );
        edges.push((1, child));
    } else {
        // fold: the folder forfeits their own contribution
        let raw = if me == Player::Min {
            pot[0]
        } else {
            -pot[1]
        };
        edges.push((0, b.terminal(norm(raw))));
        // call
        let mut new_pot = pot;
        new_pot[me.index()] += state.outstanding;
        let call_seq = format!("{seq}c");
        let child = round_over(b, c1, c2, board, prefix, &call_seq, new_pot);
        edges.push((1, child));
        // raise, while under the two-bet cap
        if state.bets_made < 2 {
            let mut new_pot = pot;
            new_pot[me.index()] += state.outstanding + bet_size;
            let child = betting(
                b,
                c1,
                c2,
                board,
                prefix,
                format!("{seq}r"),
                BetState {
                    to_act: me.opponent(),
                    bets_made: state.bets_made + 1,
                    outstanding: bet_size,
                },
                new_pot,
            );
            edges.push((2, child));
        }
    }
    b.decision(me, label, edges)
}

fn round_over(
    b: &mut GameBuilder,
    c1: u8,
    c2: u8,
    board: Option<u8>,
    prefix: &str,
    seq: &str,
    pot: [f64; 2],
) -> NodeId {
    match board {
        Some(board) => b.terminal(norm(showdown(c1, c2, board, pot))),
        None => {
            // deal the board card from the four remaining
            let mut outcomes = Vec::new();
            for card in 0..6u8 {
                if card == c1 || card == c2 {
                    continue;
                }
                let next_prefix = format!("{prefix}|{seq}|{}", CARDS[card as usize]);
                let node = round(b, c1, c2, Some(card), next_prefix, pot);
                outcomes.push((node, 1.0 / 4.0));
            }
            b.chance(outcomes)
        }
    }
}

/// Pair with the board wins; otherwise higher rank wins; equal ranks split.
fn showdown(c1: u8, c2: u8, board: u8, pot: [f64; 2]) -> f64 {
    debug_assert!((pot[0] - pot[1]).abs() < 1e-9);
    let p1_pair = rank(c1) == rank(board);
    let p2_pair = rank(c2) == rank(board);
    let p1_wins = match (p1_pair, p2_pair) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => match rank(c1).cmp(&rank(c2)) {
            std::cmp::Ordering::Greater => Some(true),
            std::cmp::Ordering::Less => Some(false),
            std::cmp::Ordering::Equal => None,
        },
    };
    match p1_wins {
        Some(true) => -pot[1],
        Some(false) => pot[0],
        None => 0.0,
    }
}
