//! Text-format round trips and structural equivalence.

mod common;

use efg_core::game::{
    build_kuhn, build_liars_dice, parse_game, serialize_game, GameSpec, NodeKind, Player,
};
use std::collections::HashMap;

/// Structural isomorphism: identical tree shape, chance probabilities,
/// terminal losses, action ids, owners, and a consistent bijection between
/// the two games' infosets. Labels are allowed to differ.
fn assert_isomorphic(a: &GameSpec, b: &GameSpec) {
    assert_eq!(a.num_nodes(), b.num_nodes());
    for player in Player::BOTH {
        assert_eq!(a.infosets(player).len(), b.infosets(player).len());
        assert_eq!(a.seq_count(player), b.seq_count(player));
        assert_eq!(a.player_depth(player), b.player_depth(player));
    }

    let mut infoset_map: [HashMap<usize, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut stack = vec![(a.root(), b.root())];
    while let Some((na, nb)) = stack.pop() {
        match (&a.node(na).kind, &b.node(nb).kind) {
            (NodeKind::Terminal { loss: la }, NodeKind::Terminal { loss: lb }) => {
                assert_eq!(la, lb, "terminal losses differ at {na}/{nb}");
            }
            (NodeKind::Chance { outcomes: oa }, NodeKind::Chance { outcomes: ob }) => {
                assert_eq!(oa.len(), ob.len());
                for ((ca, pa), (cb, pb)) in oa.iter().zip(ob) {
                    assert_eq!(pa, pb, "chance probabilities differ at {na}/{nb}");
                    stack.push((*ca, *cb));
                }
            }
            (
                NodeKind::Decision {
                    player: pa,
                    infoset: ia,
                    edges: ea,
                },
                NodeKind::Decision {
                    player: pb,
                    infoset: ib,
                    edges: eb,
                },
            ) => {
                assert_eq!(pa, pb, "acting player differs at {na}/{nb}");
                let mapped = infoset_map[pa.index()].entry(*ia).or_insert(*ib);
                assert_eq!(mapped, ib, "infoset partition differs at {na}/{nb}");
                assert_eq!(ea.len(), eb.len());
                for ((aa, ca), (ab, cb)) in ea.iter().zip(eb) {
                    assert_eq!(aa, ab, "action ids differ at {na}/{nb}");
                    stack.push((*ca, *cb));
                }
            }
            _ => panic!("node kinds differ at {na}/{nb}"),
        }
    }
    // The maps must be bijections.
    for m in &infoset_map {
        let mut seen = std::collections::HashSet::new();
        for v in m.values() {
            assert!(seen.insert(*v), "infoset map is not injective");
        }
    }
}

#[test]
fn kuhn_survives_a_serialize_parse_round_trip() {
    let original = build_kuhn();
    let text = serialize_game(&original);
    let reparsed = parse_game(&text).unwrap();
    assert_isomorphic(&original, &reparsed);
    // and the round trip is a fixed point of serialization
    assert_eq!(text, serialize_game(&reparsed));
}

#[test]
fn small_liars_dice_survives_a_round_trip() {
    let original = build_liars_dice(1, 3).unwrap();
    let reparsed = parse_game(&serialize_game(&original)).unwrap();
    assert_isomorphic(&original, &reparsed);
}

#[test]
fn matching_pennies_file_has_the_documented_shape() {
    let g = parse_game(common::MATCHING_PENNIES).unwrap();
    assert_eq!(g.seq_count(Player::Min), 2);
    assert_eq!(g.seq_count(Player::Max), 2);
    assert_eq!(g.player_depth(Player::Min), 1);
    assert_eq!(g.player_depth(Player::Max), 1);
}
