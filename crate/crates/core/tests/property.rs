//! Property tests over generated policies and update instances.

use efg_core::game::{build_kuhn, GameSpec, Player};
use efg_core::omd::{
    stabilized_objective, stabilized_simplex_update, SimplexPoint, StabilizedStep,
};
use efg_core::seq::{behavioral_from_plan, realization_plan, BehavioralPolicy};
use proptest::prelude::*;

fn policy_strategy(game: &GameSpec, player: Player) -> impl Strategy<Value = BehavioralPolicy> {
    let sizes: Vec<usize> = game
        .infosets(player)
        .iter()
        .map(|x| x.num_actions())
        .collect();
    let total: usize = sizes.iter().sum();
    proptest::collection::vec(0.01f64..1.0, total).prop_map(move |raw| {
        let mut probs = Vec::with_capacity(sizes.len());
        let mut offset = 0;
        for &k in &sizes {
            let slice = &raw[offset..offset + k];
            let sum: f64 = slice.iter().sum();
            probs.push(slice.iter().map(|v| v / sum).collect());
            offset += k;
        }
        BehavioralPolicy::from_probs(player, probs)
    })
}

fn simplex_strategy(k: usize) -> impl Strategy<Value = SimplexPoint> {
    proptest::collection::vec(0.02f64..1.0, k).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        SimplexPoint::new(raw.into_iter().map(|v| v / sum).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Plans of arbitrary policies conserve flow, and strictly positive
    /// plans convert back to the policy they came from.
    #[test]
    fn plan_flow_and_round_trip(policy in policy_strategy(&build_kuhn(), Player::Min)) {
        let game = build_kuhn();
        let plan = realization_plan(&game, &policy).unwrap();
        plan.check_flow(&game, 1e-12).unwrap();
        let back = behavioral_from_plan(&game, &plan).unwrap();
        for x in game.infosets(Player::Min) {
            for pos in 0..x.num_actions() {
                prop_assert!((back.prob(x.id, pos) - policy.prob(x.id, pos)).abs() <= 1e-10);
            }
        }
    }

    /// The stabilized update lands on the simplex, attains exactly the value
    /// it reports, and never loses to the previous point or the anchor.
    #[test]
    fn stabilized_update_reports_its_own_minimum(
        prev in simplex_strategy(4),
        anchor in simplex_strategy(4),
        loss in proptest::collection::vec(-2.0f64..4.0, 4),
        inv in 0.2f64..4.0,
        bump in 0.0f64..2.0,
    ) {
        let step = StabilizedStep::new(loss, prev.clone(), anchor.clone(), inv, inv + bump).unwrap();
        let (point, q) = stabilized_simplex_update(&step);
        let sum: f64 = point.as_slice().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!((q - stabilized_objective(&step, &point)).abs() <= 1e-10);
        prop_assert!(q <= stabilized_objective(&step, &prev) + 1e-10);
        prop_assert!(q <= stabilized_objective(&step, &anchor) + 1e-10);
    }
}
