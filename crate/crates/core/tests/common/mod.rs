#![allow(dead_code)]

use hetgame_core::rational::from_ratio;
use hetgame_core::{GameSpec, Rational, StrategyProfile};
use proptest::prelude::*;

pub fn payoff_pair(coordination: bool) -> impl Strategy<Value = (Rational, Rational)> {
    (1i64..=12, 1i64..=6, 1i64..=12, 1i64..=6).prop_map(move |(a, b, c, d)| {
        let sign = if coordination { -1 } else { 1 };
        (from_ratio(sign * a, b), from_ratio(sign * c, d))
    })
}

pub fn spec_strategy(max_types: usize, max_count: u64) -> impl Strategy<Value = GameSpec> {
    (
        proptest::collection::vec(2u64..=max_count, 2..=max_types),
        any::<bool>(),
    )
        .prop_flat_map(|(counts, coordination)| {
            payoff_pair(coordination).prop_map(move |(y, z)| {
                GameSpec::from_counts(&counts, y, z).expect("valid by construction")
            })
        })
}

pub fn anti_spec_strategy(max_types: usize, max_count: u64) -> impl Strategy<Value = GameSpec> {
    proptest::collection::vec(2u64..=max_count, 2..=max_types).prop_flat_map(|counts| {
        payoff_pair(false).prop_map(move |(y, z)| GameSpec::from_counts(&counts, y, z).unwrap())
    })
}

pub fn profile_strategy(m: usize) -> impl Strategy<Value = StrategyProfile> {
    proptest::collection::vec((0i64..=12, 1i64..=12), m).prop_map(|pairs| {
        StrategyProfile::new(
            pairs
                .into_iter()
                .map(|(a, b)| from_ratio(a.min(b), b))
                .collect(),
        )
        .unwrap()
    })
}

pub fn spec_with_profiles(
    max_types: usize,
    max_count: u64,
) -> impl Strategy<Value = (GameSpec, StrategyProfile, StrategyProfile)> {
    spec_strategy(max_types, max_count).prop_flat_map(|spec| {
        let m = spec.num_types();
        (Just(spec), profile_strategy(m), profile_strategy(m))
    })
}
