//! Statistical checks of the random-matching simulator. These are stochastic
//! in principle but run on fixed seeds, so they are reproducible.

use hetgame_core::payoff::encounter_probability;
use hetgame_core::rational::{from_int, from_ratio, to_f64};
use hetgame_core::sim::{empirical_encounter_frequencies, simulate};
use hetgame_core::{GameSpec, StrategyProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROUNDS: u64 = 100_000;

fn spec(counts: &[u64]) -> GameSpec {
    GameSpec::from_counts(counts, from_int(1), from_int(1)).unwrap()
}

#[test]
fn mean_payoff_within_three_standard_errors() {
    let cases = [
        (
            spec(&[5, 5]),
            StrategyProfile::uniform(2, from_ratio(1, 2)),
            1u64,
        ),
        (
            spec(&[4, 4, 2]),
            StrategyProfile::new(vec![from_int(0), from_ratio(5, 6), from_int(1)]).unwrap(),
            2,
        ),
    ];
    for (s, p, seed) in cases {
        let r = simulate(&s, &p, &p, ROUNDS, seed).unwrap();
        assert!(r.stderr > 0.0);
        assert!(r.z_score() <= 3.0, "z = {} for {p}", r.z_score());
    }
    let r = simulate(
        &spec(&[5, 5]),
        &StrategyProfile::uniform(2, from_ratio(1, 2)),
        &StrategyProfile::uniform(2, from_ratio(1, 2)),
        10,
        0,
    )
    .unwrap();
    assert_eq!(r.analytic, from_ratio(1, 2));
}

#[test]
fn encounter_cells_within_three_binomial_errors() {
    for (counts, seed) in [(vec![5u64, 5], 3u64), (vec![2, 2], 4), (vec![4, 4, 2], 5)] {
        let s = spec(&counts);
        let f = empirical_encounter_frequencies(&s, ROUNDS, seed).unwrap();
        assert_eq!(f.total(), from_int(1));
        for row in f.standardized_deviations(&s) {
            for z in row {
                assert!(z <= 3.0, "cell deviates by {z} SE for {counts:?}");
            }
        }
    }
}

/// Drawing the opponent with replacement gives `x_i^2` on the diagonal, which
/// at n = 4 is 1/4 instead of 1/6; the band check must catch that.
#[test]
fn with_replacement_sampling_fails_the_diagonal_check() {
    let s = spec(&[2, 2]);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut diagonal = 0u64;
    for _ in 0..ROUNDS {
        let focal = rng.random_range(0..4u64) / 2;
        let opponent = rng.random_range(0..4u64) / 2;
        if focal == 0 && opponent == 0 {
            diagonal += 1;
        }
    }
    let p = to_f64(&encounter_probability(&s, 0, 0).unwrap());
    assert_eq!(p, 1.0 / 6.0);
    let se = (p * (1.0 - p) / ROUNDS as f64).sqrt();
    let z = (diagonal as f64 / ROUNDS as f64 - p).abs() / se;
    assert!(z > 3.0, "with-replacement bias went unnoticed: z = {z}");

    let f = empirical_encounter_frequencies(&s, ROUNDS, 6).unwrap();
    assert!(f.standardized_deviations(&s)[0][0] <= 3.0);
}
