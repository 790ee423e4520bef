//! Random game and profile generators for randomized checks.

use num_bigint::BigInt;
use rand::Rng;

use crate::model::{GameClass, GameSpec, StrategyProfile};
use crate::rational::Rational;

/// A random valid game with `m` types and population at most `max_n`
/// (raised to `2m` if smaller). Payoff magnitudes are `p/q` with
/// `p in 1..=12`, `q in 1..=6`.
pub fn random_spec<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    max_n: u64,
    class: GameClass,
) -> GameSpec {
    assert!(m >= 2);
    let min_n = 2 * m as u64;
    let n = rng.random_range(min_n..=max_n.max(min_n));
    let mut counts = vec![2u64; m];
    for _ in 0..(n - min_n) {
        counts[rng.random_range(0..m)] += 1;
    }
    let mut payoff = || {
        Rational::new(
            BigInt::from(rng.random_range(1..=12i64)),
            BigInt::from(rng.random_range(1..=6i64)),
        )
    };
    let (mut y, mut z) = (payoff(), payoff());
    if class == GameClass::Coordination {
        y = -y;
        z = -z;
    }
    GameSpec::from_counts(&counts, y, z).expect("generated spec is valid")
}

/// Random profile with entries `k / d`, `d in 1..=max_den`.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, m: usize, max_den: i64) -> StrategyProfile {
    let alphas = (0..m)
        .map(|_| {
            let den = rng.random_range(1..=max_den);
            let num = rng.random_range(0..=den);
            Rational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect();
    StrategyProfile::new(alphas).expect("entries in [0, 1]")
}
