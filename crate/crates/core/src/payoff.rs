//! Encounter probabilities, expected payoffs and the per-type incentive.
//!
//! Two expected-payoff routines are kept deliberately separate:
//! [`expected_payoff_direct`] is the literal double sum over encounters, and
//! [`expected_payoff_factored`] is the closed form linear in the focal
//! player's profile, written through [`incentive`]. They must agree exactly.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::{GameSpec, StrategyProfile};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type index {index} out of range for {m} types")]
pub struct TypeOutOfRange {
    pub index: usize,
    pub m: usize,
}

fn check_index(spec: &GameSpec, index: usize) -> Result<(), TypeOutOfRange> {
    if index < spec.num_types() {
        Ok(())
    } else {
        Err(TypeOutOfRange {
            index,
            m: spec.num_types(),
        })
    }
}

fn assert_len(spec: &GameSpec, profile: &StrategyProfile) {
    assert_eq!(
        profile.len(),
        spec.num_types(),
        "profile length must equal the number of types"
    );
}

/// Probability that a uniformly drawn focal individual has type `i` and the
/// opponent, drawn from the remaining `n - 1`, has type `j`.
pub fn encounter_probability(
    spec: &GameSpec,
    i: usize,
    j: usize,
) -> Result<Rational, TypeOutOfRange> {
    check_index(spec, i)?;
    check_index(spec, j)?;
    let n = BigInt::from(spec.n());
    let c_i = BigInt::from(spec.counts()[i]);
    let c_j = BigInt::from(spec.counts()[j]);
    let pairs = &n * (&n - 1u32);
    let favourable = if i == j {
        &c_i * (&c_i - 1u32)
    } else {
        c_i * c_j
    };
    Ok(Rational::new(favourable, pairs))
}

/// Payoff to the focal player cooperating with probability `alpha_j` against
/// an opponent cooperating with probability `beta_i`.
pub fn stage_payoff(alpha_j: &Rational, beta_i: &Rational, y: &Rational, z: &Rational) -> Rational {
    let one = Rational::one();
    y * alpha_j * (&one - beta_i) + z * (&one - alpha_j) * beta_i
}

/// Expected payoff of playing `alpha` against `beta`, as the double sum over
/// ordered encounters `(focal type i, opponent type j)`.
pub fn expected_payoff_direct(
    spec: &GameSpec,
    alpha: &StrategyProfile,
    beta: &StrategyProfile,
) -> Rational {
    assert_len(spec, alpha);
    assert_len(spec, beta);
    let (y, z) = (spec.y(), spec.z());
    let y_plus_z = y + z;
    let m = spec.num_types();
    let mut total = Rational::zero();
    for j in 0..m {
        for i in 0..m {
            let p = encounter_probability(spec, i, j).expect("indices in range");
            let a_j = alpha.get(j);
            let b_i = beta.get(i);
            let term = z * b_i + y * a_j - &y_plus_z * b_i * a_j;
            total += p * term;
        }
    }
    total
}

/// Incentive to cooperate against an opponent of type `j` when the opponent
/// plays `beta`: `(n-1) y + (y+z) beta_j - n (y+z) sum_i x_i beta_i`.
pub fn incentive(
    spec: &GameSpec,
    beta: &StrategyProfile,
    j: usize,
) -> Result<Rational, TypeOutOfRange> {
    check_index(spec, j)?;
    assert_len(spec, beta);
    let mean = population_mean(spec, beta);
    Ok(incentive_with_mean(spec, beta.get(j), &mean))
}

fn population_mean(spec: &GameSpec, beta: &StrategyProfile) -> Rational {
    spec.proportions()
        .iter()
        .zip(beta.alphas())
        .fold(Rational::zero(), |acc, (x, b)| acc + x * b)
}

fn incentive_with_mean(spec: &GameSpec, beta_j: &Rational, mean: &Rational) -> Rational {
    let n = Rational::from_integer(BigInt::from(spec.n()));
    let y_plus_z = spec.y() + spec.z();
    (&n - Rational::one()) * spec.y() + &y_plus_z * beta_j - n * y_plus_z * mean
}

/// The incentive for every type against a fixed opponent profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncentiveVector {
    pub values: Vec<Rational>,
}

pub fn incentives(spec: &GameSpec, beta: &StrategyProfile) -> IncentiveVector {
    assert_len(spec, beta);
    let mean = population_mean(spec, beta);
    IncentiveVector {
        values: beta
            .alphas()
            .iter()
            .map(|b| incentive_with_mean(spec, b, &mean))
            .collect(),
    }
}

/// Closed form of the expected payoff:
/// `z sum_j x_j beta_j + sum_j x_j / (n-1) * F_j(beta) * alpha_j`.
pub fn expected_payoff_factored(
    spec: &GameSpec,
    alpha: &StrategyProfile,
    beta: &StrategyProfile,
) -> Rational {
    assert_len(spec, alpha);
    let f = incentives(spec, beta);
    let n_minus_one = Rational::from_integer(BigInt::from(spec.n() - 1));
    let base = spec.z() * population_mean(spec, beta);
    let linear = spec
        .proportions()
        .iter()
        .zip(&f.values)
        .zip(alpha.alphas())
        .fold(Rational::zero(), |acc, ((x, f_j), a_j)| acc + x * f_j * a_j);
    base + linear / n_minus_one
}
