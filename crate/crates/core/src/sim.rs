//! Seeded Monte Carlo estimate of the expected payoff under random matching.
//!
//! Each round draws a focal individual uniformly from the `n` members and an
//! opponent uniformly from the remaining `n - 1`, samples both actions and
//! scores the focal player.
//!
//! Reproducibility: rounds are cut into chunks of [`CHUNK_ROUNDS`]. Chunk `k`
//! uses ChaCha8 seeded with `seed_from_u64(seed)` on stream `k`. Chunk moments
//! are merged by a fixed pairwise tree, so the report depends only on
//! `(spec, profiles, rounds, seed)` and never on the number of worker threads.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{GameSpec, StrategyProfile};
use crate::payoff::{encounter_probability, expected_payoff_direct};
use crate::rational::{self, ExactValue, Rational};

pub const CHUNK_ROUNDS: u64 = 8192;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("at least one round is required")]
    ZeroRounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub rounds: u64,
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub seed: u64,
    #[serde(serialize_with = "serialize_exact")]
    pub analytic: Rational,
}

fn serialize_exact<S: serde::Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    ExactValue::from(value).serialize(s)
}

impl SimReport {
    /// Distance between the estimate and the exact payoff in standard errors.
    /// Zero when both coincide, infinite when they differ with zero spread.
    pub fn z_score(&self) -> f64 {
        let diff = (self.mean - rational::to_f64(&self.analytic)).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments {
        count: 0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let wb = b.count as f64 / count as f64;
        Moments {
            count,
            mean: a.mean + delta * wb,
            m2: a.m2 + b.m2 + delta * delta * a.count as f64 * wb,
        }
    }
}

fn tree_merge<T: Copy>(mut items: Vec<T>, empty: T, merge: impl Fn(T, T) -> T) -> T {
    if items.is_empty() {
        return empty;
    }
    while items.len() > 1 {
        items = items
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => merge(*a, *b),
                [a] => *a,
                _ => unreachable!(),
            })
            .collect();
    }
    items[0]
}

/// Maps an individual's index to its type via cumulative counts.
struct Population {
    n: u64,
    upper: Vec<u64>,
}

impl Population {
    fn new(spec: &GameSpec) -> Population {
        let upper = spec
            .counts()
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        Population { n: spec.n(), upper }
    }

    fn type_of(&self, individual: u64) -> usize {
        self.upper.partition_point(|&u| u <= individual)
    }

    /// Ordered (focal, opponent) pair of types, drawn without replacement.
    fn draw_pair(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let focal = rng.random_range(0..self.n);
        let mut opponent = rng.random_range(0..self.n - 1);
        if opponent >= focal {
            opponent += 1;
        }
        (self.type_of(focal), self.type_of(opponent))
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_sizes(rounds: u64) -> Vec<(u64, u64)> {
    let chunks = rounds.div_ceil(CHUNK_ROUNDS);
    (0..chunks)
        .map(|k| (k, CHUNK_ROUNDS.min(rounds - k * CHUNK_ROUNDS)))
        .collect()
}

fn to_probabilities(profile: &StrategyProfile) -> Vec<f64> {
    profile
        .alphas()
        .iter()
        .map(|a| a.to_f64().expect("finite probability"))
        .collect()
}

/// Estimates the payoff of playing `alpha` against `beta` under random matching.
pub fn simulate(
    spec: &GameSpec,
    alpha: &StrategyProfile,
    beta: &StrategyProfile,
    rounds: u64,
    seed: u64,
) -> Result<SimReport, SimError> {
    if rounds == 0 {
        return Err(SimError::ZeroRounds);
    }
    let population = Population::new(spec);
    let alpha_f = to_probabilities(alpha);
    let beta_f = to_probabilities(beta);
    let y = rational::to_f64(spec.y());
    let z = rational::to_f64(spec.z());

    let moments: Vec<Moments> = chunk_sizes(rounds)
        .into_par_iter()
        .map(|(chunk, size)| {
            let mut rng = chunk_rng(seed, chunk);
            let mut m = Moments::EMPTY;
            for _ in 0..size {
                let (focal, opponent) = population.draw_pair(&mut rng);
                let focal_cooperates = rng.random::<f64>() < alpha_f[opponent];
                let opponent_cooperates = rng.random::<f64>() < beta_f[focal];
                let score = match (focal_cooperates, opponent_cooperates) {
                    (true, false) => y,
                    (false, true) => z,
                    _ => 0.0,
                };
                m.push(score);
            }
            m
        })
        .collect();
    let total = tree_merge(moments, Moments::EMPTY, Moments::merge);
    let variance = if total.count > 1 {
        total.m2 / (total.count - 1) as f64
    } else {
        0.0
    };
    Ok(SimReport {
        rounds,
        mean: total.mean,
        stderr: (variance.max(0.0) / total.count as f64).sqrt(),
        seed,
        analytic: expected_payoff_direct(spec, alpha, beta),
    })
}

/// Tally of sampled ordered (focal type, opponent type) encounters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncounterFrequencies {
    pub rounds: u64,
    pub seed: u64,
    pub counts: Vec<Vec<u64>>,
}

impl EncounterFrequencies {
    pub fn frequency(&self, i: usize, j: usize) -> Rational {
        rational::from_ratio(self.counts[i][j] as i64, self.rounds as i64)
    }

    pub fn total(&self) -> Rational {
        let m = self.counts.len();
        (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .fold(Rational::from_integer(0.into()), |acc, (i, j)| {
                acc + self.frequency(i, j)
            })
    }

    /// Per-cell `|f - p| / sqrt(p (1 - p) / rounds)` against the exact
    /// encounter probabilities; zero-variance cells report 0 when exact and
    /// infinity otherwise.
    pub fn standardized_deviations(&self, spec: &GameSpec) -> Vec<Vec<f64>> {
        let m = self.counts.len();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let p = rational::to_f64(&encounter_probability(spec, i, j).unwrap());
                        let f = self.counts[i][j] as f64 / self.rounds as f64;
                        let se = (p * (1.0 - p) / self.rounds as f64).sqrt();
                        let diff = (f - p).abs();
                        if diff == 0.0 {
                            0.0
                        } else {
                            diff / se
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn empirical_encounter_frequencies(
    spec: &GameSpec,
    rounds: u64,
    seed: u64,
) -> Result<EncounterFrequencies, SimError> {
    if rounds == 0 {
        return Err(SimError::ZeroRounds);
    }
    let population = Population::new(spec);
    let m = spec.num_types();
    let tallies: Vec<Vec<u64>> = chunk_sizes(rounds)
        .into_par_iter()
        .map(|(chunk, size)| {
            let mut rng = chunk_rng(seed, chunk);
            let mut cells = vec![0u64; m * m];
            for _ in 0..size {
                let (focal, opponent) = population.draw_pair(&mut rng);
                cells[focal * m + opponent] += 1;
            }
            cells
        })
        .collect();
    let mut counts = vec![vec![0u64; m]; m];
    for cells in tallies {
        for (k, c) in cells.into_iter().enumerate() {
            counts[k / m][k % m] += c;
        }
    }
    Ok(EncounterFrequencies {
        rounds,
        seed,
        counts,
    })
}
