//! Game specifications, strategy profiles, ordered partitions of the type set
//! and certified equilibrium records.
//!
//! A game is a finite population of `n` individuals split into `m >= 2`
//! observable types. Every pair plays the normalized 2x2 game
//!
//! ```text
//!              Cooperate  Defect
//!   Cooperate      0         y
//!   Defect         z         0
//! ```
//!
//! with `y, z < 0` (coordination) or `y, z > 0` (anti-coordination).
//! Proportions are carried as integer counts so every derived quantity is an
//! exact rational.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("a game needs at least two types, got {m}")]
    TooFewTypes { m: usize },
    #[error(
        "type {label:?} has count {count}; every type needs at least 2 members and at most n-1"
    )]
    CountTooSmall { label: String, count: u64 },
    #[error("type counts sum to {sum} but n = {n}")]
    CountSumMismatch { sum: u64, n: u64 },
    #[error("payoffs y = {y}, z = {z} must be both negative (coordination) or both positive (anti-coordination)")]
    MixedSignPayoffs { y: String, z: String },
    #[error("duplicate type label {label:?}")]
    DuplicateLabel { label: String },
    #[error("malformed game description: {0}")]
    Malformed(String),
}

impl SpecError {
    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            SpecError::TooFewTypes { .. } => "TooFewTypes",
            SpecError::CountTooSmall { .. } => "CountTooSmall",
            SpecError::CountSumMismatch { .. } => "CountSumMismatch",
            SpecError::MixedSignPayoffs { .. } => "MixedSignPayoffs",
            SpecError::DuplicateLabel { .. } => "DuplicateLabel",
            SpecError::Malformed(_) => "Malformed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("profile has {got} entries but the game has {expected} types")]
    WrongLength { expected: usize, got: usize },
    #[error("entry {index} = {value} lies outside [0, 1]")]
    OutOfRange { index: usize, value: String },
}

impl ProfileError {
    pub fn kind(&self) -> &'static str {
        match self {
            ProfileError::WrongLength { .. } => "WrongLength",
            ProfileError::OutOfRange { .. } => "OutOfRange",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partition block {0} is empty")]
    EmptyBlock(usize),
    #[error("type {0} appears in more than one block")]
    Overlap(usize),
    #[error("type {0} is not covered by any block")]
    Uncovered(usize),
    #[error("type index {index} out of range for {m} types")]
    OutOfRange { index: usize, m: usize },
    #[error("expected {expected} blocks, got {got}")]
    WrongBlockCount { expected: usize, got: usize },
    #[error("unknown type label {0:?}")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameClass {
    Coordination,
    AntiCoordination,
}

/// A validated heterogeneous game. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    n: u64,
    labels: Vec<String>,
    counts: Vec<u64>,
    y: Rational,
    z: Rational,
    proportions: Vec<Rational>,
    zeta: Rational,
    class: GameClass,
}

impl GameSpec {
    /// Validates a game description: `types` is a list of `(label, count)`.
    pub fn new(
        n: u64,
        types: Vec<(String, u64)>,
        y: Rational,
        z: Rational,
    ) -> Result<GameSpec, SpecError> {
        let m = types.len();
        if m < 2 {
            return Err(SpecError::TooFewTypes { m });
        }
        let mut seen = BTreeSet::new();
        for (label, _) in &types {
            if !seen.insert(label.as_str()) {
                return Err(SpecError::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        for (label, count) in &types {
            if *count < 2 || *count + 1 > n {
                return Err(SpecError::CountTooSmall {
                    label: label.clone(),
                    count: *count,
                });
            }
        }
        let sum = types
            .iter()
            .try_fold(0u64, |acc, (_, c)| acc.checked_add(*c))
            .ok_or_else(|| SpecError::Malformed("type counts overflow".into()))?;
        if sum != n {
            return Err(SpecError::CountSumMismatch { sum, n });
        }
        let class = if y.is_negative() && z.is_negative() {
            GameClass::Coordination
        } else if y.is_positive() && z.is_positive() {
            GameClass::AntiCoordination
        } else {
            return Err(SpecError::MixedSignPayoffs {
                y: y.to_string(),
                z: z.to_string(),
            });
        };
        let (labels, counts): (Vec<_>, Vec<_>) = types.into_iter().unzip();
        let big_n = BigInt::from(n);
        let proportions = counts
            .iter()
            .map(|&c| Rational::new(BigInt::from(c), big_n.clone()))
            .collect();
        let zeta = &y / (&y + &z);
        Ok(GameSpec {
            n,
            labels,
            counts,
            y,
            z,
            proportions,
            zeta,
            class,
        })
    }

    /// Builds a spec from counts alone, labelling types `1..=m`.
    pub fn from_counts(counts: &[u64], y: Rational, z: Rational) -> Result<GameSpec, SpecError> {
        let n = counts.iter().sum();
        let types = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| ((i + 1).to_string(), c))
            .collect();
        GameSpec::new(n, types, y, z)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn num_types(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, t: usize) -> &str {
        &self.labels[t]
    }

    pub fn type_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn z(&self) -> &Rational {
        &self.z
    }

    /// `x_t = c_t / n`.
    pub fn proportion(&self, t: usize) -> &Rational {
        &self.proportions[t]
    }

    pub fn proportions(&self) -> &[Rational] {
        &self.proportions
    }

    /// Mixed equilibrium probability of the base game, `y / (y + z)`.
    pub fn zeta(&self) -> &Rational {
        &self.zeta
    }

    pub fn class(&self) -> GameClass {
        self.class
    }

    pub fn is_anti_coordination(&self) -> bool {
        self.class == GameClass::AntiCoordination
    }

    /// Total proportion of the given types.
    pub fn mass<'a>(&self, types: impl IntoIterator<Item = &'a usize>) -> Rational {
        types
            .into_iter()
            .fold(Rational::zero(), |acc, &t| acc + &self.proportions[t])
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<(), ProfileError> {
        if profile.len() != self.num_types() {
            return Err(ProfileError::WrongLength {
                expected: self.num_types(),
                got: profile.len(),
            });
        }
        Ok(())
    }

    /// Same population with payoffs replaced.
    pub fn with_payoffs(&self, y: Rational, z: Rational) -> Result<GameSpec, SpecError> {
        GameSpec::new(self.n, self.types(), y, z)
    }

    /// Same game with types reordered: new type `k` is old type `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> GameSpec {
        assert_eq!(perm.len(), self.num_types());
        let types = perm
            .iter()
            .map(|&old| (self.labels[old].clone(), self.counts[old]))
            .collect();
        GameSpec::new(self.n, types, self.y.clone(), self.z.clone())
            .expect("a permutation of a valid spec is valid")
    }

    fn types(&self) -> Vec<(String, u64)> {
        self.labels
            .iter()
            .cloned()
            .zip(self.counts.iter().copied())
            .collect()
    }

    pub fn to_json_spec(&self) -> SpecJson {
        SpecJson {
            n: self.n,
            types: self
                .types()
                .into_iter()
                .map(|(label, count)| TypeJson { label, count })
                .collect(),
            y: RationalJson::Text(self.y.to_string()),
            z: RationalJson::Text(self.z.to_string()),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json_spec()).expect("spec serializes")
    }
}

/// Parses and validates a game from a raw description.
pub fn validate_spec(raw: &SpecJson) -> Result<GameSpec, SpecError> {
    let y = raw.y.value("y")?;
    let z = raw.z.value("z")?;
    let types = raw
        .types
        .iter()
        .map(|t| (t.label.clone(), t.count))
        .collect();
    GameSpec::new(raw.n, types, y, z)
}

/// Parses a JSON game description and validates it.
pub fn spec_from_json(text: &str) -> Result<GameSpec, SpecError> {
    let raw: SpecJson =
        serde_json::from_str(text).map_err(|e| SpecError::Malformed(e.to_string()))?;
    validate_spec(&raw)
}

/// On-disk game description:
/// `{"n": 10, "types": [{"label": "A", "count": 5}, ...], "y": "1", "z": "1/2"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub n: u64,
    pub types: Vec<TypeJson>,
    pub y: RationalJson,
    pub z: RationalJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeJson {
    pub label: String,
    pub count: u64,
}

/// A rational written either as a string (`"p/q"`, `"0.25"`, `"3"`) or as a JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Text(String),
    Number(serde_json::Number),
}

impl RationalJson {
    fn value(&self, field: &str) -> Result<Rational, SpecError> {
        let text = match self {
            RationalJson::Text(s) => s.clone(),
            RationalJson::Number(n) => n.to_string(),
        };
        rational::parse_rational(&text).map_err(|e| SpecError::Malformed(format!("{field}: {e}")))
    }
}

/// One cooperation probability per opponent type, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyProfile(Vec<Rational>);

impl StrategyProfile {
    pub fn new(alphas: Vec<Rational>) -> Result<StrategyProfile, ProfileError> {
        for (index, a) in alphas.iter().enumerate() {
            if !rational::is_unit_interval(a) {
                return Err(ProfileError::OutOfRange {
                    index,
                    value: a.to_string(),
                });
            }
        }
        Ok(StrategyProfile(alphas))
    }

    pub fn uniform(m: usize, value: Rational) -> StrategyProfile {
        StrategyProfile::new(vec![value; m]).expect("uniform value must lie in [0, 1]")
    }

    /// Pure profile whose entry `t` is 1 iff bit `t` of `mask` is set.
    pub fn pure_from_mask(m: usize, mask: u64) -> StrategyProfile {
        StrategyProfile(
            (0..m)
                .map(|t| {
                    if mask >> t & 1 == 1 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        )
    }

    /// Profile assigning `block_values[k]` to every type in block `k`.
    pub fn from_blocks(
        partition: &OrderedPartition,
        block_values: &[Rational],
    ) -> Result<StrategyProfile, ProfileError> {
        assert_eq!(partition.len(), block_values.len());
        let mut alphas = vec![Rational::zero(); partition.num_types()];
        for (block, value) in partition.blocks().iter().zip(block_values) {
            for &t in block {
                alphas[t] = value.clone();
            }
        }
        StrategyProfile::new(alphas)
    }

    pub fn parse(input: &str) -> Result<StrategyProfile, String> {
        let alphas = rational::parse_rational_list(input).map_err(|e| e.to_string())?;
        StrategyProfile::new(alphas).map_err(|e| e.to_string())
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, t: usize) -> &Rational {
        &self.0[t]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Relabels types: new entry `k` is old entry `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> StrategyProfile {
        StrategyProfile(perm.iter().map(|&old| self.0[old].clone()).collect())
    }

    /// Distinct values strictly inside (0, 1).
    pub fn interior_values(&self) -> BTreeSet<&Rational> {
        self.0.iter().filter(|a| rational::is_interior(a)).collect()
    }

    pub fn distinct_values(&self) -> BTreeSet<&Rational> {
        self.0.iter().collect()
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().all(|a| a.is_zero() || a.is_one())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(rational::to_fraction_string).collect()
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_strings().join(","))
    }
}

/// Ordered sequence of disjoint, non-empty type blocks covering all types.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedPartition {
    blocks: Vec<Vec<usize>>,
    m: usize,
}

impl OrderedPartition {
    pub fn new(blocks: Vec<Vec<usize>>, m: usize) -> Result<OrderedPartition, PartitionError> {
        let mut owner = vec![None; m];
        for (k, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock(k));
            }
            for &t in block {
                if t >= m {
                    return Err(PartitionError::OutOfRange { index: t, m });
                }
                if owner[t].replace(k).is_some() {
                    return Err(PartitionError::Overlap(t));
                }
            }
        }
        if let Some(t) = owner.iter().position(Option::is_none) {
            return Err(PartitionError::Uncovered(t));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(OrderedPartition { blocks, m })
    }

    /// Builds a partition from a block assignment `assignment[t] = block of t`.
    pub fn from_assignment(
        assignment: &[usize],
        num_blocks: usize,
    ) -> Result<OrderedPartition, PartitionError> {
        let mut blocks = vec![Vec::new(); num_blocks];
        for (t, &k) in assignment.iter().enumerate() {
            if k >= num_blocks {
                return Err(PartitionError::WrongBlockCount {
                    expected: num_blocks,
                    got: k + 1,
                });
            }
            blocks[k].push(t);
        }
        OrderedPartition::new(blocks, assignment.len())
    }

    /// Two-block partition `(complement of second, second)` from type labels.
    pub fn two_blocks_from_labels(
        spec: &GameSpec,
        second: &[&str],
    ) -> Result<OrderedPartition, PartitionError> {
        let mut in_second = vec![false; spec.num_types()];
        for label in second {
            let t = spec
                .type_index(label)
                .ok_or_else(|| PartitionError::UnknownLabel(label.to_string()))?;
            in_second[t] = true;
        }
        let assignment: Vec<usize> = in_second.iter().map(|&b| usize::from(b)).collect();
        OrderedPartition::from_assignment(&assignment, 2)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn num_types(&self) -> usize {
        self.m
    }

    pub fn permuted(&self, perm: &[usize]) -> OrderedPartition {
        let mut new_index = vec![0; self.m];
        for (new, &old) in perm.iter().enumerate() {
            new_index[old] = new;
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&t| new_index[t]).collect())
            .collect();
        OrderedPartition::new(blocks, self.m).expect("relabeled partition stays valid")
    }

    pub fn labelled(&self, spec: &GameSpec) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&t| spec.label(t).to_string()).collect())
            .collect()
    }

    /// Renders as `{A,B}|{C}`.
    pub fn render(&self, spec: &GameSpec) -> String {
        self.labelled(spec)
            .iter()
            .map(|b| format!("{{{}}}", b.join(",")))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Number of distinct values in the profile, with types grouped by value in ascending order.
pub fn discrimination_level(profile: &StrategyProfile) -> (usize, OrderedPartition) {
    let values: Vec<&Rational> = profile.distinct_values().into_iter().collect();
    let assignment: Vec<usize> = profile
        .alphas()
        .iter()
        .map(|a| values.binary_search(&a).expect("value present"))
        .collect();
    let partition = OrderedPartition::from_assignment(&assignment, values.len())
        .expect("grouping by value covers every type");
    (values.len(), partition)
}

/// Which closed-form family produced an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Everyone defects against everyone (coordination only).
    UniformDefect,
    /// Everyone cooperates with everyone (coordination only).
    UniformCooperate,
    /// Everyone plays the base-game mixture `zeta`.
    UniformMixed,
    /// Two blocks: interior value on the low block, cooperate with the high block.
    TwoBlockLowInterior,
    /// Two blocks: defect against the low block, cooperate with the high block.
    TwoBlockPure,
    /// Two blocks: defect against the low block, interior value on the high block.
    TwoBlockHighInterior,
    /// Three blocks: defect, interior value, cooperate.
    ThreeBlock,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::UniformDefect => "uniform-defect",
            Provenance::UniformCooperate => "uniform-cooperate",
            Provenance::UniformMixed => "uniform-mixed",
            Provenance::TwoBlockLowInterior => "two-block-low-interior",
            Provenance::TwoBlockPure => "two-block-pure",
            Provenance::TwoBlockHighInterior => "two-block-high-interior",
            Provenance::ThreeBlock => "three-block",
        }
    }

    pub fn parse(s: &str) -> Option<Provenance> {
        [
            Provenance::UniformDefect,
            Provenance::UniformCooperate,
            Provenance::UniformMixed,
            Provenance::TwoBlockLowInterior,
            Provenance::TwoBlockPure,
            Provenance::TwoBlockHighInterior,
            Provenance::ThreeBlock,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A certified symmetric equilibrium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumRecord {
    pub profile: StrategyProfile,
    pub level: usize,
    /// Types grouped by equilibrium value, ascending.
    pub partition: OrderedPartition,
    pub provenance: Vec<Provenance>,
    /// Set when a strict threshold condition held with equality.
    pub boundary: bool,
}

impl EquilibriumRecord {
    pub fn new(profile: StrategyProfile, provenance: Provenance, boundary: bool) -> Self {
        let (level, partition) = discrimination_level(&profile);
        EquilibriumRecord {
            profile,
            level,
            partition,
            provenance: vec![provenance],
            boundary,
        }
    }
}
