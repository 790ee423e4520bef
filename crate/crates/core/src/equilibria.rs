//! Constructive enumeration of symmetric equilibria and exact certification of
//! the best-response conditions.
//!
//! At a symmetric equilibrium every type receives 0, 1 or one common interior
//! value, so candidates come from three closed-form families: the uniform
//! profiles, one profile per ordered two-block partition, and one profile per
//! ordered three-block partition meeting two mass thresholds. Every emitted
//! record is re-certified through [`check_equilibrium_conditions`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    EquilibriumRecord, GameClass, GameSpec, OrderedPartition, Provenance, StrategyProfile,
};
use crate::partitions::ordered_partitions;
use crate::payoff::incentives;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThreeBlockCondition {
    /// Mass of the cooperate block must stay below `(1 - 1/n) zeta`.
    TopBlockMass,
    /// Mass of the defect block must stay below `(1 - 1/n) (1 - zeta)`.
    BottomBlockMass,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquilibriumError {
    #[error("discriminating equilibria exist only in anti-coordination games")]
    NotAntiCoordination,
    #[error("expected an ordered partition into {expected} blocks over {m} types")]
    InvalidPartition { expected: usize, m: usize },
    #[error("threshold condition {0:?} fails")]
    ConditionFailed(ThreeBlockCondition),
    #[error("closed-form profile {0} failed certification")]
    Uncertified(String),
}

impl EquilibriumError {
    pub fn kind(&self) -> &'static str {
        match self {
            EquilibriumError::NotAntiCoordination => "NotAntiCoordination",
            EquilibriumError::InvalidPartition { .. } => "InvalidPartition",
            EquilibriumError::ConditionFailed(_) => "ConditionFailed",
            EquilibriumError::Uncertified(_) => "Uncertified",
        }
    }
}

/// What the sign of the incentive must be for the type's probability to be a best response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Requirement {
    /// Probability 1: incentive must be >= 0.
    NonNegative,
    /// Probability 0: incentive must be <= 0.
    NonPositive,
    /// Interior probability: incentive must vanish.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCertificate {
    pub alpha: Rational,
    pub incentive: Rational,
    pub required: Requirement,
    pub satisfied: bool,
    /// Pure probability held with a zero incentive.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionsCertificate {
    pub types: Vec<TypeCertificate>,
    pub satisfied: bool,
    pub boundary: bool,
}

impl ConditionsCertificate {
    pub fn incentives(&self) -> Vec<Rational> {
        self.types.iter().map(|t| t.incentive.clone()).collect()
    }
}

/// Checks, type by type, that `profile` is a best response to itself.
pub fn check_equilibrium_conditions(
    spec: &GameSpec,
    profile: &StrategyProfile,
) -> ConditionsCertificate {
    let f = incentives(spec, profile);
    let types: Vec<TypeCertificate> = profile
        .alphas()
        .iter()
        .zip(f.values)
        .map(|(alpha, incentive)| {
            let (required, satisfied) = if alpha.is_one() {
                (Requirement::NonNegative, !incentive.is_negative())
            } else if alpha.is_zero() {
                (Requirement::NonPositive, !incentive.is_positive())
            } else {
                (Requirement::Zero, incentive.is_zero())
            };
            let boundary = satisfied && required != Requirement::Zero && incentive.is_zero();
            TypeCertificate {
                alpha: alpha.clone(),
                incentive,
                required,
                satisfied,
                boundary,
            }
        })
        .collect();
    ConditionsCertificate {
        satisfied: types.iter().all(|t| t.satisfied),
        boundary: types.iter().any(|t| t.boundary),
        types,
    }
}

/// Equilibria in which every opponent type is treated alike.
pub fn nondiscriminating_equilibria(spec: &GameSpec) -> Vec<EquilibriumRecord> {
    let m = spec.num_types();
    let mixed = EquilibriumRecord::new(
        StrategyProfile::uniform(m, spec.zeta().clone()),
        Provenance::UniformMixed,
        false,
    );
    match spec.class() {
        GameClass::Coordination => vec![
            EquilibriumRecord::new(
                StrategyProfile::uniform(m, Rational::zero()),
                Provenance::UniformDefect,
                false,
            ),
            EquilibriumRecord::new(
                StrategyProfile::uniform(m, Rational::one()),
                Provenance::UniformCooperate,
                false,
            ),
            mixed,
        ],
        GameClass::AntiCoordination => vec![mixed],
    }
}

fn big(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Threshold analysis of one ordered two-block partition `(low, high)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoBlockAnalysis {
    /// Mass of the high block.
    pub high_mass: Rational,
    /// `(1 - 1/n) zeta`.
    pub lower_threshold: Rational,
    /// `(1 - 1/n) zeta + 1/n`.
    pub upper_threshold: Rational,
    pub case: Provenance,
    pub boundary: bool,
    pub low_value: Rational,
    pub high_value: Rational,
}

fn require_anti_coordination(spec: &GameSpec) -> Result<(), EquilibriumError> {
    if spec.is_anti_coordination() {
        Ok(())
    } else {
        Err(EquilibriumError::NotAntiCoordination)
    }
}

fn require_blocks(
    spec: &GameSpec,
    partition: &OrderedPartition,
    expected: usize,
) -> Result<(), EquilibriumError> {
    if partition.len() == expected && partition.num_types() == spec.num_types() {
        Ok(())
    } else {
        Err(EquilibriumError::InvalidPartition {
            expected,
            m: spec.num_types(),
        })
    }
}

/// Locates the mass of the high block relative to the two thresholds and
/// evaluates the closed-form block values.
pub fn analyze_two_block(
    spec: &GameSpec,
    partition: &OrderedPartition,
) -> Result<TwoBlockAnalysis, EquilibriumError> {
    require_anti_coordination(spec)?;
    require_blocks(spec, partition, 2)?;
    let n = big(spec.n());
    let scaled_zeta = (&n - Rational::one()) * spec.zeta();
    let low_mass = spec.mass(partition.block(0));
    let high_mass = spec.mass(partition.block(1));
    let lower_threshold = &scaled_zeta / &n;
    let upper_threshold = &lower_threshold + Rational::one() / &n;

    let (case, boundary, low_value, high_value) = if high_mass < lower_threshold {
        let denominator = &n * &low_mass - Rational::one();
        assert!(
            denominator.is_positive(),
            "block mass keeps denominator positive"
        );
        let low = (&scaled_zeta - &n * &high_mass) / denominator;
        (Provenance::TwoBlockLowInterior, false, low, Rational::one())
    } else if high_mass > upper_threshold {
        let denominator = &n * &high_mass - Rational::one();
        assert!(
            denominator.is_positive(),
            "block mass keeps denominator positive"
        );
        let high = &scaled_zeta / denominator;
        (
            Provenance::TwoBlockHighInterior,
            false,
            Rational::zero(),
            high,
        )
    } else {
        // at either threshold the neighbouring interior formula degenerates to this pure profile
        let boundary = high_mass == lower_threshold || high_mass == upper_threshold;
        (
            Provenance::TwoBlockPure,
            boundary,
            Rational::zero(),
            Rational::one(),
        )
    };
    debug_assert!(low_value < high_value);
    Ok(TwoBlockAnalysis {
        high_mass,
        lower_threshold,
        upper_threshold,
        case,
        boundary,
        low_value,
        high_value,
    })
}

fn certified(
    spec: &GameSpec,
    profile: StrategyProfile,
    provenance: Provenance,
    boundary: bool,
) -> Result<EquilibriumRecord, EquilibriumError> {
    let certificate = check_equilibrium_conditions(spec, &profile);
    if !certificate.satisfied {
        return Err(EquilibriumError::Uncertified(profile.to_string()));
    }
    Ok(EquilibriumRecord::new(
        profile,
        provenance,
        boundary || certificate.boundary,
    ))
}

/// The unique equilibrium with values `alpha_low < alpha_high` on the ordered
/// two-block partition `(low, high)`.
pub fn two_partition_equilibrium(
    spec: &GameSpec,
    partition: &OrderedPartition,
) -> Result<EquilibriumRecord, EquilibriumError> {
    let analysis = analyze_two_block(spec, partition)?;
    let profile = StrategyProfile::from_blocks(
        partition,
        &[analysis.low_value.clone(), analysis.high_value.clone()],
    )
    .map_err(|e| EquilibriumError::Uncertified(e.to_string()))?;
    certified(spec, profile, analysis.case, analysis.boundary)
}

/// The equilibrium defecting against block 0, mixing against block 1 and
/// cooperating with block 2, when both mass thresholds hold.
pub fn three_partition_equilibrium(
    spec: &GameSpec,
    partition: &OrderedPartition,
) -> Result<EquilibriumRecord, EquilibriumError> {
    require_anti_coordination(spec)?;
    require_blocks(spec, partition, 3)?;
    let n = big(spec.n());
    let one = Rational::one();
    let bottom_mass = spec.mass(partition.block(0));
    let middle_mass = spec.mass(partition.block(1));
    let top_mass = spec.mass(partition.block(2));
    let top_threshold = (&n - Rational::one()) * spec.zeta() / &n;
    let bottom_threshold = (&n - Rational::one()) * (&one - spec.zeta()) / &n;

    if top_mass > top_threshold {
        return Err(EquilibriumError::ConditionFailed(
            ThreeBlockCondition::TopBlockMass,
        ));
    }
    if bottom_mass > bottom_threshold {
        return Err(EquilibriumError::ConditionFailed(
            ThreeBlockCondition::BottomBlockMass,
        ));
    }
    let boundary = top_mass == top_threshold || bottom_mass == bottom_threshold;

    // counts >= 2 give n * mass >= 2
    let denominator = &n * &middle_mass - Rational::one();
    assert!(denominator >= one, "middle block denominator must be >= 1");
    let middle = ((&n - Rational::one()) * spec.zeta() - &n * &top_mass) / denominator;
    debug_assert!(rational::is_unit_interval(&middle));

    let profile = StrategyProfile::from_blocks(partition, &[Rational::zero(), middle, one.clone()])
        .map_err(|e| EquilibriumError::Uncertified(e.to_string()))?;
    certified(spec, profile, Provenance::ThreeBlock, boundary)
}

/// Every symmetric equilibrium of the game, deduplicated by exact profile and
/// sorted lexicographically by profile.
pub fn enumerate_all(spec: &GameSpec) -> Vec<EquilibriumRecord> {
    let mut records = nondiscriminating_equilibria(spec);
    if spec.is_anti_coordination() {
        let m = spec.num_types();
        let two: Vec<OrderedPartition> = ordered_partitions(m, 2).collect();
        let three: Vec<OrderedPartition> = ordered_partitions(m, 3).collect();
        let two_records: Vec<EquilibriumRecord> = two
            .par_iter()
            .map(|p| {
                two_partition_equilibrium(spec, p)
                    .unwrap_or_else(|e| panic!("two-block family must always certify: {e}"))
            })
            .collect();
        let three_records: Vec<EquilibriumRecord> = three
            .par_iter()
            .filter_map(|p| match three_partition_equilibrium(spec, p) {
                Ok(record) => Some(record),
                Err(EquilibriumError::ConditionFailed(_)) => None,
                Err(e) => panic!("three-block family must certify when thresholds hold: {e}"),
            })
            .collect();
        records.extend(two_records);
        records.extend(three_records);
    }

    let mut merged: BTreeMap<StrategyProfile, EquilibriumRecord> = BTreeMap::new();
    for record in records {
        match merged.get_mut(&record.profile) {
            Some(existing) => {
                existing.provenance.extend(record.provenance);
                existing.boundary |= record.boundary;
            }
            None => {
                merged.insert(record.profile.clone(), record);
            }
        }
    }
    let out: Vec<EquilibriumRecord> = merged.into_values().collect();
    for record in &out {
        assert!(
            record.level <= 3,
            "no equilibrium treats more than three groups differently"
        );
        if spec.class() == GameClass::Coordination {
            assert_eq!(record.level, 1, "coordination games never discriminate");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_int, from_ratio};

    fn spec(counts: &[u64], y: i64, z: i64) -> GameSpec {
        GameSpec::from_counts(counts, from_int(y), from_int(z)).unwrap()
    }

    fn profile(values: &[(i64, i64)]) -> StrategyProfile {
        StrategyProfile::new(values.iter().map(|&(p, q)| from_ratio(p, q)).collect()).unwrap()
    }

    fn partition(blocks: &[&[usize]], m: usize) -> OrderedPartition {
        OrderedPartition::new(blocks.iter().map(|b| b.to_vec()).collect(), m).unwrap()
    }

    #[test]
    fn conditions_examples() {
        let s = spec(&[5, 5], 1, 1);
        let c = check_equilibrium_conditions(&s, &profile(&[(1, 2), (1, 2)]));
        assert!(c.satisfied && !c.boundary);
        assert_eq!(c.incentives(), vec![from_int(0), from_int(0)]);

        let c = check_equilibrium_conditions(&s, &profile(&[(0, 1), (1, 1)]));
        assert!(c.satisfied);
        assert_eq!(c.incentives(), vec![from_int(-1), from_int(1)]);

        let c = check_equilibrium_conditions(&s, &profile(&[(3, 10), (7, 10)]));
        assert!(!c.satisfied);
        assert_eq!(c.types[0].incentive, from_ratio(-2, 5));
        assert_eq!(c.types[0].required, Requirement::Zero);
    }

    #[test]
    fn uniform_equilibria() {
        let coord = nondiscriminating_equilibria(&spec(&[3, 4], -1, -1));
        let profiles: Vec<_> = coord.iter().map(|r| r.profile.clone()).collect();
        assert_eq!(
            profiles,
            vec![
                StrategyProfile::uniform(2, from_int(0)),
                StrategyProfile::uniform(2, from_int(1)),
                StrategyProfile::uniform(2, from_ratio(1, 2)),
            ]
        );
        let anti = nondiscriminating_equilibria(&spec(&[3, 4], 1, 1));
        assert_eq!(anti.len(), 1);
        assert_eq!(
            anti[0].profile,
            StrategyProfile::uniform(2, from_ratio(1, 2))
        );
        let anti = nondiscriminating_equilibria(&spec(&[3, 4], 1, 3));
        assert_eq!(
            anti[0].profile,
            StrategyProfile::uniform(2, from_ratio(1, 4))
        );
        assert!(anti.iter().all(|r| r.level == 1));
    }

    #[test]
    fn two_block_pure_case() {
        let s = spec(&[5, 5], 1, 1);
        let p = partition(&[&[0], &[1]], 2);
        let a = analyze_two_block(&s, &p).unwrap();
        assert_eq!(a.high_mass, from_ratio(1, 2));
        assert_eq!(a.lower_threshold, from_ratio(9, 20));
        assert_eq!(a.upper_threshold, from_ratio(11, 20));
        let r = two_partition_equilibrium(&s, &p).unwrap();
        assert_eq!(r.provenance, vec![Provenance::TwoBlockPure]);
        assert_eq!(r.profile, profile(&[(0, 1), (1, 1)]));
        assert!(!r.boundary);
    }

    #[test]
    fn two_block_interior_cases() {
        let s = spec(&[4, 4, 2], 1, 1);
        let r = two_partition_equilibrium(&s, &partition(&[&[0, 1], &[2]], 3)).unwrap();
        assert_eq!(r.provenance, vec![Provenance::TwoBlockLowInterior]);
        assert_eq!(r.profile, profile(&[(5, 14), (5, 14), (1, 1)]));

        let r = two_partition_equilibrium(&s, &partition(&[&[2], &[0, 1]], 3)).unwrap();
        assert_eq!(r.provenance, vec![Provenance::TwoBlockHighInterior]);
        assert_eq!(r.profile, profile(&[(9, 14), (9, 14), (0, 1)]));
    }

    #[test]
    fn two_block_errors() {
        let s = spec(&[4, 4, 2], -1, -1);
        let p = partition(&[&[0, 1], &[2]], 3);
        assert_eq!(
            two_partition_equilibrium(&s, &p),
            Err(EquilibriumError::NotAntiCoordination)
        );
        let s = spec(&[4, 4, 2], 1, 1);
        let p = partition(&[&[0], &[1], &[2]], 3);
        assert!(matches!(
            two_partition_equilibrium(&s, &p),
            Err(EquilibriumError::InvalidPartition { expected: 2, .. })
        ));
    }

    #[test]
    fn two_block_lower_threshold_is_boundary() {
        // n = 10, zeta = 5/9: lower threshold (9/10)(5/9) = 1/2 = mass of the high block
        let s = GameSpec::from_counts(&[5, 5], from_int(5), from_int(4)).unwrap();
        let r = two_partition_equilibrium(&s, &partition(&[&[0], &[1]], 2)).unwrap();
        assert_eq!(r.profile, profile(&[(0, 1), (1, 1)]));
        assert!(r.boundary);
        let c = check_equilibrium_conditions(&s, &r.profile);
        assert!(c.satisfied && c.boundary);
        assert!(c.types[0].incentive.is_zero());
    }

    #[test]
    fn two_block_upper_threshold_is_boundary() {
        // zeta = 4/9: upper threshold (9/10)(4/9) + 1/10 = 1/2
        let s = GameSpec::from_counts(&[5, 5], from_int(4), from_int(5)).unwrap();
        let r = two_partition_equilibrium(&s, &partition(&[&[0], &[1]], 2)).unwrap();
        assert_eq!(r.profile, profile(&[(0, 1), (1, 1)]));
        assert!(r.boundary);
    }

    #[test]
    fn three_block_examples() {
        let s = spec(&[4, 4, 2], 1, 1);
        let r = three_partition_equilibrium(&s, &partition(&[&[0], &[1], &[2]], 3)).unwrap();
        assert_eq!(r.profile, profile(&[(0, 1), (5, 6), (1, 1)]));
        assert_eq!(r.level, 3);

        let r = three_partition_equilibrium(&s, &partition(&[&[2], &[0], &[1]], 3)).unwrap();
        assert_eq!(r.profile, profile(&[(1, 6), (1, 1), (0, 1)]));
    }

    #[test]
    fn three_block_condition_failures() {
        // n = 10, zeta = 1/2, both thresholds 9/20; mass 1/2 fails
        let s = spec(&[5, 3, 2], 1, 1);
        assert_eq!(
            three_partition_equilibrium(&s, &partition(&[&[0], &[1], &[2]], 3)),
            Err(EquilibriumError::ConditionFailed(
                ThreeBlockCondition::BottomBlockMass
            ))
        );
        assert_eq!(
            three_partition_equilibrium(&s, &partition(&[&[1], &[2], &[0]], 3)),
            Err(EquilibriumError::ConditionFailed(
                ThreeBlockCondition::TopBlockMass
            ))
        );
    }

    #[test]
    fn three_block_threshold_equality_collapses_to_two_values() {
        // n = 10, zeta = 5/9: top threshold is exactly 1/2 = mass of the top block
        let s = GameSpec::from_counts(&[3, 2, 5], from_int(5), from_int(4)).unwrap();
        let r = three_partition_equilibrium(&s, &partition(&[&[0], &[1], &[2]], 3)).unwrap();
        assert!(r.boundary);
        assert_eq!(r.level, 2);
        assert_eq!(r.profile, profile(&[(0, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn enumerate_examples() {
        let s = spec(&[5, 5], 1, 1);
        let profiles: Vec<_> = enumerate_all(&s).into_iter().map(|r| r.profile).collect();
        assert_eq!(
            profiles,
            vec![
                profile(&[(0, 1), (1, 1)]),
                profile(&[(1, 2), (1, 2)]),
                profile(&[(1, 1), (0, 1)]),
            ]
        );

        let all = enumerate_all(&spec(&[4, 4, 2], 1, 1));
        assert_eq!(all.len(), 13);
        assert_eq!(all.iter().filter(|r| r.level == 1).count(), 1);
        assert_eq!(all.iter().filter(|r| r.level == 2).count(), 6);
        assert_eq!(all.iter().filter(|r| r.level == 3).count(), 6);

        let coord = enumerate_all(&spec(&[4, 4, 2], -2, -3));
        assert_eq!(coord.len(), 3);
        assert!(coord.iter().all(|r| r.level == 1));
    }

    #[test]
    fn duplicates_merge_provenance() {
        let s = GameSpec::from_counts(&[3, 2, 5], from_int(5), from_int(4)).unwrap();
        let all = enumerate_all(&s);
        let merged = all
            .iter()
            .find(|r| r.profile == profile(&[(0, 1), (0, 1), (1, 1)]))
            .unwrap();
        assert!(merged.boundary);
        assert!(merged.provenance.contains(&Provenance::TwoBlockPure));
        assert!(merged.provenance.contains(&Provenance::ThreeBlock));
        for r in &all {
            assert!(check_equilibrium_conditions(&s, &r.profile).satisfied);
        }
    }
}
