//! Sweep of the two-block threshold structure as `zeta` varies.
//!
//! `z` is held fixed and `y` steps linearly from `y_min` to `y_max`; each row
//! reports where the high block's mass sits relative to the two thresholds and
//! the resulting block values.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::equilibria::{analyze_two_block, EquilibriumError};
use crate::model::{GameSpec, OrderedPartition, Provenance, SpecError};
use crate::rational::{self, Rational};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("at least one step is required")]
    ZeroSteps,
    #[error("sweep range must be positive and ordered, got [{0}, {1}]")]
    BadRange(String, String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub y: Rational,
    pub zeta: Rational,
    pub high_mass: Rational,
    pub lower_threshold: Rational,
    pub upper_threshold: Rational,
    pub case: Provenance,
    pub boundary: bool,
    pub low_value: Rational,
    pub high_value: Rational,
}

pub fn sweep(
    spec: &GameSpec,
    partition: &OrderedPartition,
    y_min: &Rational,
    y_max: &Rational,
    steps: u32,
) -> Result<Vec<SweepRow>, SweepError> {
    if steps == 0 {
        return Err(SweepError::ZeroSteps);
    }
    if !y_min.is_positive() || y_max < y_min {
        return Err(SweepError::BadRange(y_min.to_string(), y_max.to_string()));
    }
    // validate orientation and game class once, before varying y
    analyze_two_block(spec, partition)?;
    let step = if steps == 1 {
        Rational::zero()
    } else {
        (y_max - y_min) / Rational::from_integer(BigInt::from(steps - 1))
    };
    (0..steps)
        .map(|k| {
            let y = y_min + &step * Rational::from_integer(BigInt::from(k));
            let game = spec.with_payoffs(y.clone(), spec.z().clone())?;
            let a = analyze_two_block(&game, partition)?;
            Ok(SweepRow {
                y,
                zeta: game.zeta().clone(),
                high_mass: a.high_mass,
                lower_threshold: a.lower_threshold,
                upper_threshold: a.upper_threshold,
                case: a.case,
                boundary: a.boundary,
                low_value: a.low_value,
                high_value: a.high_value,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "y",
        "zeta",
        "zeta_decimal",
        "high_mass",
        "lower_threshold",
        "upper_threshold",
        "case",
        "boundary",
        "alpha_low",
        "alpha_high",
    ])?;
    for row in rows {
        writer.write_record([
            row.y.to_string(),
            row.zeta.to_string(),
            rational::to_decimal_string(&row.zeta),
            row.high_mass.to_string(),
            row.lower_threshold.to_string(),
            row.upper_threshold.to_string(),
            row.case.as_str().to_string(),
            row.boundary.to_string(),
            row.low_value.to_string(),
            row.high_value.to_string(),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_int, from_ratio};

    fn setup() -> (GameSpec, OrderedPartition) {
        let spec = GameSpec::from_counts(&[5, 5], from_int(1), from_int(1)).unwrap();
        let partition = OrderedPartition::two_blocks_from_labels(&spec, &["2"]).unwrap();
        (spec, partition)
    }

    #[test]
    fn case_flips_exactly_at_the_threshold_zetas() {
        let (spec, partition) = setup();
        // y = 1/10 + k/40: hits y = 4/5 (zeta = 4/9) at k = 28 and y = 5/4 (zeta = 5/9) at k = 46
        let rows = sweep(&spec, &partition, &from_ratio(1, 10), &from_int(10), 397).unwrap();
        assert_eq!(rows.len(), 397);
        let low = from_ratio(4, 9);
        let high = from_ratio(5, 9);
        for row in &rows {
            let expected = if row.zeta < low {
                Provenance::TwoBlockHighInterior
            } else if row.zeta > high {
                Provenance::TwoBlockLowInterior
            } else {
                Provenance::TwoBlockPure
            };
            assert_eq!(row.case, expected, "zeta = {}", row.zeta);
            assert_eq!(row.boundary, row.zeta == low || row.zeta == high);
        }
        assert_eq!(rows[28].y, from_ratio(4, 5));
        assert!(rows[28].boundary);
        assert_eq!(rows[46].y, from_ratio(5, 4));
        assert!(rows[46].boundary);
        let flips: Vec<usize> = rows
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].case != w[1].case)
            .map(|(k, _)| k)
            .collect();
        assert_eq!(flips, vec![27, 46]);
    }

    #[test]
    fn single_step_has_no_transition() {
        let (spec, partition) = setup();
        let rows = sweep(&spec, &partition, &from_ratio(1, 10), &from_int(10), 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].y, from_ratio(1, 10));
    }

    #[test]
    fn rejects_bad_inputs() {
        let (spec, partition) = setup();
        assert!(matches!(
            sweep(&spec, &partition, &from_int(1), &from_int(2), 0),
            Err(SweepError::ZeroSteps)
        ));
        assert!(matches!(
            sweep(&spec, &partition, &from_int(2), &from_int(1), 3),
            Err(SweepError::BadRange(..))
        ));
        let coord = GameSpec::from_counts(&[5, 5], from_int(-1), from_int(-1)).unwrap();
        assert!(matches!(
            sweep(&coord, &partition, &from_int(1), &from_int(2), 3),
            Err(SweepError::Equilibrium(
                EquilibriumError::NotAntiCoordination
            ))
        ));
    }
}
