//! Independent verification of equilibria.
//!
//! Nothing here touches the closed-form payoff or the incentive function: all
//! payoffs come from [`expected_payoff_direct`], the literal sum over
//! encounters. Three searches are provided:
//!
//! * [`vertex_deviation_check`] compares a profile's self-play payoff with all
//!   `2^m` pure deviations. The payoff is linear in each coordinate of the
//!   deviating profile, so some vertex is always a best deviation.
//! * [`support_enumeration`] assigns each type to "defect", "cooperate" or
//!   "interior" (`3^m` patterns), solves the indifference system for the
//!   interior unknowns exactly and certifies the solution. Interior values are
//!   separate unknowns per type, so equal interior values are an outcome, not
//!   an assumption.
//! * [`grid_search_equilibria`] tries every profile on a per-type candidate
//!   grid `{0, 1/g, ..., 1} ∪ {zeta} ∪ {pattern solutions}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::equilibria::enumerate_all;
use crate::model::{GameClass, GameSpec, StrategyProfile};
use crate::payoff::{encounter_probability, expected_payoff_direct};
use crate::rational::{self, Rational};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid search needs {required} candidate profiles, above the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("grid resolution must be at least 1")]
    ZeroResolution,
    #[error("indifference system is singular for interior set {0:?}")]
    Degenerate(Vec<usize>),
}

/// Outcome of comparing a profile against every pure deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationVerdict {
    pub nash: bool,
    /// Self-play payoff of the profile.
    pub payoff: Rational,
    pub best_deviation: StrategyProfile,
    pub best_deviation_payoff: Rational,
    /// `best_deviation_payoff - payoff`; zero at an equilibrium, positive otherwise.
    pub gap: Rational,
}

pub fn vertex_deviation_check(spec: &GameSpec, profile: &StrategyProfile) -> DeviationVerdict {
    let m = spec.num_types();
    assert!(m < 64, "too many types for vertex enumeration");
    let payoff = expected_payoff_direct(spec, profile, profile);
    let mut best: Option<(StrategyProfile, Rational)> = None;
    for mask in 0..(1u64 << m) {
        let deviation = StrategyProfile::pure_from_mask(m, mask);
        let value = expected_payoff_direct(spec, &deviation, profile);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((deviation, value));
        }
    }
    let (best_deviation, best_deviation_payoff) = best.expect("at least one vertex");
    let gap = &best_deviation_payoff - &payoff;
    DeviationVerdict {
        nash: !gap.is_positive(),
        payoff,
        best_deviation,
        best_deviation_payoff,
        gap,
    }
}

/// Encounter probabilities and payoff constants needed to evaluate the gain
/// from raising one coordinate of the focal profile, read off the double sum.
struct GainModel {
    /// `c_j = y * sum_i p(i, j)`
    base: Vec<Rational>,
    /// `w[j][i] = (y + z) p(i, j)`
    weight: Vec<Vec<Rational>>,
}

impl GainModel {
    fn new(spec: &GameSpec) -> GainModel {
        let m = spec.num_types();
        let y_plus_z = spec.y() + spec.z();
        let mut base = Vec::with_capacity(m);
        let mut weight = Vec::with_capacity(m);
        for j in 0..m {
            let column: Vec<Rational> = (0..m)
                .map(|i| encounter_probability(spec, i, j).expect("in range"))
                .collect();
            let total = column.iter().fold(Rational::zero(), |a, p| a + p);
            base.push(spec.y() * total);
            weight.push(column.iter().map(|p| &y_plus_z * p).collect());
        }
        GainModel { base, weight }
    }

    /// Payoff change from moving `alpha_j` from 0 to 1 against `beta`.
    fn gain(&self, j: usize, beta: &[Rational]) -> Rational {
        self.weight[j]
            .iter()
            .zip(beta)
            .fold(self.base[j].clone(), |acc, (w, b)| acc - w * b)
    }

    fn is_best_response(&self, beta: &[Rational]) -> bool {
        beta.iter().enumerate().all(|(j, a)| {
            let g = self.gain(j, beta);
            if a.is_one() {
                !g.is_negative()
            } else if a.is_zero() {
                !g.is_positive()
            } else {
                g.is_zero()
            }
        })
    }
}

/// Payoff change from switching coordinate `j` of the focal profile from 0 to
/// 1 against `beta`, for every `j`, using two double-sum evaluations each.
pub fn coordinate_gains(spec: &GameSpec, beta: &StrategyProfile) -> Vec<Rational> {
    let m = spec.num_types();
    let zero = StrategyProfile::pure_from_mask(m, 0);
    let at_zero = expected_payoff_direct(spec, &zero, beta);
    (0..m)
        .map(|j| {
            let e_j = StrategyProfile::pure_from_mask(m, 1 << j);
            expected_payoff_direct(spec, &e_j, beta) - &at_zero
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Defect,
    Interior,
    Cooperate,
}

/// Solution of the indifference system for one support pattern.
struct PatternSolution {
    interior: Vec<usize>,
    values: Vec<Rational>,
    profile: Vec<Rational>,
}

fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (entry, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *entry -= &factor * p;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..k).map(|i| &b[i] / &a[i][i]).collect())
}

fn solve_patterns(spec: &GameSpec) -> Result<Vec<PatternSolution>, OracleError> {
    let m = spec.num_types();
    let model = GainModel::new(spec);
    let total = 3u64.pow(m as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let slots: Vec<Slot> = (0..m)
            .map(|_| {
                let s = match c % 3 {
                    0 => Slot::Defect,
                    1 => Slot::Interior,
                    _ => Slot::Cooperate,
                };
                c /= 3;
                s
            })
            .collect();
        let interior: Vec<usize> = (0..m).filter(|&t| slots[t] == Slot::Interior).collect();
        let base_profile: Vec<Rational> = slots
            .iter()
            .map(|s| match s {
                Slot::Cooperate => Rational::one(),
                _ => Rational::zero(),
            })
            .collect();
        if interior.is_empty() {
            out.push(PatternSolution {
                interior,
                values: Vec::new(),
                profile: base_profile,
            });
            continue;
        }
        // gains are affine in the interior unknowns: probe at 0 and at each unit vector
        let offset: Vec<Rational> = interior
            .iter()
            .map(|&j| model.gain(j, &base_profile))
            .collect();
        let mut matrix = vec![vec![Rational::zero(); interior.len()]; interior.len()];
        for (col, &k) in interior.iter().enumerate() {
            let mut probe = base_profile.clone();
            probe[k] = Rational::one();
            for (row, &j) in interior.iter().enumerate() {
                matrix[row][col] = model.gain(j, &probe) - &offset[row];
            }
        }
        let rhs: Vec<Rational> = offset.iter().map(|v| -v).collect();
        let values =
            solve_linear(matrix, rhs).ok_or_else(|| OracleError::Degenerate(interior.clone()))?;
        let mut profile = base_profile;
        for (&k, v) in interior.iter().zip(&values) {
            profile[k] = v.clone();
        }
        out.push(PatternSolution {
            interior,
            values,
            profile,
        });
    }
    Ok(out)
}

/// All symmetric equilibria, found by solving every support pattern exactly.
pub fn support_enumeration(spec: &GameSpec) -> Result<Vec<StrategyProfile>, OracleError> {
    let model = GainModel::new(spec);
    let mut found = BTreeSet::new();
    for solution in solve_patterns(spec)? {
        if !solution.values.iter().all(rational::is_interior)
            || !model.is_best_response(&solution.profile)
        {
            continue;
        }
        let profile = StrategyProfile::new(solution.profile).expect("entries in [0, 1]");
        if vertex_deviation_check(spec, &profile).nash {
            found.insert(profile);
        }
    }
    Ok(found.into_iter().collect())
}

/// Per-type candidate values for the grid search.
pub fn candidate_grid(spec: &GameSpec, resolution: u32) -> Result<Vec<Vec<Rational>>, OracleError> {
    if resolution == 0 {
        return Err(OracleError::ZeroResolution);
    }
    let m = spec.num_types();
    let g = BigInt::from(resolution);
    let mut base: BTreeSet<Rational> = (0..=resolution)
        .map(|k| Rational::new(BigInt::from(k), g.clone()))
        .collect();
    base.insert(spec.zeta().clone());
    let mut per_type = vec![base; m];
    for solution in solve_patterns(spec)? {
        for (&k, v) in solution.interior.iter().zip(&solution.values) {
            if rational::is_unit_interval(v) {
                per_type[k].insert(v.clone());
            }
        }
    }
    Ok(per_type
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect())
}

/// The gain screen of [`GainModel`] restricted to a fixed candidate grid and
/// scaled by a common positive denominator, so each gain is an integer sum of
/// precomputed per-coordinate terms that can be updated one coordinate at a
/// time.
struct GridScreen {
    /// Scaled `c_j`.
    base: Vec<BigInt>,
    /// `term[j][i][k]`: scaled `w[j][i] * grid[i][k]`.
    term: Vec<Vec<Vec<BigInt>>>,
    /// Requirement on the gain sign for each grid value.
    slot: Vec<Vec<Slot>>,
}

impl GridScreen {
    fn new(model: &GainModel, grid: &[Vec<Rational>]) -> GridScreen {
        let m = grid.len();
        let products: Vec<Vec<Vec<Rational>>> = (0..m)
            .map(|j| {
                (0..m)
                    .map(|i| grid[i].iter().map(|v| &model.weight[j][i] * v).collect())
                    .collect()
            })
            .collect();
        let scale = products
            .iter()
            .flatten()
            .flatten()
            .chain(&model.base)
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let scaled = |r: &Rational| r.numer() * (&scale / r.denom());
        GridScreen {
            base: model.base.iter().map(scaled).collect(),
            term: products
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|col| col.iter().map(scaled).collect())
                        .collect()
                })
                .collect(),
            slot: grid
                .iter()
                .map(|values| {
                    values
                        .iter()
                        .map(|v| {
                            if v.is_zero() {
                                Slot::Defect
                            } else if v.is_one() {
                                Slot::Cooperate
                            } else {
                                Slot::Interior
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Scaled gains at the grid point `index`.
    fn gains(&self, index: &[usize]) -> Vec<BigInt> {
        (0..index.len())
            .map(|j| {
                index
                    .iter()
                    .enumerate()
                    .fold(self.base[j].clone(), |acc, (i, &k)| {
                        acc - &self.term[j][i][k]
                    })
            })
            .collect()
    }

    fn shift(&self, gains: &mut [BigInt], i: usize, from: usize, to: usize) {
        for (j, g) in gains.iter_mut().enumerate() {
            *g += &self.term[j][i][from];
            *g -= &self.term[j][i][to];
        }
    }

    fn accepts(&self, gains: &[BigInt], index: &[usize]) -> bool {
        gains
            .iter()
            .zip(index)
            .enumerate()
            .all(|(j, (g, &k))| match self.slot[j][k] {
                Slot::Cooperate => !g.is_negative(),
                Slot::Defect => !g.is_positive(),
                Slot::Interior => g.is_zero(),
            })
    }
}

/// Every profile on the candidate grid that survives the deviation check.
pub fn grid_search_equilibria(
    spec: &GameSpec,
    resolution: u32,
    budget: u64,
) -> Result<Vec<StrategyProfile>, OracleError> {
    let grid = candidate_grid(spec, resolution)?;
    let required = grid.iter().map(|c| c.len() as u128).product::<u128>();
    if required > budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget });
    }
    let screen = GridScreen::new(&GainModel::new(spec), &grid);
    let m = grid.len();
    let last = m - 1;
    // one odometer over the first m - 1 types per value of the last type
    let mut found: Vec<StrategyProfile> = (0..grid[last].len())
        .into_par_iter()
        .flat_map_iter(|k_last| {
            let mut index = vec![0usize; m];
            index[last] = k_last;
            let mut gains = screen.gains(&index);
            let mut hits = Vec::new();
            loop {
                // the screen is exact; survivors are re-checked against all vertices
                if screen.accepts(&gains, &index) {
                    let values = index.iter().enumerate().map(|(t, &k)| grid[t][k].clone());
                    let profile =
                        StrategyProfile::new(values.collect()).expect("grid values in [0, 1]");
                    if vertex_deviation_check(spec, &profile).nash {
                        hits.push(profile);
                    }
                }
                let mut t = 0;
                loop {
                    if t == last {
                        return hits;
                    }
                    let from = index[t];
                    index[t] = if from + 1 < grid[t].len() {
                        from + 1
                    } else {
                        0
                    };
                    screen.shift(&mut gains, t, from, index[t]);
                    if index[t] != 0 {
                        break;
                    }
                    t += 1;
                }
            }
        })
        .collect();
    found.sort();
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub enumerated: Vec<StrategyProfile>,
    pub searched: Vec<StrategyProfile>,
    pub only_enumerated: Vec<StrategyProfile>,
    pub only_searched: Vec<StrategyProfile>,
}

impl CrossCheckReport {
    pub fn agree(&self) -> bool {
        self.only_enumerated.is_empty() && self.only_searched.is_empty()
    }

    fn compare(enumerated: Vec<StrategyProfile>, searched: Vec<StrategyProfile>) -> Self {
        let a: BTreeSet<_> = enumerated.iter().cloned().collect();
        let b: BTreeSet<_> = searched.iter().cloned().collect();
        CrossCheckReport {
            only_enumerated: a.difference(&b).cloned().collect(),
            only_searched: b.difference(&a).cloned().collect(),
            enumerated,
            searched,
        }
    }
}

pub fn cross_check(spec: &GameSpec, resolution: u32) -> Result<CrossCheckReport, OracleError> {
    cross_check_with_budget(spec, resolution, DEFAULT_BUDGET)
}

/// Compares the closed-form enumeration with the grid search.
pub fn cross_check_with_budget(
    spec: &GameSpec,
    resolution: u32,
    budget: u64,
) -> Result<CrossCheckReport, OracleError> {
    let searched = grid_search_equilibria(spec, resolution, budget)?;
    let enumerated = enumerate_all(spec).into_iter().map(|r| r.profile).collect();
    Ok(CrossCheckReport::compare(enumerated, searched))
}

/// Compares the closed-form enumeration with support enumeration.
pub fn cross_check_support(spec: &GameSpec) -> Result<CrossCheckReport, OracleError> {
    let searched = support_enumeration(spec)?;
    let enumerated = enumerate_all(spec).into_iter().map(|r| r.profile).collect();
    Ok(CrossCheckReport::compare(enumerated, searched))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// No equilibrium takes four or more distinct values.
    AtMostThreeValues,
    /// Coordination games only have non-discriminating equilibria.
    CoordinationUniform,
    /// At most one distinct interior value per equilibrium.
    SingleInteriorValue,
    /// Enumeration and oracle search return the same set.
    OracleAgreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Enumeration,
    SupportEnumeration,
    GridSearch,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyViolation {
    pub property: Property,
    pub source: Source,
    pub profile: Option<String>,
    /// Replayable game description.
    pub spec: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PropertyReport {
    pub specs_checked: usize,
    pub equilibria_checked: usize,
    pub grid_searches: usize,
    pub grid_skipped: usize,
    pub max_level: usize,
    pub violations: Vec<PropertyViolation>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StructuralCheckOptions {
    /// Also run the grid search at this resolution when it fits the budget.
    pub grid: Option<u32>,
    pub budget: u64,
}

impl Default for StructuralCheckOptions {
    fn default() -> Self {
        StructuralCheckOptions {
            grid: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

fn check_profiles(
    report: &mut PropertyReport,
    spec: &GameSpec,
    source: Source,
    profiles: &[StrategyProfile],
) {
    for profile in profiles {
        report.equilibria_checked += 1;
        let level = profile.distinct_values().len();
        report.max_level = report.max_level.max(level);
        let mut flag = |property| {
            report.violations.push(PropertyViolation {
                property,
                source,
                profile: Some(profile.to_string()),
                spec: spec.to_json_string(),
            })
        };
        if level >= 4 {
            flag(Property::AtMostThreeValues);
        }
        if spec.class() == GameClass::Coordination && level != 1 {
            flag(Property::CoordinationUniform);
        }
        if profile.interior_values().len() > 1 {
            flag(Property::SingleInteriorValue);
        }
    }
}

/// Samples `samples` games from `generator` and checks the structural
/// properties on both the enumeration and the independent searches.
pub fn structural_checks(
    mut generator: impl FnMut() -> GameSpec,
    samples: usize,
    options: StructuralCheckOptions,
) -> PropertyReport {
    let mut report = PropertyReport::default();
    for _ in 0..samples {
        let spec = generator();
        report.specs_checked += 1;
        let enumerated: Vec<StrategyProfile> = enumerate_all(&spec)
            .into_iter()
            .map(|r| r.profile)
            .collect();
        check_profiles(&mut report, &spec, Source::Enumeration, &enumerated);

        match support_enumeration(&spec) {
            Ok(found) => {
                check_profiles(&mut report, &spec, Source::SupportEnumeration, &found);
                if found != enumerated {
                    report.violations.push(PropertyViolation {
                        property: Property::OracleAgreement,
                        source: Source::SupportEnumeration,
                        profile: None,
                        spec: spec.to_json_string(),
                    });
                }
            }
            Err(_) => report.violations.push(PropertyViolation {
                property: Property::OracleAgreement,
                source: Source::SupportEnumeration,
                profile: None,
                spec: spec.to_json_string(),
            }),
        }

        if let Some(g) = options.grid {
            match grid_search_equilibria(&spec, g, options.budget) {
                Ok(found) => {
                    report.grid_searches += 1;
                    check_profiles(&mut report, &spec, Source::GridSearch, &found);
                    if found != enumerated {
                        report.violations.push(PropertyViolation {
                            property: Property::OracleAgreement,
                            source: Source::GridSearch,
                            profile: None,
                            spec: spec.to_json_string(),
                        });
                    }
                }
                Err(OracleError::BudgetExceeded { .. }) => report.grid_skipped += 1,
                Err(_) => report.violations.push(PropertyViolation {
                    property: Property::OracleAgreement,
                    source: Source::GridSearch,
                    profile: None,
                    spec: spec.to_json_string(),
                }),
            }
        }
    }
    report
}
