//! JSON and CSV renderings of equilibrium records and certificates.
//!
//! Exact values always appear as lowest-terms `p/q` strings; JSON adds a
//! 15-significant-digit decimal next to each one.

use serde::{Deserialize, Serialize};

use crate::equilibria::{ConditionsCertificate, Requirement};
use crate::model::{EquilibriumRecord, GameSpec, Provenance, SpecJson, StrategyProfile};
use crate::oracle::DeviationVerdict;
use crate::rational::{self, ExactValue, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordJson {
    pub profile: Vec<ExactValue>,
    pub level: usize,
    /// Blocks of type labels, ascending by equilibrium value.
    pub partition: Vec<Vec<String>>,
    pub provenance: Vec<Provenance>,
    pub boundary: bool,
}

impl RecordJson {
    pub fn new(spec: &GameSpec, record: &EquilibriumRecord) -> RecordJson {
        RecordJson {
            profile: record
                .profile
                .alphas()
                .iter()
                .map(ExactValue::from)
                .collect(),
            level: record.level,
            partition: record.partition.labelled(spec),
            provenance: record.provenance.clone(),
            boundary: record.boundary,
        }
    }

    /// The profile as a comma-separated exact list, accepted by `verify`.
    pub fn profile_string(&self) -> String {
        self.profile
            .iter()
            .map(|v| v.exact.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn profile_values(&self) -> Result<StrategyProfile, String> {
        StrategyProfile::parse(&self.profile_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub spec: SpecJson,
    pub types: Vec<String>,
    pub zeta: ExactValue,
    pub count: usize,
    pub equilibria: Vec<RecordJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckJson {
    pub resolution: u32,
    pub agree: bool,
    pub searched: usize,
    pub only_enumerated: Vec<String>,
    pub only_searched: Vec<String>,
}

impl EnumerationReport {
    pub fn new(spec: &GameSpec, records: &[EquilibriumRecord]) -> EnumerationReport {
        EnumerationReport {
            spec: spec.to_json_spec(),
            types: spec.labels().to_vec(),
            zeta: ExactValue::from(spec.zeta()),
            count: records.len(),
            equilibria: records.iter().map(|r| RecordJson::new(spec, r)).collect(),
            cross_check: None,
        }
    }
}

pub fn records_csv(spec: &GameSpec, records: &[EquilibriumRecord]) -> Result<String, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = spec.labels().iter().map(|l| format!("alpha_{l}")).collect();
    header.extend(["level", "partition", "provenance", "boundary"].map(String::from));
    writer.write_record(&header)?;
    for record in records {
        let mut row = record.profile.to_strings();
        row.push(record.level.to_string());
        row.push(record.partition.render(spec));
        row.push(
            record
                .provenance
                .iter()
                .map(|p| p.as_str())
                .collect::<Vec<_>>()
                .join(";"),
        );
        row.push(record.boundary.to_string());
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCertificateJson {
    pub label: String,
    pub alpha: ExactValue,
    pub incentive: ExactValue,
    pub required: Requirement,
    pub satisfied: bool,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionsJson {
    pub satisfied: bool,
    pub boundary: bool,
    pub types: Vec<TypeCertificateJson>,
}

impl ConditionsJson {
    pub fn new(spec: &GameSpec, certificate: &ConditionsCertificate) -> ConditionsJson {
        ConditionsJson {
            satisfied: certificate.satisfied,
            boundary: certificate.boundary,
            types: certificate
                .types
                .iter()
                .enumerate()
                .map(|(t, c)| TypeCertificateJson {
                    label: spec.label(t).to_string(),
                    alpha: ExactValue::from(&c.alpha),
                    incentive: ExactValue::from(&c.incentive),
                    required: c.required,
                    satisfied: c.satisfied,
                    boundary: c.boundary,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationJson {
    pub nash: bool,
    pub payoff: ExactValue,
    pub best_deviation: Vec<String>,
    pub best_deviation_payoff: ExactValue,
    pub gap: ExactValue,
}

impl From<&DeviationVerdict> for DeviationJson {
    fn from(v: &DeviationVerdict) -> Self {
        DeviationJson {
            nash: v.nash,
            payoff: ExactValue::from(&v.payoff),
            best_deviation: v.best_deviation.to_strings(),
            best_deviation_payoff: ExactValue::from(&v.best_deviation_payoff),
            gap: ExactValue::from(&v.gap),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub profile: Vec<ExactValue>,
    pub equilibrium: bool,
    pub conditions: ConditionsJson,
    pub deviation: DeviationJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffReport {
    pub alpha: Vec<ExactValue>,
    pub beta: Vec<ExactValue>,
    pub direct: ExactValue,
    pub factored: ExactValue,
    pub agree: bool,
    pub incentives: Vec<ExactValue>,
}

pub fn exact_list(values: &[Rational]) -> Vec<ExactValue> {
    values.iter().map(ExactValue::from).collect()
}

pub fn decimal(value: &Rational) -> String {
    rational::to_decimal_string(value)
}
