//! Household survey ingestion and village-level indicator aggregation.

mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use thiserror::Error;

use crate::model::{Aggregation, IndicatorCatalog, Source};
use crate::Scalar;

pub use schema::{FieldKind, SurveySchema};

pub const HOUSEHOLD_ID: &str = "household_id";
pub const VILLAGE_ID: &str = "village_id";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurveyError {
    #[error("survey is missing required column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: empty `{column}`")]
    EmptyId { line: u64, column: String },
    #[error("line {line}: household_id `{household_id}` already used on line {first_line}")]
    DuplicateHousehold { household_id: String, line: u64, first_line: u64 },
    #[error("line {line}, column `{column}`: `{value}` is not one of the allowed codes")]
    InvalidCategory { line: u64, column: String, value: String },
    #[error("line {line}, column `{column}`: `{value}` is not a valid {expected}")]
    InvalidValue { line: u64, column: String, value: String, expected: &'static str },
    #[error("survey field `{0}` has no entry in the survey schema")]
    UnknownField(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
}

impl From<csv::Error> for SurveyError {
    fn from(e: csv::Error) -> Self {
        SurveyError::Csv(e.to_string())
    }
}

pub type Result<T, E = SurveyError> = std::result::Result<T, E>;

/// A parsed cell. Missing answers are simply absent from the record.
#[derive(Debug, Clone, PartialEq)]
pub enum Answer {
    Count(u64),
    Number(f64),
    YesNo(bool),
    Code(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRecord {
    pub household_id: String,
    pub village_id: String,
    /// CSV line the record came from.
    pub line: u64,
    pub answers: BTreeMap<String, Answer>,
}

/// Raw indicator values for one unit, prior to normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitIndicatorValues<T> {
    pub unit_id: String,
    pub values: BTreeMap<String, Option<T>>,
    pub household_count: u64,
}

/// Columns read from a survey: every catalog survey field plus the
/// denominators ratio fields depend on.
pub fn survey_fields(catalog: &IndicatorCatalog, schema: &SurveySchema) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for def in catalog.indicators() {
        let Some(field) = &def.survey_field else { continue };
        let kind = schema.get(field).ok_or_else(|| SurveyError::UnknownField(field.clone()))?;
        if let FieldKind::MemberRatio { denominator, .. } = kind {
            if schema.get(denominator).is_none() {
                return Err(SurveyError::UnknownField(denominator.clone()));
            }
            out.insert(denominator.clone());
        }
        out.insert(field.clone());
    }
    Ok(out)
}

fn parse_answer(kind: &FieldKind, raw: &str, line: u64, column: &str) -> Result<Answer> {
    let invalid = |expected| SurveyError::InvalidValue {
        line,
        column: column.to_string(),
        value: raw.to_string(),
        expected,
    };
    if kind.is_count() {
        return raw.parse::<u64>().map(Answer::Count).map_err(|_| invalid("non-negative integer"));
    }
    if kind.is_numeric() {
        return match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Answer::Number(v)),
            _ => Err(invalid("number")),
        };
    }
    match kind {
        FieldKind::YesNo => match raw.to_ascii_lowercase().as_str() {
            "yes" | "y" | "true" | "1" => Ok(Answer::YesNo(true)),
            "no" | "n" | "false" | "0" => Ok(Answer::YesNo(false)),
            _ => Err(invalid("yes/no answer")),
        },
        FieldKind::Category { codes } => {
            let code = raw.to_lowercase();
            match codes.keys().find(|c| c.to_lowercase() == code) {
                Some(c) => Ok(Answer::Code(c.clone())),
                None => Err(SurveyError::InvalidCategory {
                    line,
                    column: column.to_string(),
                    value: raw.to_string(),
                }),
            }
        }
        _ => unreachable!("numeric kinds handled above"),
    }
}

/// Parses a survey CSV. Blank cells are missing answers; catalog survey
/// fields without a column are treated as missing for every household.
pub fn parse_survey_csv<R: Read>(
    reader: R,
    catalog: &IndicatorCatalog,
    schema: &SurveySchema,
) -> Result<Vec<SurveyRecord>> {
    let fields = survey_fields(catalog, schema)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let hh_col = column(HOUSEHOLD_ID).ok_or_else(|| SurveyError::MissingColumn(HOUSEHOLD_ID.into()))?;
    let village_col = column(VILLAGE_ID).ok_or_else(|| SurveyError::MissingColumn(VILLAGE_ID.into()))?;

    let mut read: Vec<(&str, &FieldKind, usize)> = Vec::new();
    for field in &fields {
        match column(field) {
            Some(i) => read.push((field, schema.get(field).expect("checked in survey_fields"), i)),
            None => log::warn!("survey has no `{field}` column; its indicators will be missing"),
        }
    }

    let mut seen: BTreeMap<String, u64> = BTreeMap::new();
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let cell = |i: usize| row.get(i).unwrap_or("");
        let household_id = cell(hh_col).to_string();
        let village_id = cell(village_col).to_string();
        for (id, col) in [(&household_id, HOUSEHOLD_ID), (&village_id, VILLAGE_ID)] {
            if id.is_empty() {
                return Err(SurveyError::EmptyId { line, column: col.into() });
            }
        }
        if let Some(&first_line) = seen.get(&household_id) {
            return Err(SurveyError::DuplicateHousehold { household_id, line, first_line });
        }
        seen.insert(household_id.clone(), line);

        let mut answers = BTreeMap::new();
        for &(field, kind, i) in &read {
            let raw = cell(i);
            if !raw.is_empty() {
                answers.insert(field.to_string(), parse_answer(kind, raw, line, field)?);
            }
        }
        records.push(SurveyRecord { household_id, village_id, line, answers });
    }
    Ok(records)
}

fn answer_number(answer: &Answer) -> f64 {
    match answer {
        Answer::Count(n) => *n as f64,
        Answer::Number(x) => *x,
        Answer::YesNo(b) => f64::from(u8::from(*b)),
        Answer::Code(_) => f64::NAN,
    }
}

/// Per-household value of one survey field, `None` when unanswered.
pub fn household_value(record: &SurveyRecord, field: &str, schema: &SurveySchema) -> Option<f64> {
    let answer = record.answers.get(field)?;
    let kind = schema.get(field)?;
    let indicator = |hit: bool| f64::from(u8::from(hit));
    match kind {
        FieldKind::Count | FieldKind::Number | FieldKind::YesNo => Some(answer_number(answer)),
        FieldKind::Category { codes } => match answer {
            Answer::Code(c) => codes.get(c).copied(),
            _ => None,
        },
        FieldKind::Below { threshold } => Some(indicator(answer_number(answer) < *threshold)),
        FieldKind::Outside { low, high } => {
            let v = answer_number(answer);
            Some(indicator(v < *low || v > *high))
        }
        FieldKind::MemberRatio { denominator, exclude_numerator } => {
            let n = answer_number(answer);
            let total = answer_number(record.answers.get(denominator)?);
            let rest = if *exclude_numerator { total - n } else { total };
            Some(n / rest.max(1.0))
        }
    }
}

/// Household-level values of every survey indicator in the catalog.
pub fn extract_household_indicators<T: Scalar>(
    record: &SurveyRecord,
    catalog: &IndicatorCatalog,
    schema: &SurveySchema,
) -> BTreeMap<String, Option<T>> {
    catalog
        .indicators()
        .iter()
        .filter_map(|def| {
            let field = def.survey_field.as_deref()?;
            Some((def.code.clone(), household_value(record, field, schema).map(T::of)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Acc<T> {
    n: u64,
    hits: u64,
    sum: T,
    min: T,
    max: T,
}

impl<T: Scalar> Acc<T> {
    fn empty() -> Self {
        Self { n: 0, hits: 0, sum: T::zero(), min: T::infinity(), max: T::neg_infinity() }
    }

    fn push(&mut self, v: T) {
        self.n += 1;
        self.hits += u64::from(v > T::zero());
        self.sum = self.sum + v;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.hits += o.hits;
        self.sum = self.sum + o.sum;
        self.min = self.min.min(o.min);
        self.max = self.max.max(o.max);
    }

    fn finish(&self, aggregation: Aggregation) -> Option<T> {
        if self.n == 0 {
            return None;
        }
        let n = T::of(self.n as f64);
        Some(match aggregation {
            Aggregation::MeanOverHouseholds => (self.sum / n).max(self.min).min(self.max),
            Aggregation::RatioCountOverTotal => T::of(self.hits as f64) / n,
            Aggregation::SumOverHouseholds => self.sum,
            Aggregation::ZonalMean | Aggregation::ZonalFraction => unreachable!("survey indicators only"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
struct UnitState<T> {
    households: u64,
    accs: Vec<Acc<T>>,
}

/// Order-independent, mergeable village aggregation of survey indicators.
#[derive(Debug, Clone)]
pub struct SurveyAggregator<'a, T> {
    schema: &'a SurveySchema,
    /// (code, survey field, aggregation) per survey indicator
    indicators: Vec<(String, String, Aggregation)>,
    units: BTreeMap<String, UnitState<T>>,
}

impl<'a, T: Scalar> SurveyAggregator<'a, T> {
    pub fn new(catalog: &IndicatorCatalog, schema: &'a SurveySchema) -> Self {
        let indicators = catalog
            .indicators()
            .iter()
            .filter(|d| d.source == Source::SurveyQuestion)
            .filter_map(|d| Some((d.code.clone(), d.survey_field.clone()?, d.aggregation)))
            .collect();
        Self { schema, indicators, units: BTreeMap::new() }
    }

    pub fn add(&mut self, record: &SurveyRecord) {
        let n = self.indicators.len();
        let state = self
            .units
            .entry(record.village_id.clone())
            .or_insert_with(|| UnitState { households: 0, accs: vec![Acc::empty(); n] });
        state.households += 1;
        for ((_, field, _), acc) in self.indicators.iter().zip(&mut state.accs) {
            if let Some(v) = household_value(record, field, self.schema) {
                acc.push(T::of(v));
            }
        }
    }

    /// Folds in another aggregator built from the same catalog and schema.
    pub fn merge(&mut self, other: &Self) {
        for (unit, o) in &other.units {
            match self.units.get_mut(unit) {
                Some(s) => {
                    s.households += o.households;
                    for (a, b) in s.accs.iter_mut().zip(&o.accs) {
                        a.merge(b);
                    }
                }
                None => {
                    self.units.insert(unit.clone(), o.clone());
                }
            }
        }
    }

    /// One entry per village with records, ordered by village id.
    pub fn finish(&self) -> Vec<UnitIndicatorValues<T>> {
        self.units
            .iter()
            .map(|(unit, s)| UnitIndicatorValues {
                unit_id: unit.clone(),
                household_count: s.households,
                values: self
                    .indicators
                    .iter()
                    .zip(&s.accs)
                    .map(|((code, _, agg), acc)| (code.clone(), acc.finish(*agg)))
                    .collect(),
            })
            .collect()
    }
}

pub fn aggregate_to_unit<T: Scalar>(
    records: &[SurveyRecord],
    catalog: &IndicatorCatalog,
    schema: &SurveySchema,
) -> Vec<UnitIndicatorValues<T>> {
    let mut agg = SurveyAggregator::new(catalog, schema);
    for r in records {
        agg.add(r);
    }
    agg.finish()
}
