//! Indicator taxonomy and user weights.
//!
//! A catalog is an ordered list of indicators, each placed on a
//! determinant → component → subcomponent path. Weights are attached to every
//! node of that tree and must form a convex combination within each sibling
//! group.

mod catalog;
mod weights;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{
    default_catalog, load_catalog, CatalogTree, ComponentNode, DeterminantNode, IndicatorCatalog,
    IndicatorDefinition, SubcomponentNode,
};
pub use weights::{
    default_weights, validate_weights, ComponentWeights, DeterminantWeights, SubcomponentWeights,
    WeightConfig, WeightDocument, WEIGHT_SUM_TOLERANCE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("catalog document is not valid JSON: {0}")]
    Syntax(String),
    #[error("line {line}: duplicate indicator code `{code}`")]
    DuplicateCode { code: String, line: usize },
    #[error("line {line}: indicator `{code}` is a survey question but has no survey_field")]
    MissingSurveyField { code: String, line: usize },
    #[error("line {line}: indicator `{code}` is GIS-derived but names survey_field `{field}`")]
    UnexpectedSurveyField { code: String, line: usize, field: String },
    #[error("line {line}: indicator `{code}` has unknown determinant `{value}`")]
    UnknownDeterminant { code: String, line: usize, value: String },
    #[error("line {line}: indicator `{code}` has unknown {field} `{value}`")]
    UnknownEnumValue { code: String, line: usize, field: &'static str, value: String },
    #[error("line {line}: indicator `{code}` uses {aggregation} aggregation with a {source_kind} source")]
    AggregationMismatch { code: String, line: usize, aggregation: Aggregation, source_kind: Source },
    #[error("line {line}: indicator has an empty code")]
    EmptyCode { line: usize },
    #[error("catalog contains no indicators")]
    EmptyCatalog,
    #[error("weight for `{path}` is negative ({value})")]
    NegativeWeight { path: String, value: f64 },
    #[error("weight for `{path}` is not a finite number")]
    NonFiniteWeight { path: String },
    #[error("weights under `{path}` sum to {sum}, expected 1")]
    GroupSum { path: String, sum: f64 },
    #[error("weight references unknown catalog node `{path}`")]
    UnknownWeightNode { path: String },
    #[error("catalog node `{path}` has no weight")]
    MissingWeight { path: String },
    #[error("weight document is invalid: {0}")]
    WeightSyntax(String),
}

/// Top tier of the vulnerability hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Determinant {
    Exposure,
    Sensitivity,
    AdaptiveCapacity,
}

impl Determinant {
    pub const ALL: [Determinant; 3] =
        [Determinant::Exposure, Determinant::Sensitivity, Determinant::AdaptiveCapacity];

    pub fn as_str(self) -> &'static str {
        match self {
            Determinant::Exposure => "Exposure",
            Determinant::Sensitivity => "Sensitivity",
            Determinant::AdaptiveCapacity => "AdaptiveCapacity",
        }
    }

    /// Column/property name of this determinant's index in exported results.
    pub fn index_column(self) -> &'static str {
        match self {
            Determinant::Exposure => "exposure_index",
            Determinant::Sensitivity => "sensitivity_index",
            Determinant::AdaptiveCapacity => "adaptive_capacity_index",
        }
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accepts `AdaptiveCapacity`, `Adaptive Capacity`, `adaptive_capacity`, etc.
impl FromStr for Determinant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match fold_name(s).as_str() {
            "exposure" => Ok(Determinant::Exposure),
            "sensitivity" => Ok(Determinant::Sensitivity),
            "adaptivecapacity" => Ok(Determinant::AdaptiveCapacity),
            _ => Err(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    SurveyQuestion,
    GisAnalysis,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::SurveyQuestion => "SurveyQuestion",
            Source::GisAnalysis => "GisAnalysis",
        })
    }
}

/// Direction in which a raw indicator value relates to vulnerability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    HigherIsMoreVulnerable,
    HigherIsLessVulnerable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Aggregation {
    MeanOverHouseholds,
    RatioCountOverTotal,
    SumOverHouseholds,
    ZonalMean,
    ZonalFraction,
}

impl Aggregation {
    pub fn is_zonal(self) -> bool {
        matches!(self, Aggregation::ZonalMean | Aggregation::ZonalFraction)
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Administrative tier. Ordered from the top (department) down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdminLevel {
    Department,
    Municipality,
    Village,
}

impl AdminLevel {
    pub const ALL: [AdminLevel; 3] =
        [AdminLevel::Department, AdminLevel::Municipality, AdminLevel::Village];

    pub fn as_str(self) -> &'static str {
        match self {
            AdminLevel::Department => "department",
            AdminLevel::Municipality => "municipality",
            AdminLevel::Village => "village",
        }
    }

    /// Level a unit of this level must have as parent.
    pub fn parent_level(self) -> Option<AdminLevel> {
        match self {
            AdminLevel::Department => None,
            AdminLevel::Municipality => Some(AdminLevel::Department),
            AdminLevel::Village => Some(AdminLevel::Municipality),
        }
    }
}

impl fmt::Display for AdminLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdminLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "department" => Ok(AdminLevel::Department),
            "municipality" => Ok(AdminLevel::Municipality),
            "village" => Ok(AdminLevel::Village),
            _ => Err(s.to_string()),
        }
    }
}

fn fold_name(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_names() {
        assert_eq!("Adaptive Capacity".parse::<Determinant>(), Ok(Determinant::AdaptiveCapacity));
        assert_eq!("adaptive_capacity".parse::<Determinant>(), Ok(Determinant::AdaptiveCapacity));
        assert_eq!("EXPOSURE".parse::<Determinant>(), Ok(Determinant::Exposure));
        assert!("Resilience".parse::<Determinant>().is_err());
    }

    #[test]
    fn admin_levels() {
        assert_eq!("Village".parse::<AdminLevel>(), Ok(AdminLevel::Village));
        assert_eq!(AdminLevel::Village.parent_level(), Some(AdminLevel::Municipality));
        assert_eq!(AdminLevel::Department.parent_level(), None);
        assert!("county".parse::<AdminLevel>().is_err());
    }
}
