//! Composite index engine: normalization, hierarchical weighted aggregation
//! into the vulnerability index (VI), quantile classes, administrative
//! rollup and Gi* hotspots.

mod aggregate;
mod classify;
mod hotspot;
mod matrix;
mod normalize;
mod report;
mod rollup;

use thiserror::Error;

use crate::model::{AdminLevel, Determinant, IndicatorCatalog, ModelError};
use crate::Scalar;

pub use aggregate::{aggregate, compute_assessment, weighted_index};
pub use classify::{assign_ranks_and_classes, classify_quantiles, NUM_CLASSES};
pub use hotspot::hotspot_gi_star;
pub use matrix::IndicatorMatrix;
pub use normalize::normalize;
pub use report::{result_header, results_json, write_results_csv};
pub use rollup::rollup;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("matrix has {units} units x {indicators} indicators but {values} values")]
    Dimensions { units: usize, indicators: usize, values: usize },
    #[error("household counts: expected {expected}, got {found}")]
    HouseholdCounts { expected: usize, found: usize },
    #[error("unit `{0}` appears twice")]
    DuplicateUnit(String),
    #[error("indicator `{0}` appears twice")]
    DuplicateIndicator(String),
    #[error("value for unit `{unit}`, indicator `{code}` is not finite")]
    NonFinite { unit: String, code: String },
    #[error("catalog indicator `{0}` is absent from the indicator matrix")]
    MissingIndicator(String),
    #[error(transparent)]
    Weights(#[from] ModelError),
    #[error("at least 2 classes are required, got {0}")]
    TooFewClasses(u32),
    #[error("at least {needed} units are required, got {found}")]
    TooFewUnits { needed: usize, found: usize },
    #[error("adjacency is not symmetric: `{from}` lists `{to}` but not the reverse")]
    AsymmetricAdjacency { from: String, to: String },
    #[error("adjacency names unit `{0}` which has no value")]
    UnknownUnit(String),
    #[error("unit `{0}` has no parent at the target level")]
    Orphan(String),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

pub type Result<T, E = IndexError> = std::result::Result<T, E>;

/// One value column of an assessment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexColumn {
    /// Normalized (oriented) indicator value.
    Indicator(String),
    Subcomponent(Determinant, String, String),
    Component(Determinant, String),
    Determinant(Determinant),
    Vi,
}

impl IndexColumn {
    /// Column name used in result tables.
    pub fn name(&self) -> String {
        match self {
            IndexColumn::Indicator(code) => format!("indicator:{code}"),
            IndexColumn::Subcomponent(d, c, s) => format!("subcomponent:{d}/{c}/{s}"),
            IndexColumn::Component(d, c) => format!("component:{d}/{c}"),
            IndexColumn::Determinant(d) => d.index_column().to_string(),
            IndexColumn::Vi => "vi".to_string(),
        }
    }
}

/// Assessment columns for a catalog, bottom-up: indicators, subcomponents,
/// components, determinants, VI.
pub fn assessment_columns(catalog: &IndicatorCatalog) -> Vec<IndexColumn> {
    let tree = catalog.tree();
    let mut cols: Vec<IndexColumn> = catalog.codes().map(|c| IndexColumn::Indicator(c.to_string())).collect();
    for dn in &tree.determinants {
        for cn in &dn.components {
            for sn in &cn.subcomponents {
                cols.push(IndexColumn::Subcomponent(dn.determinant, cn.name.clone(), sn.name.clone()));
            }
        }
    }
    for dn in &tree.determinants {
        for cn in &dn.components {
            cols.push(IndexColumn::Component(dn.determinant, cn.name.clone()));
        }
    }
    cols.extend(tree.determinants.iter().map(|dn| IndexColumn::Determinant(dn.determinant)));
    cols.push(IndexColumn::Vi);
    cols
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitAssessment<T> {
    pub unit_id: String,
    pub household_count: u64,
    /// Aligned with [`Assessment::columns`].
    pub values: Vec<Option<T>>,
    /// Household mass behind each value; rollup weights.
    pub support: Vec<T>,
    pub class: Option<u32>,
    pub rank: Option<u32>,
}

impl<T: Scalar> UnitAssessment<T> {
    pub fn vi(&self) -> Option<T> {
        *self.values.last().expect("VI column")
    }
}

/// Index values for every unit of one administrative level.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment<T> {
    pub level: AdminLevel,
    pub weight_config_id: String,
    pub columns: Vec<IndexColumn>,
    pub units: Vec<UnitAssessment<T>>,
}

impl<T: Scalar> Assessment<T> {
    pub fn column_index(&self, col: &IndexColumn) -> Option<usize> {
        self.columns.iter().position(|c| c == col)
    }

    pub fn unit(&self, unit_id: &str) -> Option<&UnitAssessment<T>> {
        self.units.iter().find(|u| u.unit_id == unit_id)
    }

    pub fn value(&self, unit_id: &str, col: &IndexColumn) -> Option<T> {
        let j = self.column_index(col)?;
        self.unit(unit_id)?.values[j]
    }

    pub fn determinant(&self, unit: &UnitAssessment<T>, det: Determinant) -> Option<T> {
        unit.values[self.column_index(&IndexColumn::Determinant(det))?]
    }

    /// Units in rank order; units without a VI come last by id.
    pub fn ranking(&self) -> Vec<&UnitAssessment<T>> {
        let mut out: Vec<&UnitAssessment<T>> = self.units.iter().collect();
        out.sort_by(|a, b| match (a.rank, b.rank) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.unit_id.cmp(&b.unit_id),
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_catalog;

    #[test]
    fn column_layout() {
        let cat = default_catalog();
        let cols = assessment_columns(&cat);
        assert_eq!(cols.last(), Some(&IndexColumn::Vi));
        assert_eq!(cols[0], IndexColumn::Indicator("FRQ_DRT".into()));
        assert_eq!(IndexColumn::Determinant(Determinant::AdaptiveCapacity).name(), "adaptive_capacity_index");
        assert_eq!(
            IndexColumn::Subcomponent(Determinant::Exposure, "Extreme Climate Events".into(), "Droughts".into()).name(),
            "subcomponent:Exposure/Extreme Climate Events/Droughts"
        );
        let n_det = cols.iter().filter(|c| matches!(c, IndexColumn::Determinant(_))).count();
        assert_eq!(n_det, 3);
    }
}
