//! Climate-change vulnerability assessment engine.
//!
//! The crate turns household surveys and gridded geodata into hierarchical
//! composite indices (determinant → component → subcomponent → indicator),
//! computes a weighted-overlay fire risk index raster, and rolls results up
//! an administrative hierarchy.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the bottom of this file pin the `f64` instantiation used by the service.

pub mod admin;
pub mod firerisk;
pub mod index;
pub mod model;
pub mod raster;
pub mod scalar;
pub mod survey;

pub use scalar::Scalar;

pub use admin::{AdminError, AdminHierarchy, AdminUnit, Contiguity};
pub use model::{
    AdminLevel, Aggregation, Determinant, IndicatorCatalog, IndicatorDefinition, ModelError,
    Polarity, Source,
};

pub type Grid = raster::Grid<f64>;
pub type ReclassTable = raster::ReclassTable<f64>;
pub type ChangeMatrix = raster::ChangeMatrix;
pub type ZoneStats = raster::ZoneStats<f64>;
pub type WeightConfig = model::WeightConfig<f64>;
pub type ScoreTables = firerisk::ScoreTables<f64>;
pub type FireRiskInputs = firerisk::FireRiskInputs<f64>;
pub type FireRiskScores = firerisk::FireRiskScores<f64>;
pub type RiskZones = firerisk::RiskZones<f64>;
pub type IndicatorMatrix = index::IndicatorMatrix<f64>;
pub type Assessment = index::Assessment<f64>;
pub type UnitAssessment = index::UnitAssessment<f64>;
