//! Weighted-overlay fire risk.
//!
//! Six input layers are scored onto `[0, 1]` and combined cellwise as
//!
//! ```text
//! FRI = 1 + 75·lc + 30·sl + 10·a + 5·r + 5·se + 2·e
//! ```
//!
//! with `lc` land cover, `sl` slope, `a` aspect, `r` road proximity, `se`
//! settlement proximity and `e` elevation. Valid FRI values therefore lie in
//! `[1, 128]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{
    aspect, nodata_outside, proximity, slope, Grid, RasterError, ReclassRange, ReclassTable,
    FLAT_ASPECT,
};
use crate::Scalar;

pub const INTERCEPT: f64 = 1.0;
pub const LAND_COVER_WEIGHT: f64 = 75.0;
pub const SLOPE_WEIGHT: f64 = 30.0;
pub const ASPECT_WEIGHT: f64 = 10.0;
pub const ROAD_WEIGHT: f64 = 5.0;
pub const SETTLEMENT_WEIGHT: f64 = 5.0;
pub const ELEVATION_WEIGHT: f64 = 2.0;

pub const FRI_MIN: f64 = 1.0;
pub const FRI_MAX: f64 = INTERCEPT
    + LAND_COVER_WEIGHT
    + SLOPE_WEIGHT
    + ASPECT_WEIGHT
    + ROAD_WEIGHT
    + SETTLEMENT_WEIGHT
    + ELEVATION_WEIGHT;

/// Land cover class codes understood by the default score table.
pub mod land_cover {
    pub const DENSE_FOREST: i64 = 1;
    pub const SHRUB: i64 = 2;
    pub const AGRICULTURE: i64 = 3;
    pub const GRASSLAND: i64 = 4;
    pub const BUILT_UP: i64 = 5;
    pub const WATER: i64 = 6;
    pub const BARE: i64 = 7;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FireRiskError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("{layer} grid is not aligned with land cover: {detail}")]
    Misaligned { layer: &'static str, detail: String },
    #[error("{table} table emits {value}, outside [0, 1]")]
    ScoreOutOfRange { table: &'static str, value: f64 },
    #[error("{layer} score {value} at row {row}, col {col} is outside [0, 1]")]
    ScoreGridOutOfRange { layer: &'static str, value: f64, row: usize, col: usize },
    #[error("fire risk index {value} at row {row}, col {col} is outside [1, 128]")]
    IndexOutOfRange { value: f64, row: usize, col: usize },
    #[error("at least 2 risk classes are required, got {0}")]
    TooFewClasses(u32),
}

pub type Result<T, E = FireRiskError> = std::result::Result<T, E>;

#[derive(Debug, Clone)]
pub struct FireRiskInputs<T> {
    pub land_cover: Grid<T>,
    pub dem: Grid<T>,
    pub roads_mask: Grid<T>,
    pub settlements_mask: Grid<T>,
}

impl<T: Scalar> FireRiskInputs<T> {
    pub fn new(land_cover: Grid<T>, dem: Grid<T>, roads_mask: Grid<T>, settlements_mask: Grid<T>) -> Result<Self> {
        let inputs = Self { land_cover, dem, roads_mask, settlements_mask };
        inputs.check_alignment()?;
        Ok(inputs)
    }

    fn check_alignment(&self) -> Result<()> {
        for (layer, g) in [("dem", &self.dem), ("roads", &self.roads_mask), ("settlements", &self.settlements_mask)] {
            if let Err(RasterError::GeorefMismatch(detail)) = self.land_cover.ensure_aligned(g) {
                return Err(FireRiskError::Misaligned { layer, detail });
            }
        }
        Ok(())
    }
}

/// Per-layer score tables; all outputs must lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct ScoreTables<T> {
    pub land_cover: ReclassTable<T>,
    pub slope: ReclassTable<T>,
    pub aspect: ReclassTable<T>,
    pub road_distance: ReclassTable<T>,
    pub settlement_distance: ReclassTable<T>,
    pub elevation: ReclassTable<T>,
}

fn ranges<T: Scalar>(bins: &[(Option<f64>, Option<f64>, f64)]) -> ReclassTable<T> {
    ReclassTable::continuous(
        bins.iter()
            .map(|&(lo, hi, out)| ReclassRange::new(lo.map(T::of), hi.map(T::of), T::of(out)))
            .collect(),
        None,
    )
}

fn distance_bins<T: Scalar>() -> ReclassTable<T> {
    ranges(&[
        (Some(0.0), Some(100.0), 1.0),
        (Some(100.0), Some(200.0), 0.8),
        (Some(200.0), Some(400.0), 0.6),
        (Some(400.0), Some(800.0), 0.4),
        (Some(800.0), None, 0.2),
    ])
}

impl<T: Scalar> Default for ScoreTables<T> {
    /// Engine defaults; replace them through a tables file for local studies.
    fn default() -> Self {
        use land_cover::*;
        Self {
            land_cover: ReclassTable::categorical(
                [
                    (DENSE_FOREST, 1.0),
                    (SHRUB, 0.8),
                    (AGRICULTURE, 0.6),
                    (GRASSLAND, 0.4),
                    (BUILT_UP, 0.2),
                    (WATER, 0.0),
                    (BARE, 0.0),
                ]
                .map(|(c, s)| (c, T::of(s))),
                None,
            ),
            slope: ranges(&[
                (Some(0.0), Some(5.0), 0.2),
                (Some(5.0), Some(15.0), 0.4),
                (Some(15.0), Some(25.0), 0.6),
                (Some(25.0), Some(35.0), 0.8),
                (Some(35.0), None, 1.0),
            ]),
            aspect: ranges(&[
                (Some(0.0), Some(45.0), 0.1),
                (Some(45.0), Some(90.0), 0.4),
                (Some(90.0), Some(135.0), 0.7),
                (Some(135.0), Some(225.0), 1.0),
                (Some(225.0), Some(270.0), 0.7),
                (Some(270.0), Some(315.0), 0.4),
                (Some(315.0), Some(360.0), 0.1),
            ]),
            road_distance: distance_bins(),
            settlement_distance: distance_bins(),
            elevation: ranges(&[
                (None, Some(800.0), 1.0),
                (Some(800.0), Some(1200.0), 0.75),
                (Some(1200.0), Some(1800.0), 0.5),
                (Some(1800.0), Some(2400.0), 0.25),
                (Some(2400.0), None, 0.1),
            ]),
        }
    }
}

impl<T: Scalar> ScoreTables<T> {
    pub fn named(&self) -> [(&'static str, &ReclassTable<T>); 6] {
        [
            ("land_cover", &self.land_cover),
            ("slope", &self.slope),
            ("aspect", &self.aspect),
            ("road_distance", &self.road_distance),
            ("settlement_distance", &self.settlement_distance),
            ("elevation", &self.elevation),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (table, t) in self.named() {
            t.validate()?;
            for v in t.outputs() {
                let f = v.as_f64();
                if !(0.0..=1.0).contains(&f) {
                    return Err(FireRiskError::ScoreOutOfRange { table, value: f });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Scored layers, each valid cell in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FireRiskScores<T> {
    pub lc: Grid<T>,
    pub sl: Grid<T>,
    pub a: Grid<T>,
    pub r: Grid<T>,
    pub se: Grid<T>,
    pub e: Grid<T>,
}

impl<T: Scalar> FireRiskScores<T> {
    pub fn layers(&self) -> [(&'static str, &Grid<T>); 6] {
        [("lc", &self.lc), ("sl", &self.sl), ("a", &self.a), ("r", &self.r), ("se", &self.se), ("e", &self.e)]
    }
}

/// Reclassifies onto a nodata sentinel that cannot collide with a score.
fn score<T: Scalar>(g: &Grid<T>, table: &ReclassTable<T>) -> Grid<T> {
    g.map_valid(nodata_outside(g.nodata_value(), 0.0, 1.0), |v| table.lookup(v))
}

/// Derives slope, aspect and proximity layers and scores all six.
pub fn score_layers<T: Scalar>(inputs: &FireRiskInputs<T>, tables: &ScoreTables<T>) -> Result<FireRiskScores<T>> {
    inputs.check_alignment()?;
    tables.validate()?;

    let lc = score(&inputs.land_cover, &tables.land_cover);
    let sl = score(&slope(&inputs.dem), &tables.slope);
    let aspect_deg = aspect(&inputs.dem);
    let a = aspect_deg.map_valid(nodata_outside(aspect_deg.nodata_value(), 0.0, 1.0), |deg| {
        if deg == T::of(FLAT_ASPECT) {
            Some(T::zero())
        } else {
            tables.aspect.lookup(deg)
        }
    });
    let r = score(&proximity(&inputs.roads_mask), &tables.road_distance);
    let se = score(&proximity(&inputs.settlements_mask), &tables.settlement_distance);
    let e = score(&inputs.dem, &tables.elevation);
    Ok(FireRiskScores { lc, sl, a, r, se, e })
}

/// Cellwise weighted overlay. Any missing score yields a missing FRI.
pub fn fire_risk_index<T: Scalar>(scores: &FireRiskScores<T>) -> Result<Grid<T>> {
    for (layer, g) in scores.layers().into_iter().skip(1) {
        if let Err(RasterError::GeorefMismatch(detail)) = scores.lc.ensure_aligned(g) {
            return Err(FireRiskError::Misaligned { layer, detail });
        }
    }
    let [(_, lc), (_, sl), (_, a), (_, r), (_, se), (_, e)] = scores.layers();
    let nodata = nodata_outside(lc.nodata_value(), FRI_MIN, FRI_MAX);
    let mut out = lc.like(nodata, nodata);
    let (w_lc, w_sl, w_a) = (T::of(LAND_COVER_WEIGHT), T::of(SLOPE_WEIGHT), T::of(ASPECT_WEIGHT));
    let (w_r, w_se, w_e) = (T::of(ROAD_WEIGHT), T::of(SETTLEMENT_WEIGHT), T::of(ELEVATION_WEIGHT));
    for row in 0..lc.nrows() {
        for col in 0..lc.ncols() {
            let cell = [lc, sl, a, r, se, e].map(|g| g.get(row, col));
            let [Some(lc), Some(sl), Some(a), Some(r), Some(se), Some(e)] = cell else { continue };
            for (layer, v) in [("lc", lc), ("sl", sl), ("a", a), ("r", r), ("se", se), ("e", e)] {
                if !(T::zero()..=T::one()).contains(&v) {
                    return Err(FireRiskError::ScoreGridOutOfRange { layer, value: v.as_f64(), row, col });
                }
            }
            let fri = T::of(INTERCEPT) + w_lc * lc + w_sl * sl + w_a * a + w_r * r + w_se * se + w_e * e;
            out.set(row, col, fri);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskZones<T> {
    /// Class number `1..=n` per valid cell.
    pub class_grid: Grid<T>,
    /// Area per class in km², every class present (possibly 0).
    pub class_areas: BTreeMap<u32, f64>,
}

/// Lower bound of class `k` (1-based) among `n` equal intervals over [1, 128].
pub fn class_lower_bound(k: u32, n: u32) -> f64 {
    FRI_MIN + f64::from(k - 1) * (FRI_MAX - FRI_MIN) / f64::from(n)
}

/// Equal-interval classes over `[1, 128]`: class `k` covers
/// `[lower(k), lower(k+1))`, the last class is closed at 128.
pub fn risk_class(value: f64, n: u32) -> u32 {
    (2..=n).filter(|&k| value >= class_lower_bound(k, n)).count() as u32 + 1
}

pub fn classify_risk_zones<T: Scalar>(fri: &Grid<T>, num_classes: u32) -> Result<RiskZones<T>> {
    if num_classes < 2 {
        return Err(FireRiskError::TooFewClasses(num_classes));
    }
    let nodata = nodata_outside(fri.nodata_value(), 1.0, f64::from(num_classes));
    let mut class_grid = fri.like(nodata, nodata);
    let mut counts = vec![0u64; num_classes as usize];
    for row in 0..fri.nrows() {
        for col in 0..fri.ncols() {
            let Some(v) = fri.get(row, col) else { continue };
            let v = v.as_f64();
            if !(FRI_MIN..=FRI_MAX).contains(&v) {
                return Err(FireRiskError::IndexOutOfRange { value: v, row, col });
            }
            let k = risk_class(v, num_classes);
            counts[k as usize - 1] += 1;
            class_grid.set(row, col, T::of(f64::from(k)));
        }
    }
    let km2_per_cell = fri.cell_area() / 1e6;
    let class_areas = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| (i as u32 + 1, n as f64 * km2_per_cell))
        .collect();
    Ok(RiskZones { class_grid, class_areas })
}
