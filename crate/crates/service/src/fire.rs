//! Fire-risk overlay from land cover, elevation, roads and settlements.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ccvi_core::firerisk::{class_lower_bound, classify_risk_zones, fire_risk_index, score_layers, FRI_MAX};
use ccvi_core::raster::{parse_ascii_grid, write_ascii_grid};
use ccvi_core::{FireRiskInputs, Grid, RiskZones, ScoreTables};
use serde::{Deserialize, Serialize};

pub const FRI_FILE: &str = "fri.asc";
pub const CLASSES_FILE: &str = "fri_classes.asc";
pub const AREAS_FILE: &str = "class_areas.csv";
pub const NUM_ZONES: u32 = 5;

#[derive(Debug, Clone)]
pub struct FireRiskPaths {
    pub landcover: PathBuf,
    pub dem: PathBuf,
    pub roads: PathBuf,
    pub settlements: PathBuf,
    pub tables: Option<PathBuf>,
}

/// One row of `class_areas.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassArea {
    pub class: u32,
    pub lower: f64,
    pub upper: f64,
    pub area_km2: f64,
}

pub struct FireRiskOutput {
    pub fri: Grid,
    pub zones: RiskZones,
}

fn grid(path: &Path) -> Result<Grid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_ascii_grid(&text).with_context(|| format!("{}", path.display()))
}

pub fn class_areas(zones: &RiskZones) -> Vec<ClassArea> {
    zones
        .class_areas
        .iter()
        .map(|(&class, &area_km2)| ClassArea {
            class,
            lower: class_lower_bound(class, NUM_ZONES),
            upper: if class == NUM_ZONES { FRI_MAX } else { class_lower_bound(class + 1, NUM_ZONES) },
            area_km2,
        })
        .collect()
}

pub fn write_class_areas(rows: &[ClassArea]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn read_class_areas(path: &Path) -> Result<Vec<ClassArea>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize().collect::<Result<_, _>>().with_context(|| format!("{}", path.display()))
}

pub fn compute(paths: &FireRiskPaths) -> Result<FireRiskOutput> {
    let tables = match &paths.tables {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ScoreTables::from_json(&text).with_context(|| format!("{}", p.display()))?
        }
        None => ScoreTables::default(),
    };
    let inputs = FireRiskInputs::new(grid(&paths.landcover)?, grid(&paths.dem)?, grid(&paths.roads)?, grid(&paths.settlements)?)?;
    let scores = score_layers(&inputs, &tables)?;
    let fri = fire_risk_index(&scores)?;
    let zones = classify_risk_zones(&fri, NUM_ZONES)?;
    Ok(FireRiskOutput { fri, zones })
}

/// Writes the FRI grid, the class grid and the class area table to `out`.
pub fn run(paths: &FireRiskPaths, out: &Path) -> Result<FireRiskOutput> {
    let result = compute(paths)?;
    let areas = write_class_areas(&class_areas(&result.zones))?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join(FRI_FILE), write_ascii_grid(&result.fri))?;
    fs::write(out.join(CLASSES_FILE), write_ascii_grid(&result.zones.class_grid))?;
    fs::write(out.join(AREAS_FILE), areas)?;
    Ok(result)
}
