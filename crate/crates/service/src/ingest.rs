//! Builds a workspace from survey, admin, raster and catalog inputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ccvi_core::admin::{load_admin_units, write_admin_units};
use ccvi_core::model::{default_catalog, load_catalog};
use ccvi_core::raster::{parse_ascii_grid, rasterize_polygons, zonal_stats, Polygon};
use ccvi_core::survey::{parse_survey_csv, SurveyAggregator, SurveyRecord, SurveySchema};
use ccvi_core::{AdminHierarchy, AdminLevel, Aggregation, Grid, IndicatorCatalog, IndicatorMatrix, Source};

use crate::workspace::{self, write_manifest, Manifest};

#[derive(Debug, Clone)]
pub struct IngestInputs {
    pub survey: PathBuf,
    pub admin: PathBuf,
    pub rasters: PathBuf,
    /// Built-in catalog when absent.
    pub catalog: Option<PathBuf>,
    /// Built-in survey schema when absent.
    pub schema: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Household count per unit: a village's admin count when positive, else
/// its number of survey records; parents sum their villages.
fn household_counts(admin: &AdminHierarchy, records: &[SurveyRecord]) -> BTreeMap<String, u64> {
    let mut surveyed: BTreeMap<&str, u64> = BTreeMap::new();
    for r in records {
        *surveyed.entry(r.village_id.as_str()).or_default() += 1;
    }
    let mut counts: BTreeMap<String, u64> = admin.units().iter().map(|u| (u.unit_id.clone(), 0)).collect();
    for v in admin.at_level(AdminLevel::Village) {
        let n = if v.household_count > 0 { v.household_count } else { surveyed.get(v.unit_id.as_str()).copied().unwrap_or(0) };
        for level in [AdminLevel::Village, AdminLevel::Municipality, AdminLevel::Department] {
            if let Some(a) = admin.ancestor_at(&v.unit_id, level) {
                *counts.get_mut(&a.unit_id).expect("every unit has a count") += n;
            }
        }
    }
    counts
}

/// Survey indicator values for every unit: each household counts toward
/// its village and that village's ancestors.
fn survey_values(
    admin: &AdminHierarchy,
    records: &[SurveyRecord],
    catalog: &IndicatorCatalog,
    schema: &SurveySchema,
) -> Result<BTreeMap<String, BTreeMap<String, Option<f64>>>> {
    let mut agg = SurveyAggregator::<f64>::new(catalog, schema);
    for r in records {
        match admin.get(&r.village_id) {
            Some(u) if u.level == AdminLevel::Village => {}
            Some(u) => bail!("survey line {}: `{}` is a {}, not a village", r.line, r.village_id, u.level),
            None => bail!("survey line {}: village `{}` is not in the admin document", r.line, r.village_id),
        }
        for level in [AdminLevel::Village, AdminLevel::Municipality, AdminLevel::Department] {
            if let Some(a) = admin.ancestor_at(&r.village_id, level) {
                let mut rec = r.clone();
                rec.village_id = a.unit_id.clone();
                agg.add(&rec);
            }
        }
    }
    Ok(agg.finish().into_iter().map(|u| (u.unit_id, u.values)).collect())
}

/// Zonal value of `grid` for every unit at every level.
fn zonal_values(
    admin: &AdminHierarchy,
    grid: &Grid,
    aggregation: Aggregation,
    threshold: f64,
) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for level in [AdminLevel::Department, AdminLevel::Municipality, AdminLevel::Village] {
        let units: Vec<_> = admin.at_level(level).collect();
        let polygons: Vec<(i64, Polygon)> = units
            .iter()
            .enumerate()
            .flat_map(|(i, u)| u.geometry.polygons().iter().map(move |p| (i as i64, p.clone())))
            .collect();
        let zones = rasterize_polygons(&polygons, grid)?;
        for (zone, stats) in zonal_stats(grid, &zones, threshold)? {
            let v = match aggregation {
                Aggregation::ZonalFraction => stats.fraction_above(),
                _ => stats.mean,
            };
            out.insert(units[zone as usize].unit_id.clone(), v);
        }
    }
    Ok(out)
}

/// Raw indicator matrix over every admin unit in document order, plus the
/// raster files it read (code, path).
pub fn build_indicator_matrix(
    catalog: &IndicatorCatalog,
    admin: &AdminHierarchy,
    records: &[SurveyRecord],
    schema: &SurveySchema,
    rasters: &Path,
) -> Result<(IndicatorMatrix, Vec<(String, PathBuf)>)> {
    let ids: Vec<String> = admin.units().iter().map(|u| u.unit_id.clone()).collect();
    let codes: Vec<String> = catalog.codes().map(String::from).collect();
    let counts = household_counts(admin, records);
    let mut matrix =
        IndicatorMatrix::empty(ids.clone(), codes, ids.iter().map(|id| counts[id]).collect())?;

    let survey = survey_values(admin, records, catalog, schema)?;
    let mut used = Vec::new();
    for (j, def) in catalog.indicators().iter().enumerate() {
        let per_unit: BTreeMap<String, f64> = match def.source {
            Source::SurveyQuestion => survey
                .iter()
                .filter_map(|(unit, vals)| Some((unit.clone(), vals.get(&def.code).copied().flatten()?)))
                .collect(),
            Source::GisAnalysis => {
                let path = rasters.join(format!("{}.asc", def.code));
                if !path.is_file() {
                    log::warn!("no raster {} for indicator {}; it will be missing", path.display(), def.code);
                    continue;
                }
                let grid: Grid = parse_ascii_grid(&read(&path)?).with_context(|| format!("{}", path.display()))?;
                let values = zonal_values(admin, &grid, def.aggregation, def.threshold.unwrap_or(0.0))
                    .with_context(|| format!("zonal statistics of {}", path.display()))?;
                used.push((def.code.clone(), path));
                values
            }
        };
        for (u, id) in ids.iter().enumerate() {
            matrix.set(u, j, per_unit.get(id).copied());
        }
    }
    Ok((matrix, used))
}

/// Creates (or refreshes) a workspace at `out`. A non-empty directory
/// that is not a workspace is refused; refreshing drops earlier results.
pub fn ingest(inputs: &IngestInputs, out: &Path) -> Result<Manifest> {
    for p in [&inputs.survey, &inputs.admin] {
        if !p.is_file() {
            bail!("input file {} does not exist", p.display());
        }
    }
    if !inputs.rasters.is_dir() {
        bail!("raster directory {} does not exist", inputs.rasters.display());
    }
    let catalog = match &inputs.catalog {
        Some(p) => load_catalog(&read(p)?).with_context(|| format!("{}", p.display()))?,
        None => default_catalog(),
    };
    let schema = match &inputs.schema {
        Some(p) => SurveySchema::from_json(&read(p)?).with_context(|| format!("{}", p.display()))?,
        None => SurveySchema::default(),
    };
    let admin = load_admin_units(&read(&inputs.admin)?).with_context(|| format!("{}", inputs.admin.display()))?;
    for w in admin.warnings() {
        log::warn!("{}: {w}", inputs.admin.display());
    }
    let survey_bytes = fs::read(&inputs.survey).with_context(|| format!("reading {}", inputs.survey.display()))?;
    let records = parse_survey_csv(survey_bytes.as_slice(), &catalog, &schema)
        .with_context(|| format!("{}", inputs.survey.display()))?;
    let (matrix, rasters) = build_indicator_matrix(&catalog, &admin, &records, &schema, &inputs.rasters)?;

    prepare_out(out)?;
    fs::write(out.join(workspace::CATALOG), catalog.to_json())?;
    fs::write(out.join(workspace::ADMIN), write_admin_units(&admin))?;
    fs::write(out.join(workspace::SURVEY), survey_bytes)?;
    fs::write(out.join(workspace::INDICATORS), matrix.to_csv())?;
    fs::create_dir_all(out.join(workspace::RASTERS))?;
    for (code, path) in rasters {
        fs::copy(&path, out.join(workspace::RASTERS).join(format!("{code}.asc")))
            .with_context(|| format!("copying {}", path.display()))?;
    }
    write_manifest(out, None)
}

fn prepare_out(out: &Path) -> Result<()> {
    if out.exists() {
        let empty = fs::read_dir(out)?.next().is_none();
        if !empty && !out.join(workspace::MANIFEST).is_file() {
            bail!("{} exists and is not a workspace", out.display());
        }
        for dir in [workspace::RASTERS, workspace::WEIGHTS, workspace::RESULTS] {
            let d = out.join(dir);
            if d.is_dir() {
                fs::remove_dir_all(&d).with_context(|| format!("clearing {}", d.display()))?;
            }
        }
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}
