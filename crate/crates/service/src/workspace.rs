//! On-disk workspace: inputs copied at ingest, the raw indicator matrix,
//! weight scenarios, per-level results and a digest manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ccvi_core::admin::{export_choropleth, load_admin_units};
use ccvi_core::index::{aggregate, normalize, rollup, write_results_csv, IndexError};
use ccvi_core::model::{default_weights, load_catalog, validate_weights};
use ccvi_core::{AdminHierarchy, AdminLevel, Assessment, IndicatorCatalog, IndicatorMatrix, WeightConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";
pub const CATALOG: &str = "catalog.json";
pub const ADMIN: &str = "admin.geojson";
pub const SURVEY: &str = "survey.csv";
pub const RASTERS: &str = "rasters";
pub const INDICATORS: &str = "indicators.csv";
pub const WEIGHTS: &str = "weights";
pub const RESULTS: &str = "results";
pub const FIRE_RISK: &str = "fire_risk";

/// Levels in result-file order, bottom-up.
pub const LEVELS: [AdminLevel; 3] = [AdminLevel::Village, AdminLevel::Municipality, AdminLevel::Department];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Weight scenario of the latest `compute`, if any.
    pub weight_config_id: Option<String>,
    /// Relative path (with `/`) → sha256 hex, every file but the manifest.
    pub files: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let path = e.path();
        if e.file_type()?.is_dir() {
            collect_files(root, &path, out)?;
        } else if path != root.join(MANIFEST) {
            out.push(path);
        }
    }
    Ok(())
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).expect("path under root");
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Digests every file under `root` and writes the manifest.
pub fn write_manifest(root: &Path, weight_config_id: Option<String>) -> Result<Manifest> {
    let mut paths = Vec::new();
    collect_files(root, root, &mut paths)?;
    let mut files = BTreeMap::new();
    for p in paths {
        let bytes = fs::read(&p).with_context(|| format!("reading {}", p.display()))?;
        files.insert(relative(root, &p), sha256_hex(&bytes));
    }
    let manifest = Manifest { weight_config_id, files };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(root.join(MANIFEST), text)?;
    Ok(manifest)
}

pub fn read_manifest(root: &Path) -> Result<Manifest> {
    let path = root.join(MANIFEST);
    let text = fs::read_to_string(&path).with_context(|| format!("{} is not a workspace", root.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Manifest entries whose file is missing or no longer matches its digest.
pub fn stale_files(root: &Path, manifest: &Manifest) -> Vec<String> {
    manifest
        .files
        .iter()
        .filter(|(rel, digest)| fs::read(root.join(rel)).map_or(true, |b| &sha256_hex(&b) != *digest))
        .map(|(rel, _)| rel.clone())
        .collect()
}

/// Weight ids name directories, so they are restricted to a safe alphabet.
pub fn check_weight_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if !ok {
        bail!("weight config id {id:?} must be non-empty and use only letters, digits, '-', '_' or '.'");
    }
    Ok(())
}

pub fn results_path(root: &Path, weight_id: &str, level: AdminLevel) -> PathBuf {
    root.join(RESULTS).join(weight_id).join(format!("{level}.csv"))
}

pub fn weights_path(root: &Path, weight_id: &str) -> PathBuf {
    root.join(WEIGHTS).join(format!("{weight_id}.json"))
}

/// Assessments for the three levels of one weight scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResults {
    pub village: Assessment,
    pub municipality: Assessment,
    pub department: Assessment,
}

impl LevelResults {
    pub fn get(&self, level: AdminLevel) -> &Assessment {
        match level {
            AdminLevel::Village => &self.village,
            AdminLevel::Municipality => &self.municipality,
            AdminLevel::Department => &self.department,
        }
    }
}

/// Weighted aggregation of the normalized village matrix followed by the
/// two rollups. Weights must already be validated.
pub fn assess(
    normalized: &IndicatorMatrix,
    catalog: &IndicatorCatalog,
    admin: &AdminHierarchy,
    weights: &WeightConfig,
) -> Result<LevelResults, IndexError> {
    let village = aggregate(normalized, catalog, weights)?;
    let municipality =
        rollup(&village, &admin.ancestor_map(AdminLevel::Village, AdminLevel::Municipality), AdminLevel::Municipality)?;
    let department = rollup(
        &municipality,
        &admin.ancestor_map(AdminLevel::Municipality, AdminLevel::Department),
        AdminLevel::Department,
    )?;
    Ok(LevelResults { village, municipality, department })
}

/// An ingested workspace loaded into memory.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
    pub manifest: Manifest,
    pub catalog: IndicatorCatalog,
    pub admin: AdminHierarchy,
    /// Raw indicator values for every admin unit.
    pub matrix: IndicatorMatrix,
}

fn read(root: &Path, name: &str) -> Result<String> {
    let path = root.join(name);
    fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
}

impl Workspace {
    pub fn open(root: &Path) -> Result<Self> {
        let manifest = read_manifest(root)?;
        let stale = stale_files(root, &manifest);
        if !stale.is_empty() {
            log::warn!("workspace files changed since the manifest was written: {}", stale.join(", "));
        }
        let catalog = load_catalog(&read(root, CATALOG)?).with_context(|| format!("{CATALOG} in workspace"))?;
        let admin = load_admin_units(&read(root, ADMIN)?).with_context(|| format!("{ADMIN} in workspace"))?;
        let matrix = IndicatorMatrix::from_csv(&read(root, INDICATORS)?).with_context(|| format!("{INDICATORS}"))?;
        Ok(Self { root: root.to_path_buf(), manifest, catalog, admin, matrix })
    }

    /// Raw matrix restricted to village rows, in admin-document order.
    pub fn village_matrix(&self) -> Result<IndicatorMatrix> {
        let villages: Vec<&str> = self.admin.at_level(AdminLevel::Village).map(|u| u.unit_id.as_str()).collect();
        let codes = self.matrix.codes().to_vec();
        let mut values = Vec::with_capacity(villages.len() * codes.len());
        let mut counts = Vec::with_capacity(villages.len());
        for v in &villages {
            let row = self.matrix.unit_position(v).with_context(|| format!("village {v} is not in {INDICATORS}"))?;
            values.extend_from_slice(self.matrix.row(row));
            counts.push(self.matrix.household_counts()[row]);
        }
        Ok(IndicatorMatrix::new(villages.into_iter().map(String::from).collect(), codes, values, counts)?)
    }

    pub fn normalized_villages(&self) -> Result<IndicatorMatrix> {
        Ok(normalize(&self.village_matrix()?, &self.catalog)?)
    }

    /// Reads and validates a weight file against the workspace catalog.
    pub fn load_weights(&self, path: &Path) -> Result<WeightConfig> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config = WeightConfig::from_json(&text, &self.catalog).with_context(|| format!("{}", path.display()))?;
        check_weight_id(&config.id)?;
        validate_weights(config, &self.catalog).with_context(|| format!("invalid weights in {}", path.display()))
    }

    /// Weights of the latest `compute`.
    pub fn current_weights(&self) -> Result<WeightConfig> {
        let id = self
            .manifest
            .weight_config_id
            .as_deref()
            .with_context(|| format!("workspace {} has not been computed yet", self.root.display()))?;
        self.load_weights(&weights_path(&self.root, id))
    }

    pub fn assess(&self, weights: &WeightConfig) -> Result<LevelResults> {
        Ok(assess(&self.normalized_villages()?, &self.catalog, &self.admin, weights)?)
    }
}

/// Runs the assessment and writes the weights and one results CSV per
/// level. Everything is validated before the first write.
pub fn compute(root: &Path, weights_file: Option<&Path>) -> Result<LevelResults> {
    let ws = Workspace::open(root)?;
    let weights = match weights_file {
        Some(p) => ws.load_weights(p)?,
        None => validate_weights(default_weights(&ws.catalog), &ws.catalog)?,
    };
    let results = ws.assess(&weights)?;
    let outputs: Vec<(PathBuf, String)> = std::iter::once((weights_path(root, &weights.id), weights.to_json()))
        .chain(LEVELS.iter().map(|&l| (results_path(root, &weights.id, l), write_results_csv(results.get(l)))))
        .collect();

    for (path, text) in outputs {
        fs::create_dir_all(path.parent().expect("file has a parent"))?;
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    write_manifest(root, Some(weights.id.clone()))?;
    Ok(results)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Geojson,
    Csv,
}

/// Choropleth GeoJSON or results CSV for `level` under the weights of the
/// latest `compute`.
pub fn export(root: &Path, format: ExportFormat, level: AdminLevel) -> Result<String> {
    let ws = Workspace::open(root)?;
    let results = ws.assess(&ws.current_weights()?)?;
    Ok(match format {
        ExportFormat::Csv => write_results_csv(results.get(level)),
        ExportFormat::Geojson => export_choropleth(&ws.admin, results.get(level), level)?,
    })
}
