#![allow(dead_code)]

use std::path::{Path, PathBuf};

use ccvi_service::fire::{self, FireRiskPaths};
use ccvi_service::ingest::{ingest, IngestInputs};
use ccvi_service::workspace::{self, FIRE_RISK};
use tempfile::TempDir;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn region() -> PathBuf {
    fixtures().join("region")
}

pub fn ingest_inputs() -> IngestInputs {
    IngestInputs {
        survey: region().join("survey.csv"),
        admin: region().join("admin.geojson"),
        rasters: region().join("rasters"),
        catalog: Some(region().join("catalog.json")),
        schema: None,
    }
}

pub fn fire_paths(dir: &Path) -> FireRiskPaths {
    FireRiskPaths {
        landcover: dir.join("landcover.asc"),
        dem: dir.join("dem.asc"),
        roads: dir.join("roads.asc"),
        settlements: dir.join("settlements.asc"),
        tables: None,
    }
}

/// Ingested and computed fixture workspace with fire-risk outputs.
pub fn computed_workspace() -> (TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let ws = tmp.path().join("ws");
    ingest(&ingest_inputs(), &ws).unwrap();
    fire::run(&fire_paths(&fixtures().join("fire_risk")), &ws.join(FIRE_RISK)).unwrap();
    workspace::compute(&ws, None).unwrap();
    (tmp, ws)
}

/// Every file under `dir` with its bytes, sorted by relative path.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

/// A weight document whose determinant weights sum to 1.2.
pub const BAD_WEIGHTS: &str = r#"{"id":"bad","determinants":{"Exposure":{"weight":0.4},"Sensitivity":{"weight":0.4},"AdaptiveCapacity":{"weight":0.4}}}"#;
