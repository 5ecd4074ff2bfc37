//! Seeded synthetic dataset: a two-department region with survey,
//! boundaries and indicator rasters, plus a small fire-risk scene.
//!
//! Only basic float arithmetic is used, so output is identical on every
//! platform for a given seed.

use std::fs;
use std::path::Path;

use anyhow::Result;
use ccvi_core::admin::{write_admin_units, Geometry};
use ccvi_core::model::default_catalog;
use ccvi_core::raster::{write_ascii_grid, Polygon};
use ccvi_core::survey::{FieldKind, SurveySchema};
use ccvi_core::{AdminHierarchy, AdminLevel, AdminUnit, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 7;
pub const REGION_DIR: &str = "region";
pub const FIRE_DIR: &str = "fire_risk";

const NODATA: f64 = -9999.0;
const SIDE: usize = 100;
const CELL: f64 = 0.01;
const WEST: f64 = -89.0;
const SOUTH: f64 = 14.0;
/// Households per village, 200 in total.
const VILLAGE_SIZES: [usize; 8] = [30, 20, 25, 35, 15, 25, 20, 30];
/// Financial and market questions were not asked.
const SKIPPED_FIELDS: [&str; 2] = ["credit", "market_minutes"];

/// (code, low, high, integer-valued)
const LAYERS: [(&str, f64, f64, bool); 12] = [
    ("FRQ_DRT", 0.0, 6.0, false),
    ("FRQ_FLD", 0.0, 5.0, false),
    ("TEMP_CHG", 0.5, 2.5, false),
    ("PRECIP_CHG", -20.0, 10.0, false),
    ("FIRE_RISK", 1.0, 5.0, true),
    ("SOIL_MOIST", 0.0, 1.0, false),
    ("SOC", 5.0, 95.0, false),
    ("LC_CHANGE", 0.0, 1.0, true),
    ("LAND_DEGR", 0.0, 1.0, false),
    ("ROAD_QUALITY", 0.0, 1.0, false),
    ("HEALTH_5KM", 0.0, 1.0, false),
    ("DENGUE_AREA", 0.0, 1.0, false),
];

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Smooth field in [0, 1]: bilinear interpolation of a coarse random
/// lattice plus a little cell noise.
fn smooth_field(rng: &mut ChaCha8Rng, nrows: usize, ncols: usize) -> Vec<f64> {
    const KNOTS: usize = 5;
    let lattice: Vec<f64> = (0..KNOTS * KNOTS).map(|_| rng.random::<f64>()).collect();
    let mut out = Vec::with_capacity(nrows * ncols);
    for r in 0..nrows {
        for c in 0..ncols {
            let fy = r as f64 / (nrows - 1) as f64 * (KNOTS - 1) as f64;
            let fx = c as f64 / (ncols - 1) as f64 * (KNOTS - 1) as f64;
            let (y0, x0) = ((fy as usize).min(KNOTS - 2), (fx as usize).min(KNOTS - 2));
            let (ty, tx) = (fy - y0 as f64, fx - x0 as f64);
            let at = |y: usize, x: usize| lattice[y * KNOTS + x];
            let top = at(y0, x0) * (1.0 - tx) + at(y0, x0 + 1) * tx;
            let bottom = at(y0 + 1, x0) * (1.0 - tx) + at(y0 + 1, x0 + 1) * tx;
            let v = top * (1.0 - ty) + bottom * ty + 0.1 * (rng.random::<f64>() - 0.5);
            out.push(v.clamp(0.0, 1.0));
        }
    }
    out
}

fn layer(rng: &mut ChaCha8Rng, lo: f64, hi: f64, integer: bool) -> Grid {
    let values = smooth_field(rng, SIDE, SIDE)
        .into_iter()
        .map(|t| {
            if rng.random_bool(0.01) {
                NODATA
            } else if integer {
                (lo + t * (hi - lo)).round()
            } else {
                round2(lo + t * (hi - lo))
            }
        })
        .collect();
    Grid::new(SIDE, SIDE, WEST, SOUTH, CELL, NODATA, values).expect("fixture grid")
}

fn admin_unit(id: &str, name: &str, level: AdminLevel, parent: Option<&str>, geometry: Polygon, hh: u64) -> AdminUnit {
    AdminUnit {
        unit_id: id.into(),
        name: name.into(),
        level,
        parent_id: parent.map(String::from),
        geometry: Geometry::Polygon(geometry),
        household_count: hh,
    }
}

const DEPARTMENT_NAMES: [&str; 2] = ["Alta Sierra", "Valle Bajo"];
const MUNICIPALITY_NAMES: [&str; 4] = ["San Rafael", "El Porvenir", "Santa Cruz", "La Esperanza"];
const VILLAGE_NAMES: [&str; 8] =
    ["Los Pinos", "El Roble", "Agua Fria", "Las Lajas", "El Cedro", "Piedra Blanca", "Rio Claro", "Los Encinos"];

/// Departments split the region west/east, municipalities north/south,
/// villages west/east along a kinked line.
pub fn admin_hierarchy() -> AdminHierarchy {
    let mut units = Vec::new();
    for d in 0..2 {
        let (dx0, dx1) = (WEST + 0.5 * d as f64, WEST + 0.5 * (d + 1) as f64);
        let did = format!("D{}", d + 1);
        let d_hh: usize = VILLAGE_SIZES[d * 4..d * 4 + 4].iter().sum();
        units.push(admin_unit(
            &did,
            DEPARTMENT_NAMES[d],
            AdminLevel::Department,
            None,
            Polygon::rect(dx0, SOUTH, dx1, SOUTH + 1.0),
            d_hh as u64,
        ));
        for m in 0..2 {
            // m = 0 is the northern half
            let (y0, y1) = (SOUTH + 0.5 * (1 - m) as f64, SOUTH + 0.5 * (2 - m) as f64);
            let mi = d * 2 + m;
            let mid = format!("{did}-M{}", m + 1);
            let m_hh = VILLAGE_SIZES[mi * 2] + VILLAGE_SIZES[mi * 2 + 1];
            units.push(admin_unit(
                &mid,
                MUNICIPALITY_NAMES[mi],
                AdminLevel::Municipality,
                Some(&did),
                Polygon::rect(dx0, y0, dx1, y1),
                m_hh as u64,
            ));
            let xm = (dx0 + dx1) / 2.0;
            let kink = [xm + 0.03, (y0 + y1) / 2.0];
            let west = Polygon::new(vec![[dx0, y0], [xm, y0], kink, [xm, y1], [dx0, y1], [dx0, y0]]);
            let east = Polygon::new(vec![[xm, y0], [dx1, y0], [dx1, y1], [xm, y1], kink, [xm, y0]]);
            for (v, poly) in [west, east].into_iter().enumerate() {
                let vi = mi * 2 + v;
                units.push(admin_unit(
                    &format!("{mid}-V{}", v + 1),
                    VILLAGE_NAMES[vi],
                    AdminLevel::Village,
                    Some(&mid),
                    poly,
                    VILLAGE_SIZES[vi] as u64,
                ));
            }
        }
    }
    AdminHierarchy::new(units).expect("fixture hierarchy is valid")
}

fn answer(kind: &FieldKind, field: &str, lean: f64, members: u64, rng: &mut ChaCha8Rng) -> String {
    let yes = |p: f64, rng: &mut ChaCha8Rng| if rng.random_bool(p) { "yes" } else { "no" }.to_string();
    match (field, kind) {
        ("members", _) => members.to_string(),
        ("dependents", _) => rng.random_range(0..=members).to_string(),
        ("disabled_members" | "employed_members", _) => rng.random_range(0..=members.min(3)).to_string(),
        ("farm_area_ha", _) => round2(rng.random_range(0.2..1.0 + 6.0 * (1.0 - lean))).to_string(),
        ("head_school_years", _) => rng.random_range(0..=12u32).to_string(),
        ("head_age", _) => rng.random_range(16..=80u32).to_string(),
        ("head_sex", _) => if rng.random_bool(0.15 + 0.3 * lean) { "female" } else { "male" }.to_string(),
        (_, FieldKind::YesNo) => yes(0.2 + 0.6 * lean, rng),
        (_, FieldKind::Count) => rng.random_range(0..=3u32).to_string(),
        (_, FieldKind::Category { codes }) => {
            let keys: Vec<&String> = codes.keys().collect();
            keys[rng.random_range(0..keys.len())].clone()
        }
        (_, FieldKind::Number | FieldKind::Below { .. } | FieldKind::Outside { .. }) => {
            round2(rng.random_range(0.0..60.0)).to_string()
        }
        (_, FieldKind::MemberRatio { .. }) => rng.random_range(0..=members).to_string(),
    }
}

/// Survey CSV with 200 households; about 3% of answers are blank.
pub fn survey_csv(admin: &AdminHierarchy, rng: &mut ChaCha8Rng) -> String {
    let schema = SurveySchema::default();
    let fields: Vec<(&String, &FieldKind)> =
        schema.fields.iter().filter(|(f, _)| !SKIPPED_FIELDS.contains(&f.as_str())).collect();
    let villages: Vec<&AdminUnit> = admin.at_level(AdminLevel::Village).collect();
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for (v, &n) in VILLAGE_SIZES.iter().enumerate() {
        let lean = rng.random::<f64>();
        rows.extend(std::iter::repeat_n((v, lean), n));
    }
    // interleave villages deterministically
    for i in (1..rows.len()).rev() {
        rows.swap(i, rng.random_range(0..=i));
    }

    let mut out = String::from("household_id,village_id");
    for (f, _) in &fields {
        out.push(',');
        out.push_str(f);
    }
    out.push('\n');
    for (h, (v, lean)) in rows.into_iter().enumerate() {
        out.push_str(&format!("HH{:04},{}", h + 1, villages[v].unit_id));
        let members = rng.random_range(1..=9u64);
        for (field, kind) in &fields {
            let cell = answer(kind, field, lean, members, rng);
            out.push(',');
            if field.as_str() == "members" || !rng.random_bool(0.03) {
                out.push_str(&cell);
            }
        }
        out.push('\n');
    }
    out
}

/// 20×20 scene, 30 m cells: land cover, DEM, a road cross and two
/// settlements.
pub fn fire_scene(rng: &mut ChaCha8Rng) -> [(&'static str, Grid); 4] {
    const N: usize = 20;
    let grid = |values: Vec<f64>| Grid::new(N, N, 500_000.0, 1_600_000.0, 30.0, NODATA, values).expect("scene grid");
    let land_cover = smooth_field(rng, N, N).into_iter().map(|t| (1.0 + t * 6.99).floor()).collect();
    let dem = smooth_field(rng, N, N)
        .into_iter()
        .enumerate()
        .map(|(i, t)| round2(600.0 + 40.0 * (i % N) as f64 + 900.0 * t))
        .collect();
    let roads = (0..N * N).map(|i| f64::from(u8::from(i / N == 5 || i % N == 12))).collect();
    let settlements = (0..N * N).map(|i| f64::from(u8::from(i == 3 * N + 3 || i == 16 * N + 15))).collect();
    [
        ("landcover.asc", grid(land_cover)),
        ("dem.asc", grid(dem)),
        ("roads.asc", grid(roads)),
        ("settlements.asc", grid(settlements)),
    ]
}

/// Writes `<out>/region/{catalog.json, admin.geojson, survey.csv,
/// rasters/*.asc}` and `<out>/fire_risk/*.asc`.
pub fn write(out: &Path, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = out.join(REGION_DIR);
    let rasters = region.join("rasters");
    fs::create_dir_all(&rasters)?;
    let admin = admin_hierarchy();
    fs::write(region.join("catalog.json"), default_catalog().to_json())?;
    fs::write(region.join("admin.geojson"), write_admin_units(&admin))?;
    fs::write(region.join("survey.csv"), survey_csv(&admin, &mut rng))?;
    for (code, lo, hi, integer) in LAYERS {
        fs::write(rasters.join(format!("{code}.asc")), write_ascii_grid(&layer(&mut rng, lo, hi, integer)))?;
    }
    let fire = out.join(FIRE_DIR);
    fs::create_dir_all(&fire)?;
    for (name, g) in fire_scene(&mut rng) {
        fs::write(fire.join(name), write_ascii_grid(&g))?;
    }
    Ok(())
}
