use serde_json::{json, Map, Value};

use super::{AdminError, AdminHierarchy, AdminUnit, Geometry, Result};
use crate::index::{Assessment, IndexColumn};
use crate::model::{AdminLevel, Determinant};
use crate::raster::{Point, Polygon};
use crate::Scalar;

/// Property keys of every choropleth feature.
pub const CHOROPLETH_PROPERTIES: [&str; 8] = [
    "unit_id",
    "name",
    "vi",
    "exposure_index",
    "sensitivity_index",
    "adaptive_capacity_index",
    "class",
    "rank",
];

fn feature_err(index: usize, message: impl Into<String>) -> AdminError {
    AdminError::Feature { index, message: message.into() }
}

fn parse_ring(v: &Value, index: usize) -> Result<Vec<Point>> {
    let arr = v.as_array().ok_or_else(|| feature_err(index, "ring is not an array"))?;
    arr.iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([x, y]) => match (x.as_f64(), y.as_f64()) {
                (Some(x), Some(y)) => Ok([x, y]),
                _ => Err(feature_err(index, "coordinate is not a number")),
            },
            _ => Err(feature_err(index, "position must be [longitude, latitude]")),
        })
        .collect()
}

fn parse_polygon(v: &Value, index: usize) -> Result<Polygon> {
    let rings = v.as_array().ok_or_else(|| feature_err(index, "polygon is not an array of rings"))?;
    let mut rings = rings.iter().map(|r| parse_ring(r, index));
    let exterior = rings.next().ok_or_else(|| feature_err(index, "polygon has no rings"))??;
    let holes = rings.collect::<Result<Vec<_>>>()?;
    let p = Polygon { exterior, holes };
    if !p.is_valid() {
        return Err(feature_err(index, "ring with fewer than 3 distinct positions"));
    }
    Ok(p)
}

fn parse_geometry(v: &Value, index: usize) -> Result<Geometry> {
    let coords = &v["coordinates"];
    match v["type"].as_str() {
        Some("Polygon") => Ok(Geometry::Polygon(parse_polygon(coords, index)?)),
        Some("MultiPolygon") => {
            let parts = coords.as_array().ok_or_else(|| feature_err(index, "MultiPolygon coordinates"))?;
            Ok(Geometry::MultiPolygon(parts.iter().map(|p| parse_polygon(p, index)).collect::<Result<_>>()?))
        }
        other => Err(feature_err(index, format!("unsupported geometry type {other:?}"))),
    }
}

fn string_prop(props: &Map<String, Value>, key: &str, index: usize) -> Result<String> {
    match props.get(key) {
        Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        _ => Err(feature_err(index, format!("missing or empty property `{key}`"))),
    }
}

/// Loads a GeoJSON FeatureCollection whose features carry `unit_id`,
/// `name`, `level`, `parent_id` and optionally `household_count`.
pub fn load_admin_units(document: &str) -> Result<AdminHierarchy> {
    let doc: Value = serde_json::from_str(document).map_err(|e| AdminError::Syntax(e.to_string()))?;
    if doc["type"] != "FeatureCollection" {
        return Err(AdminError::NotFeatureCollection);
    }
    let features = doc["features"].as_array().ok_or(AdminError::NotFeatureCollection)?;
    let mut units = Vec::with_capacity(features.len());
    for (index, f) in features.iter().enumerate() {
        let props = f["properties"].as_object().ok_or_else(|| feature_err(index, "no properties"))?;
        let unit_id = string_prop(props, "unit_id", index)?;
        let name = string_prop(props, "name", index)?;
        let level_raw = string_prop(props, "level", index)?;
        let level = level_raw
            .parse::<AdminLevel>()
            .map_err(|value| AdminError::UnknownLevel { unit_id: unit_id.clone(), value })?;
        let parent_id = match props.get("parent_id") {
            None | Some(Value::Null) => None,
            Some(_) => Some(string_prop(props, "parent_id", index)?),
        };
        let household_count = match props.get("household_count") {
            None | Some(Value::Null) => 0,
            Some(v) => v.as_u64().ok_or_else(|| feature_err(index, "household_count must be a non-negative integer"))?,
        };
        let geometry = parse_geometry(&f["geometry"], index)?;
        units.push(AdminUnit { unit_id, name, level, parent_id, geometry, household_count });
    }
    AdminHierarchy::new(units)
}

fn ring_json(ring: &[Point]) -> Value {
    Value::Array(ring.iter().map(|p| json!([p[0], p[1]])).collect())
}

fn polygon_json(p: &Polygon) -> Value {
    Value::Array(p.rings().map(ring_json).collect())
}

fn geometry_json(g: &Geometry) -> Value {
    match g {
        Geometry::Polygon(p) => json!({"type": "Polygon", "coordinates": polygon_json(p)}),
        Geometry::MultiPolygon(ps) => {
            json!({"type": "MultiPolygon", "coordinates": Value::Array(ps.iter().map(polygon_json).collect())})
        }
    }
}

fn collection(features: Vec<Value>) -> String {
    let mut s = serde_json::to_string(&json!({"type": "FeatureCollection", "features": features}))
        .expect("JSON values serialize");
    s.push('\n');
    s
}

/// Canonical document for a hierarchy: keys sorted, numbers in shortest
/// round-trip form. `load_admin_units` of the output reproduces the input.
pub fn write_admin_units(h: &AdminHierarchy) -> String {
    let features = h
        .units()
        .iter()
        .map(|u| {
            json!({
                "type": "Feature",
                "geometry": geometry_json(&u.geometry),
                "properties": {
                    "unit_id": u.unit_id,
                    "name": u.name,
                    "level": u.level.as_str(),
                    "parent_id": u.parent_id,
                    "household_count": u.household_count,
                },
            })
        })
        .collect();
    collection(features)
}

fn num<T: Scalar>(v: Option<T>) -> Value {
    v.and_then(|x| serde_json::Number::from_f64(x.as_f64())).map_or(Value::Null, Value::Number)
}

/// One feature per unit at `level` with the VI, the determinant indices,
/// class and rank. Units without results get null properties.
pub fn export_choropleth<T: Scalar>(h: &AdminHierarchy, results: &Assessment<T>, level: AdminLevel) -> Result<String> {
    if results.level != level {
        return Err(AdminError::ResultLevel { expected: level, found: results.level });
    }
    let features = h
        .at_level(level)
        .map(|u| {
            let r = results.unit(&u.unit_id);
            let col = |c: IndexColumn| r.and_then(|r| results.column_index(&c).and_then(|j| r.values[j]));
            let props = json!({
                "unit_id": u.unit_id,
                "name": u.name,
                "vi": num(col(IndexColumn::Vi)),
                "exposure_index": num(col(IndexColumn::Determinant(Determinant::Exposure))),
                "sensitivity_index": num(col(IndexColumn::Determinant(Determinant::Sensitivity))),
                "adaptive_capacity_index": num(col(IndexColumn::Determinant(Determinant::AdaptiveCapacity))),
                "class": r.and_then(|r| r.class),
                "rank": r.and_then(|r| r.rank),
            });
            json!({"type": "Feature", "geometry": geometry_json(&u.geometry), "properties": props})
        })
        .collect();
    Ok(collection(features))
}
