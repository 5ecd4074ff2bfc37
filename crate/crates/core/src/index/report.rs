use serde_json::{Map, Value};

use super::Assessment;
use crate::Scalar;

const LEADING: [&str; 3] = ["unit_id", "level", "household_count"];
const TRAILING: [&str; 3] = ["class", "rank", "weight_config_id"];

/// Result table columns: identity, every index column, class, rank and
/// the weight scenario id.
pub fn result_header<T: Scalar>(a: &Assessment<T>) -> Vec<String> {
    LEADING
        .iter()
        .map(|s| s.to_string())
        .chain(a.columns.iter().map(|c| c.name()))
        .chain(TRAILING.iter().map(|s| s.to_string()))
        .collect()
}

fn opt<V: ToString>(v: Option<V>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One row per unit, missing values as empty cells. Numbers use the
/// shortest representation that reads back to the same value.
pub fn write_results_csv<T: Scalar>(a: &Assessment<T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(result_header(a)).expect("in-memory write");
    for u in &a.units {
        let mut rec = vec![u.unit_id.clone(), a.level.to_string(), u.household_count.to_string()];
        rec.extend(u.values.iter().map(|v| opt(*v)));
        rec.extend([opt(u.class), opt(u.rank), a.weight_config_id.clone()]);
        w.write_record(rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn number<T: Scalar>(v: Option<T>) -> Value {
    v.and_then(|x| serde_json::Number::from_f64(x.as_f64())).map_or(Value::Null, Value::Number)
}

/// The same rows as [`write_results_csv`], as JSON objects with `null`
/// for missing values.
pub fn results_json<T: Scalar>(a: &Assessment<T>) -> Value {
    let header = result_header(a);
    let rows = a
        .units
        .iter()
        .map(|u| {
            let mut cells = vec![
                Value::from(u.unit_id.clone()),
                Value::from(a.level.to_string()),
                Value::from(u.household_count),
            ];
            cells.extend(u.values.iter().map(|v| number(*v)));
            cells.extend([
                u.class.map_or(Value::Null, Value::from),
                u.rank.map_or(Value::Null, Value::from),
                Value::from(a.weight_config_id.clone()),
            ]);
            Value::Object(header.iter().cloned().zip(cells).collect::<Map<String, Value>>())
        })
        .collect();
    Value::Array(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{IndexColumn, UnitAssessment};
    use crate::model::{AdminLevel, Determinant};

    fn sample() -> Assessment<f64> {
        Assessment {
            level: AdminLevel::Municipality,
            weight_config_id: "default".into(),
            columns: vec![IndexColumn::Determinant(Determinant::Exposure), IndexColumn::Vi],
            units: vec![
                UnitAssessment {
                    unit_id: "M1".into(),
                    household_count: 40,
                    values: vec![Some(0.1), Some(0.30000000000000004)],
                    support: vec![40.0, 40.0],
                    class: Some(3),
                    rank: Some(1),
                },
                UnitAssessment {
                    unit_id: "M2".into(),
                    household_count: 0,
                    values: vec![None, None],
                    support: vec![0.0, 0.0],
                    class: None,
                    rank: None,
                },
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let text = write_results_csv(&sample());
        assert_eq!(
            text,
            "unit_id,level,household_count,exposure_index,vi,class,rank,weight_config_id\n\
             M1,municipality,40,0.1,0.30000000000000004,3,1,default\n\
             M2,municipality,0,,,,,default\n"
        );
    }

    #[test]
    fn json_matches_csv_keys() {
        let a = sample();
        let rows = results_json(&a);
        let first = rows[0].as_object().unwrap();
        assert_eq!(first.len(), result_header(&a).len());
        assert_eq!(first["vi"].as_f64(), Some(0.30000000000000004));
        assert!(rows[1]["rank"].is_null());
    }
}
