use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// How a survey column is parsed and turned into a per-household number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    /// Non-negative integer, used as is.
    Count,
    /// Finite number, used as is.
    Number,
    /// yes/no (also y/n, true/false, 1/0) → 1/0.
    YesNo,
    /// Closed code set, each code scored.
    Category { codes: BTreeMap<String, f64> },
    /// Number; 1 when strictly below `threshold`, else 0.
    Below { threshold: f64 },
    /// Number; 1 when strictly below `low` or strictly above `high`, else 0.
    Outside { low: f64, high: f64 },
    /// Member count divided by the household's `denominator` count (less
    /// this count when `exclude_numerator`), denominator floored at 1.
    MemberRatio { denominator: String, exclude_numerator: bool },
}

impl FieldKind {
    /// Numeric columns that hold a plain number rather than a code.
    pub(crate) fn is_numeric(&self) -> bool {
        matches!(self, FieldKind::Number | FieldKind::Below { .. } | FieldKind::Outside { .. })
    }

    pub(crate) fn is_count(&self) -> bool {
        matches!(self, FieldKind::Count | FieldKind::MemberRatio { .. })
    }
}

/// Survey field → kind. Category scores are editable configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurveySchema {
    pub fields: BTreeMap<String, FieldKind>,
}

fn codes(pairs: &[(&str, f64)]) -> FieldKind {
    FieldKind::Category { codes: pairs.iter().map(|&(c, s)| (c.to_string(), s)).collect() }
}

impl Default for SurveySchema {
    fn default() -> Self {
        use FieldKind::*;
        let fields: [(&str, FieldKind); 23] = [
            ("irrigation", YesNo),
            ("farm_area_ha", Below { threshold: 2.0 }),
            ("crop_types", Count),
            ("members", Count),
            ("head_sex", codes(&[("male", 0.0), ("female", 1.0)])),
            ("head_school_years", Below { threshold: 3.0 }),
            ("head_age", Outside { low: 18.0, high: 45.0 }),
            ("employed_members", Count),
            ("members_outside", Count),
            ("remittances", YesNo),
            ("dependents", MemberRatio { denominator: "members".into(), exclude_numerator: true }),
            ("disabled_members", MemberRatio { denominator: "members".into(), exclude_numerator: false }),
            ("orphans", YesNo),
            ("water_source", codes(&[("public", 0.0), ("truck", 0.25), ("well", 0.5), ("river", 1.0)])),
            (
                "water_distance",
                codes(&[("a", 0.0), ("b", 0.5), ("c", 1.0), ("d", 1.5), ("e", 2.0), ("f", 2.5)]),
            ),
            // sewer, septic tank, pit latrine, drains to river, none
            ("sewage", codes(&[("a", 0.0), ("c", 0.25), ("d", 0.5), ("b", 0.75), ("e", 1.0)])),
            ("credit", YesNo),
            ("market_minutes", Number),
            ("chronic_members", Count),
            ("bed_nets", YesNo),
            ("dengue_members", Count),
            ("info_access", YesNo),
            ("info_orgs", Count),
        ];
        Self { fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }
}

impl SurveySchema {
    pub fn get(&self, field: &str) -> Option<&FieldKind> {
        self.fields.get(field)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}
