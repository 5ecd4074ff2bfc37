use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Aggregation, Determinant, ModelError, Polarity, Source};

const DEFAULT_CATALOG: &str = include_str!("../../data/default_catalog.json");

/// One measurable indicator and where it sits in the hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorDefinition {
    pub code: String,
    pub name: String,
    pub determinant: Determinant,
    pub component: String,
    pub subcomponent: String,
    pub unit: String,
    pub source: Source,
    pub polarity: Polarity,
    pub survey_field: Option<String>,
    pub aggregation: Aggregation,
    /// Cut-off for `ZonalFraction` indicators: the indicator is the share of
    /// a unit's valid cells strictly above this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubcomponentNode {
    pub name: String,
    /// Positions in [`IndicatorCatalog::indicators`].
    pub indicators: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentNode {
    pub name: String,
    pub subcomponents: Vec<SubcomponentNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantNode {
    pub determinant: Determinant,
    pub components: Vec<ComponentNode>,
}

/// Determinants in canonical order; components, subcomponents and
/// indicators in order of first appearance in the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogTree {
    pub determinants: Vec<DeterminantNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorCatalog {
    indicators: Vec<IndicatorDefinition>,
    tree: CatalogTree,
}

impl IndicatorCatalog {
    /// Builds a catalog from definitions, checking every invariant.
    /// Reported line numbers are 1-based record positions.
    pub fn new(indicators: Vec<IndicatorDefinition>) -> Result<Self, ModelError> {
        let lines: Vec<usize> = (1..=indicators.len()).collect();
        Self::with_lines(indicators, &lines)
    }

    fn with_lines(indicators: Vec<IndicatorDefinition>, lines: &[usize]) -> Result<Self, ModelError> {
        if indicators.is_empty() {
            return Err(ModelError::EmptyCatalog);
        }
        let mut seen: HashMap<&str, ()> = HashMap::new();
        for (def, &line) in indicators.iter().zip(lines) {
            if def.code.trim().is_empty() {
                return Err(ModelError::EmptyCode { line });
            }
            if seen.insert(def.code.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateCode { code: def.code.clone(), line });
            }
            match (def.source, &def.survey_field) {
                (Source::SurveyQuestion, None) => {
                    return Err(ModelError::MissingSurveyField { code: def.code.clone(), line })
                }
                (Source::SurveyQuestion, Some(f)) if f.trim().is_empty() => {
                    return Err(ModelError::MissingSurveyField { code: def.code.clone(), line })
                }
                (Source::GisAnalysis, Some(f)) => {
                    return Err(ModelError::UnexpectedSurveyField {
                        code: def.code.clone(),
                        line,
                        field: f.clone(),
                    })
                }
                _ => {}
            }
            let zonal_source = def.source == Source::GisAnalysis;
            if def.aggregation.is_zonal() != zonal_source {
                return Err(ModelError::AggregationMismatch {
                    code: def.code.clone(),
                    line,
                    aggregation: def.aggregation,
                    source_kind: def.source,
                });
            }
        }
        let tree = build_tree(&indicators);
        Ok(Self { indicators, tree })
    }

    pub fn indicators(&self) -> &[IndicatorDefinition] {
        &self.indicators
    }

    pub fn tree(&self) -> &CatalogTree {
        &self.tree
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }

    pub fn get(&self, code: &str) -> Option<&IndicatorDefinition> {
        self.indicators.iter().find(|d| d.code == code)
    }

    pub fn position(&self, code: &str) -> Option<usize> {
        self.indicators.iter().position(|d| d.code == code)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.indicators.iter().map(|d| d.code.as_str())
    }

    /// Keeps only indicators accepted by `keep`; the hierarchy is rebuilt.
    pub fn subset(&self, keep: impl Fn(&IndicatorDefinition) -> bool) -> Result<Self, ModelError> {
        Self::new(self.indicators.iter().filter(|d| keep(d)).cloned().collect())
    }

    /// Catalog file form: a JSON array of indicator records.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, def) in self.indicators.iter().enumerate() {
            out.push_str("  ");
            out.push_str(&serde_json::to_string(def).expect("indicator serializes"));
            if i + 1 < self.indicators.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out
    }
}

fn build_tree(indicators: &[IndicatorDefinition]) -> CatalogTree {
    let mut determinants: Vec<DeterminantNode> = Vec::new();
    for det in Determinant::ALL {
        let mut components: Vec<ComponentNode> = Vec::new();
        for (i, def) in indicators.iter().enumerate().filter(|(_, d)| d.determinant == det) {
            let comp = match components.iter_mut().position(|c| c.name == def.component) {
                Some(p) => &mut components[p],
                None => {
                    components.push(ComponentNode { name: def.component.clone(), subcomponents: vec![] });
                    components.last_mut().unwrap()
                }
            };
            match comp.subcomponents.iter_mut().find(|s| s.name == def.subcomponent) {
                Some(sub) => sub.indicators.push(i),
                None => comp
                    .subcomponents
                    .push(SubcomponentNode { name: def.subcomponent.clone(), indicators: vec![i] }),
            }
        }
        if !components.is_empty() {
            determinants.push(DeterminantNode { determinant: det, components });
        }
    }
    CatalogTree { determinants }
}

#[derive(Deserialize)]
struct RawIndicator {
    code: String,
    name: String,
    determinant: String,
    component: String,
    subcomponent: String,
    #[serde(default)]
    unit: String,
    source: String,
    polarity: String,
    #[serde(default)]
    survey_field: Option<String>,
    aggregation: String,
    #[serde(default)]
    threshold: Option<f64>,
}

fn parse_enum<T: for<'de> Deserialize<'de>>(
    value: &str,
    field: &'static str,
    code: &str,
    line: usize,
) -> Result<T, ModelError> {
    serde_json::from_value(serde_json::Value::String(value.to_string())).map_err(|_| {
        ModelError::UnknownEnumValue { code: code.to_string(), line, field, value: value.to_string() }
    })
}

/// Parses a catalog document (JSON array of indicator records).
pub fn load_catalog(document: &str) -> Result<IndicatorCatalog, ModelError> {
    let raw: Vec<RawIndicator> =
        serde_json::from_str(document).map_err(|e| ModelError::Syntax(e.to_string()))?;
    let lines = element_lines(document);
    let mut defs = Vec::with_capacity(raw.len());
    for (i, r) in raw.into_iter().enumerate() {
        let line = lines.get(i).copied().unwrap_or(0);
        let determinant = r.determinant.parse::<Determinant>().map_err(|value| {
            ModelError::UnknownDeterminant { code: r.code.clone(), line, value }
        })?;
        let source = parse_enum(&r.source, "source", &r.code, line)?;
        let polarity = parse_enum(&r.polarity, "polarity", &r.code, line)?;
        let aggregation = parse_enum(&r.aggregation, "aggregation", &r.code, line)?;
        defs.push(IndicatorDefinition {
            code: r.code,
            name: r.name,
            determinant,
            component: r.component,
            subcomponent: r.subcomponent,
            unit: r.unit,
            source,
            polarity,
            survey_field: r.survey_field.filter(|f| !f.is_empty()),
            aggregation,
            threshold: r.threshold,
        });
    }
    IndicatorCatalog::with_lines(defs, &lines)
}

/// The shipped catalog covering every indicator row of the reference
/// assessment table.
pub fn default_catalog() -> IndicatorCatalog {
    load_catalog(DEFAULT_CATALOG).expect("built-in catalog is valid")
}

/// 1-based line on which each element of the top-level JSON array starts.
fn element_lines(text: &str) -> Vec<usize> {
    let mut lines = Vec::new();
    let mut line = 1;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    let mut expecting = false;
    for ch in text.chars() {
        if ch == '\n' {
            line += 1;
        }
        if in_string {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
            }
            continue;
        }
        if expecting && depth == 1 && !ch.is_whitespace() && ch != ']' {
            lines.push(line);
            expecting = false;
        }
        match ch {
            '"' => in_string = true,
            '[' | '{' => {
                depth += 1;
                if depth == 1 {
                    expecting = true;
                }
            }
            ']' | '}' => depth = depth.saturating_sub(1),
            ',' if depth == 1 => expecting = true,
            _ => {}
        }
    }
    lines
}
