use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CatalogTree, Determinant, IndicatorCatalog, ModelError};
use crate::Scalar;

/// Allowed deviation of a sibling group's weight sum from 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Path used in error messages for the top (determinant) group.
const ROOT_PATH: &str = "determinants";

/// Weights for every node of the catalog hierarchy.
///
/// Each map is one level of the tree, keyed by the parent path; the value is
/// the sibling group of child weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig<T> {
    pub id: String,
    pub determinant_weights: BTreeMap<Determinant, T>,
    pub component_weights: BTreeMap<Determinant, BTreeMap<String, T>>,
    pub subcomponent_weights: BTreeMap<(Determinant, String), BTreeMap<String, T>>,
    pub indicator_weights: BTreeMap<(Determinant, String, String), BTreeMap<String, T>>,
}

/// On-disk weight file: a nested object mirroring the hierarchy. Any sibling
/// group in which no weight is given falls back to equal weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct WeightDocument<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub determinants: BTreeMap<String, DeterminantWeights<T>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct DeterminantWeights<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<T>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<String, ComponentWeights<T>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct ComponentWeights<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<T>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subcomponents: BTreeMap<String, SubcomponentWeights<T>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct SubcomponentWeights<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<T>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub indicators: BTreeMap<String, T>,
}

fn equal_split<T: Scalar, K: Ord>(keys: impl IntoIterator<Item = K>) -> BTreeMap<K, T> {
    let keys: Vec<K> = keys.into_iter().collect();
    let w = T::of(1.0 / keys.len() as f64);
    keys.into_iter().map(|k| (k, w)).collect()
}

/// Equal weights within every sibling group of the catalog.
pub fn default_weights<T: Scalar>(catalog: &IndicatorCatalog) -> WeightConfig<T> {
    let tree = catalog.tree();
    let mut config = WeightConfig {
        id: "default".to_string(),
        determinant_weights: equal_split(tree.determinants.iter().map(|d| d.determinant)),
        component_weights: BTreeMap::new(),
        subcomponent_weights: BTreeMap::new(),
        indicator_weights: BTreeMap::new(),
    };
    for det in &tree.determinants {
        let d = det.determinant;
        config
            .component_weights
            .insert(d, equal_split(det.components.iter().map(|c| c.name.clone())));
        for comp in &det.components {
            config.subcomponent_weights.insert(
                (d, comp.name.clone()),
                equal_split(comp.subcomponents.iter().map(|s| s.name.clone())),
            );
            for sub in &comp.subcomponents {
                config.indicator_weights.insert(
                    (d, comp.name.clone(), sub.name.clone()),
                    equal_split(sub.indicators.iter().map(|&i| catalog.indicators()[i].code.clone())),
                );
            }
        }
    }
    config
}

impl<T: Scalar> WeightConfig<T> {
    /// Transcribes a weight document, filling every sibling group that has
    /// no weights at all with equal weights. The result is not validated.
    pub fn from_document(doc: &WeightDocument<T>, catalog: &IndicatorCatalog) -> Result<Self, ModelError> {
        let mut config = default_weights::<T>(catalog);
        config.id = doc.id.clone().unwrap_or_else(|| "custom".to_string());

        let mut dets: BTreeMap<Determinant, &DeterminantWeights<T>> = BTreeMap::new();
        for (name, node) in &doc.determinants {
            let det = name
                .parse::<Determinant>()
                .map_err(|_| ModelError::UnknownWeightNode { path: name.clone() })?;
            dets.insert(det, node);
        }

        let given: BTreeMap<Determinant, T> =
            dets.iter().filter_map(|(d, n)| n.weight.map(|w| (*d, w))).collect();
        if !given.is_empty() {
            config.determinant_weights = given;
        }

        for (&det, node) in &dets {
            let given: BTreeMap<String, T> = node
                .components
                .iter()
                .filter_map(|(c, n)| n.weight.map(|w| (c.clone(), w)))
                .collect();
            if !given.is_empty() {
                config.component_weights.insert(det, given);
            }
            for (comp, cnode) in &node.components {
                let given: BTreeMap<String, T> = cnode
                    .subcomponents
                    .iter()
                    .filter_map(|(s, n)| n.weight.map(|w| (s.clone(), w)))
                    .collect();
                if !given.is_empty() {
                    config.subcomponent_weights.insert((det, comp.clone()), given);
                }
                for (sub, snode) in &cnode.subcomponents {
                    if !snode.indicators.is_empty() {
                        config
                            .indicator_weights
                            .insert((det, comp.clone(), sub.clone()), snode.indicators.clone());
                    }
                }
            }
        }
        Ok(config)
    }

    /// Parses a JSON weight file against `catalog`. The result is not validated.
    pub fn from_json(text: &str, catalog: &IndicatorCatalog) -> Result<Self, ModelError> {
        let doc: WeightDocument<T> =
            serde_json::from_str(text).map_err(|e| ModelError::WeightSyntax(e.to_string()))?;
        Self::from_document(&doc, catalog)
    }

    /// Fully explicit nested document (every weight spelled out).
    pub fn to_document(&self) -> WeightDocument<T> {
        let mut doc = WeightDocument { id: Some(self.id.clone()), determinants: BTreeMap::new() };
        for (&det, &w) in &self.determinant_weights {
            doc.determinants.insert(
                det.as_str().to_string(),
                DeterminantWeights { weight: Some(w), components: BTreeMap::new() },
            );
        }
        for (&det, group) in &self.component_weights {
            let dnode = doc.determinants.entry(det.as_str().to_string()).or_default();
            for (comp, &w) in group {
                dnode.components.entry(comp.clone()).or_default().weight = Some(w);
            }
        }
        for ((det, comp), group) in &self.subcomponent_weights {
            let cnode = doc
                .determinants
                .entry(det.as_str().to_string())
                .or_default()
                .components
                .entry(comp.clone())
                .or_default();
            for (sub, &w) in group {
                cnode.subcomponents.entry(sub.clone()).or_default().weight = Some(w);
            }
        }
        for ((det, comp, sub), group) in &self.indicator_weights {
            doc.determinants
                .entry(det.as_str().to_string())
                .or_default()
                .components
                .entry(comp.clone())
                .or_default()
                .subcomponents
                .entry(sub.clone())
                .or_default()
                .indicators = group.clone();
        }
        doc
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document()).expect("weights serialize");
        s.push('\n');
        s
    }

    pub fn determinant_weight(&self, det: Determinant) -> Option<T> {
        self.determinant_weights.get(&det).copied()
    }

    pub fn component_weight(&self, det: Determinant, comp: &str) -> Option<T> {
        self.component_weights.get(&det)?.get(comp).copied()
    }

    pub fn subcomponent_weight(&self, det: Determinant, comp: &str, sub: &str) -> Option<T> {
        self.subcomponent_weights.get(&(det, comp.to_string()))?.get(sub).copied()
    }

    pub fn indicator_weight(&self, det: Determinant, comp: &str, sub: &str, code: &str) -> Option<T> {
        self.indicator_weights
            .get(&(det, comp.to_string(), sub.to_string()))?
            .get(code)
            .copied()
    }
}

fn check_group<T: Scalar>(
    group_path: &str,
    children: &[(String, String)],
    given: Option<&BTreeMap<String, T>>,
) -> Result<(), ModelError> {
    let mut sum = 0.0f64;
    for (key, path) in children {
        let w = given
            .and_then(|g| g.get(key))
            .ok_or_else(|| ModelError::MissingWeight { path: path.clone() })?;
        let v = w.as_f64();
        if !v.is_finite() {
            return Err(ModelError::NonFiniteWeight { path: path.clone() });
        }
        if v < 0.0 {
            return Err(ModelError::NegativeWeight { path: path.clone(), value: v });
        }
        sum += v;
    }
    // f32 configs cannot resolve 1e-9; widen to the type's rounding floor
    let tolerance = WEIGHT_SUM_TOLERANCE.max(T::epsilon().as_f64() * children.len() as f64);
    if (sum - 1.0).abs() > tolerance {
        return Err(ModelError::GroupSum { path: group_path.to_string(), sum });
    }
    Ok(())
}

fn check_unknown<T: Scalar>(config: &WeightConfig<T>, tree: &CatalogTree, catalog: &IndicatorCatalog) -> Result<(), ModelError> {
    let find_det = |d: Determinant| tree.determinants.iter().find(|n| n.determinant == d);
    let unknown = |path: String| Err(ModelError::UnknownWeightNode { path });

    for &d in config.determinant_weights.keys() {
        if find_det(d).is_none() {
            return unknown(d.to_string());
        }
    }
    for (&d, group) in &config.component_weights {
        let Some(dn) = find_det(d) else { return unknown(d.to_string()) };
        for comp in group.keys() {
            if !dn.components.iter().any(|c| &c.name == comp) {
                return unknown(format!("{d}/{comp}"));
            }
        }
    }
    for ((d, comp), group) in &config.subcomponent_weights {
        let Some(cn) = find_det(*d).and_then(|dn| dn.components.iter().find(|c| &c.name == comp)) else {
            return unknown(format!("{d}/{comp}"));
        };
        for sub in group.keys() {
            if !cn.subcomponents.iter().any(|s| &s.name == sub) {
                return unknown(format!("{d}/{comp}/{sub}"));
            }
        }
    }
    for ((d, comp, sub), group) in &config.indicator_weights {
        let Some(sn) = find_det(*d)
            .and_then(|dn| dn.components.iter().find(|c| &c.name == comp))
            .and_then(|cn| cn.subcomponents.iter().find(|s| &s.name == sub))
        else {
            return unknown(format!("{d}/{comp}/{sub}"));
        };
        for code in group.keys() {
            if !sn.indicators.iter().any(|&i| &catalog.indicators()[i].code == code) {
                return unknown(format!("{d}/{comp}/{sub}/{code}"));
            }
        }
    }
    Ok(())
}

/// Returns `config` unchanged when every catalog node has a finite,
/// non-negative weight, no weight names an unknown node, and every sibling
/// group sums to 1 within [`WEIGHT_SUM_TOLERANCE`].
pub fn validate_weights<T: Scalar>(
    config: WeightConfig<T>,
    catalog: &IndicatorCatalog,
) -> Result<WeightConfig<T>, ModelError> {
    let tree = catalog.tree();
    check_unknown(&config, tree, catalog)?;

    let dets: Vec<(String, String)> = tree
        .determinants
        .iter()
        .map(|d| (d.determinant.to_string(), d.determinant.to_string()))
        .collect();
    let det_group: BTreeMap<String, T> =
        config.determinant_weights.iter().map(|(d, w)| (d.to_string(), *w)).collect();
    check_group(ROOT_PATH, &dets, Some(&det_group))?;

    for dn in &tree.determinants {
        let d = dn.determinant;
        let comps: Vec<(String, String)> =
            dn.components.iter().map(|c| (c.name.clone(), format!("{d}/{}", c.name))).collect();
        check_group(&d.to_string(), &comps, config.component_weights.get(&d))?;
        for cn in &dn.components {
            let comp_path = format!("{d}/{}", cn.name);
            let subs: Vec<(String, String)> = cn
                .subcomponents
                .iter()
                .map(|s| (s.name.clone(), format!("{comp_path}/{}", s.name)))
                .collect();
            check_group(&comp_path, &subs, config.subcomponent_weights.get(&(d, cn.name.clone())))?;
            for sn in &cn.subcomponents {
                let sub_path = format!("{comp_path}/{}", sn.name);
                let codes: Vec<(String, String)> = sn
                    .indicators
                    .iter()
                    .map(|&i| {
                        let code = &catalog.indicators()[i].code;
                        (code.clone(), format!("{sub_path}/{code}"))
                    })
                    .collect();
                check_group(
                    &sub_path,
                    &codes,
                    config.indicator_weights.get(&(d, cn.name.clone(), sn.name.clone())),
                )?;
            }
        }
    }
    Ok(config)
}
