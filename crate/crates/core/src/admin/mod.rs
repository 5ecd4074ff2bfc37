//! Department → municipality → village hierarchy with boundary geometry.

mod adjacency;
mod geojson;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::AdminLevel;
use crate::raster::Polygon;

pub use adjacency::build_adjacency;
pub use geojson::{export_choropleth, load_admin_units, write_admin_units, CHOROPLETH_PROPERTIES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdminError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("document is not a GeoJSON FeatureCollection")]
    NotFeatureCollection,
    #[error("feature {index}: {message}")]
    Feature { index: usize, message: String },
    #[error("unit `{unit_id}`: unknown level `{value}`")]
    UnknownLevel { unit_id: String, value: String },
    #[error("unit id `{0}` appears more than once")]
    DuplicateId(String),
    #[error("unit `{unit_id}` has no parent{}", .parent_id.as_ref().map(|p| format!(" `{p}` in the document")).unwrap_or_default())]
    Orphan { unit_id: String, parent_id: Option<String> },
    #[error("parent links form a cycle through `{0}`")]
    Cycle(String),
    #[error("unit `{unit_id}` ({level}) has parent `{parent_id}` ({parent_level})")]
    LevelMismatch { unit_id: String, level: AdminLevel, parent_id: String, parent_level: AdminLevel },
    #[error("results are for level {found}, expected {expected}")]
    ResultLevel { expected: AdminLevel, found: AdminLevel },
}

pub type Result<T, E = AdminError> = std::result::Result<T, E>;

/// Boundary geometry, keeping the document's Polygon/MultiPolygon form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    Polygon(Polygon),
    MultiPolygon(Vec<Polygon>),
}

impl Geometry {
    pub fn polygons(&self) -> &[Polygon] {
        match self {
            Geometry::Polygon(p) => std::slice::from_ref(p),
            Geometry::MultiPolygon(ps) => ps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdminUnit {
    pub unit_id: String,
    pub name: String,
    pub level: AdminLevel,
    pub parent_id: Option<String>,
    pub geometry: Geometry,
    pub household_count: u64,
}

/// Neighbor rule for [`build_adjacency`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Contiguity {
    /// Any shared boundary point.
    #[default]
    Queen,
    /// A shared boundary segment of positive length.
    Rook,
}

impl FromStr for Contiguity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "queen" => Ok(Contiguity::Queen),
            "rook" => Ok(Contiguity::Rook),
            _ => Err(s.to_string()),
        }
    }
}

impl fmt::Display for Contiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Contiguity::Queen => "queen",
            Contiguity::Rook => "rook",
        })
    }
}

/// Validated hierarchy; units keep document order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdminHierarchy {
    units: Vec<AdminUnit>,
    positions: BTreeMap<String, usize>,
    warnings: Vec<String>,
}

impl AdminHierarchy {
    /// Checks ids, parent links, cycles and parent levels, in that order.
    /// Household totals that disagree with their children are recorded as
    /// warnings, not errors.
    pub fn new(units: Vec<AdminUnit>) -> Result<Self> {
        let mut positions = BTreeMap::new();
        for (i, u) in units.iter().enumerate() {
            if positions.insert(u.unit_id.clone(), i).is_some() {
                return Err(AdminError::DuplicateId(u.unit_id.clone()));
            }
        }
        for u in &units {
            match &u.parent_id {
                Some(p) if !positions.contains_key(p) => {
                    return Err(AdminError::Orphan { unit_id: u.unit_id.clone(), parent_id: Some(p.clone()) })
                }
                None if u.level != AdminLevel::Department => {
                    return Err(AdminError::Orphan { unit_id: u.unit_id.clone(), parent_id: None })
                }
                _ => {}
            }
        }
        for u in &units {
            let mut seen = BTreeSet::new();
            let mut cur = u;
            while let Some(p) = &cur.parent_id {
                if !seen.insert(p.as_str()) {
                    return Err(AdminError::Cycle(p.clone()));
                }
                cur = &units[positions[p]];
            }
        }
        for u in &units {
            let Some(p) = &u.parent_id else { continue };
            let parent = &units[positions[p]];
            if u.level.parent_level() != Some(parent.level) {
                return Err(AdminError::LevelMismatch {
                    unit_id: u.unit_id.clone(),
                    level: u.level,
                    parent_id: p.clone(),
                    parent_level: parent.level,
                });
            }
        }

        let mut h = Self { units, positions, warnings: Vec::new() };
        h.warnings = h.household_warnings();
        for w in &h.warnings {
            log::warn!("{w}");
        }
        Ok(h)
    }

    fn household_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for u in self.units.iter().filter(|u| u.level != AdminLevel::Village && u.household_count > 0) {
            let villages: u64 = self
                .units
                .iter()
                .filter(|v| v.level == AdminLevel::Village && self.is_ancestor(&u.unit_id, &v.unit_id))
                .map(|v| v.household_count)
                .sum();
            if villages != u.household_count {
                out.push(format!(
                    "{} `{}` lists {} households but its villages sum to {}",
                    u.level, u.unit_id, u.household_count, villages
                ));
            }
        }
        out
    }

    fn is_ancestor(&self, ancestor: &str, unit_id: &str) -> bool {
        let mut cur = self.get(unit_id);
        while let Some(p) = cur.and_then(|u| u.parent_id.as_deref()) {
            if p == ancestor {
                return true;
            }
            cur = self.get(p);
        }
        false
    }

    pub fn units(&self) -> &[AdminUnit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn get(&self, unit_id: &str) -> Option<&AdminUnit> {
        self.positions.get(unit_id).map(|&i| &self.units[i])
    }

    pub fn at_level(&self, level: AdminLevel) -> impl Iterator<Item = &AdminUnit> {
        self.units.iter().filter(move |u| u.level == level)
    }

    pub fn children(&self, unit_id: &str) -> impl Iterator<Item = &AdminUnit> {
        let id = unit_id.to_string();
        self.units.iter().filter(move |u| u.parent_id.as_deref() == Some(id.as_str()))
    }

    /// Ancestor of `unit_id` at `level` (the unit itself when already there).
    pub fn ancestor_at(&self, unit_id: &str, level: AdminLevel) -> Option<&AdminUnit> {
        let mut cur = self.get(unit_id)?;
        loop {
            if cur.level == level {
                return Some(cur);
            }
            cur = self.get(cur.parent_id.as_deref()?)?;
        }
    }

    /// Each unit at `from` mapped to its ancestor at `to`.
    pub fn ancestor_map(&self, from: AdminLevel, to: AdminLevel) -> BTreeMap<String, String> {
        self.at_level(from)
            .filter_map(|u| Some((u.unit_id.clone(), self.ancestor_at(&u.unit_id, to)?.unit_id.clone())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit(id: &str, level: AdminLevel, parent: Option<&str>, hh: u64) -> AdminUnit {
        AdminUnit {
            unit_id: id.into(),
            name: id.into(),
            level,
            parent_id: parent.map(str::to_string),
            geometry: Geometry::Polygon(Polygon::rect(0.0, 0.0, 1.0, 1.0)),
            household_count: hh,
        }
    }

    use AdminLevel::*;

    #[test]
    fn valid_hierarchy_and_ancestors() {
        let h = AdminHierarchy::new(vec![
            unit("D1", Department, None, 0),
            unit("M1", Municipality, Some("D1"), 30),
            unit("V1", Village, Some("M1"), 10),
            unit("V2", Village, Some("M1"), 20),
        ])
        .unwrap();
        assert!(h.warnings().is_empty());
        assert_eq!(h.ancestor_at("V2", Department).unwrap().unit_id, "D1");
        assert_eq!(h.ancestor_map(Village, Municipality)["V1"], "M1");
        assert_eq!(h.children("M1").count(), 2);
    }

    #[test]
    fn household_mismatch_is_a_warning() {
        let h = AdminHierarchy::new(vec![
            unit("D1", Department, None, 0),
            unit("M1", Municipality, Some("D1"), 31),
            unit("V1", Village, Some("M1"), 10),
        ])
        .unwrap();
        assert_eq!(h.warnings().len(), 1);
    }

    #[test]
    fn structural_errors() {
        let dup = AdminHierarchy::new(vec![unit("HN-LE-01", Department, None, 0), unit("HN-LE-01", Department, None, 0)]);
        assert_eq!(dup.unwrap_err(), AdminError::DuplicateId("HN-LE-01".into()));

        let mismatch = AdminHierarchy::new(vec![unit("D1", Department, None, 0), unit("V1", Village, Some("D1"), 0)]);
        assert!(matches!(mismatch.unwrap_err(), AdminError::LevelMismatch { .. }));

        let orphan = AdminHierarchy::new(vec![unit("V1", Village, Some("M9"), 0)]);
        assert!(matches!(orphan.unwrap_err(), AdminError::Orphan { .. }));
        let rootless = AdminHierarchy::new(vec![unit("M1", Municipality, None, 0)]);
        assert!(matches!(rootless.unwrap_err(), AdminError::Orphan { parent_id: None, .. }));

        let cycle = AdminHierarchy::new(vec![
            unit("A", Municipality, Some("B"), 0),
            unit("B", Municipality, Some("A"), 0),
        ]);
        assert!(matches!(cycle.unwrap_err(), AdminError::Cycle(_)));
    }
}
