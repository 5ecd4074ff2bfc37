use std::collections::BTreeMap;

use super::{assign_ranks_and_classes, Assessment, IndexError, Result, UnitAssessment, NUM_CLASSES};
use crate::model::AdminLevel;
use crate::Scalar;

/// Aggregates child units into their parents at `level`.
///
/// Every column of a parent is the support-weighted mean of its children's
/// present values, where a village's support is its household count.
/// Support adds up, so rolling up twice equals rolling up once. Parents are
/// ordered by id; classes and ranks are recomputed among them.
pub fn rollup<T: Scalar>(
    children: &Assessment<T>,
    parent_of: &BTreeMap<String, String>,
    level: AdminLevel,
) -> Result<Assessment<T>> {
    let mut groups: BTreeMap<&str, Vec<&UnitAssessment<T>>> = BTreeMap::new();
    for child in &children.units {
        let parent = parent_of.get(&child.unit_id).ok_or_else(|| IndexError::Orphan(child.unit_id.clone()))?;
        groups.entry(parent).or_default().push(child);
    }

    let ncols = children.columns.len();
    let mut units = Vec::with_capacity(groups.len());
    for (parent, kids) in groups {
        let mut values = Vec::with_capacity(ncols);
        let mut support = Vec::with_capacity(ncols);
        for j in 0..ncols {
            let mut num = T::zero();
            let mut den = T::zero();
            for kid in &kids {
                if let Some(v) = kid.values[j] {
                    num = num + kid.support[j] * v;
                    den = den + kid.support[j];
                }
            }
            values.push((den > T::zero()).then(|| num / den));
            support.push(den);
        }
        units.push(UnitAssessment {
            unit_id: parent.to_string(),
            household_count: kids.iter().map(|k| k.household_count).sum(),
            values,
            support,
            class: None,
            rank: None,
        });
    }
    assign_ranks_and_classes(&mut units, NUM_CLASSES)?;
    Ok(Assessment {
        level,
        weight_config_id: children.weight_config_id.clone(),
        columns: children.columns.clone(),
        units,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::IndexColumn;

    fn village(id: &str, hh: u64, vi: Option<f64>) -> UnitAssessment<f64> {
        let mass = hh as f64;
        UnitAssessment {
            unit_id: id.into(),
            household_count: hh,
            values: vec![vi],
            support: vec![if vi.is_some() { mass } else { 0.0 }],
            class: None,
            rank: None,
        }
    }

    fn villages(units: Vec<UnitAssessment<f64>>) -> Assessment<f64> {
        Assessment { level: AdminLevel::Village, weight_config_id: "w".into(), columns: vec![IndexColumn::Vi], units }
    }

    fn links(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn household_weighted_mean() {
        let a = villages(vec![village("v1", 10, Some(0.2)), village("v2", 30, Some(0.6))]);
        let m = rollup(&a, &links(&[("v1", "m"), ("v2", "m")]), AdminLevel::Municipality).unwrap();
        assert!((m.units[0].vi().unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(m.units[0].household_count, 40);
        assert_eq!(m.level, AdminLevel::Municipality);
    }

    #[test]
    fn singleton_and_missing_children() {
        let a = villages(vec![village("v1", 7, Some(0.3)), village("v2", 5, None)]);
        let m = rollup(&a, &links(&[("v1", "m1"), ("v2", "m2")]), AdminLevel::Municipality).unwrap();
        assert_eq!(m.units[0].vi(), Some(0.3));
        assert_eq!(m.units[1].vi(), None);
        assert_eq!(m.units[1].rank, None);
    }

    #[test]
    fn orphan_is_an_error() {
        let a = villages(vec![village("v1", 1, Some(0.3))]);
        assert_eq!(rollup(&a, &BTreeMap::new(), AdminLevel::Municipality), Err(IndexError::Orphan("v1".into())));
    }
}
