use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Grid, RasterError, Result};
use crate::Scalar;

/// `[lower, upper)`; a `None` bound is unbounded on that side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ReclassRange<T> {
    #[serde(default)]
    pub lower: Option<T>,
    #[serde(default)]
    pub upper: Option<T>,
    pub output: T,
}

impl<T: Scalar> ReclassRange<T> {
    pub fn new(lower: Option<T>, upper: Option<T>, output: T) -> Self {
        Self { lower, upper, output }
    }

    fn contains(&self, v: T) -> bool {
        self.lower.is_none_or(|lo| v >= lo) && self.upper.is_none_or(|hi| v < hi)
    }
}

/// Value-to-score mapping. `default` applies to valid cells no entry
/// matches; `None` maps them to nodata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", bound = "T: Scalar")]
pub enum ReclassTable<T> {
    Continuous {
        ranges: Vec<ReclassRange<T>>,
        #[serde(default)]
        default: Option<T>,
    },
    Categorical {
        classes: BTreeMap<i64, T>,
        #[serde(default)]
        default: Option<T>,
    },
}

impl<T: Scalar> ReclassTable<T> {
    pub fn continuous(ranges: Vec<ReclassRange<T>>, default: Option<T>) -> Self {
        ReclassTable::Continuous { ranges, default }
    }

    pub fn categorical(classes: impl IntoIterator<Item = (i64, T)>, default: Option<T>) -> Self {
        ReclassTable::Categorical { classes: classes.into_iter().collect(), default }
    }

    /// Maps each listed class to itself.
    pub fn identity(classes: impl IntoIterator<Item = i64>) -> Self {
        Self::categorical(classes.into_iter().map(|c| (c, T::of(c as f64))), None)
    }

    /// Ranges must be non-empty, sorted ascending and pairwise disjoint;
    /// only the first may be unbounded below and only the last above.
    pub fn validate(&self) -> Result<()> {
        let ReclassTable::Continuous { ranges, .. } = self else { return Ok(()) };
        let last = ranges.len().saturating_sub(1);
        for (i, r) in ranges.iter().enumerate() {
            let finite = |b: Option<T>| b.is_none_or(|v| v.is_finite());
            if !finite(r.lower) || !finite(r.upper) {
                return Err(RasterError::InvalidRange { index: i });
            }
            if let (Some(lo), Some(hi)) = (r.lower, r.upper) {
                if lo >= hi {
                    return Err(RasterError::InvalidRange { index: i });
                }
            }
            if (r.lower.is_none() && i != 0) || (r.upper.is_none() && i != last) {
                return Err(RasterError::OverlappingRanges { index: i });
            }
            if i > 0 {
                let prev_hi = ranges[i - 1].upper;
                match (prev_hi, r.lower) {
                    (Some(hi), Some(lo)) if lo >= hi => {}
                    _ => return Err(RasterError::OverlappingRanges { index: i }),
                }
            }
        }
        Ok(())
    }

    /// Score for a valid input value.
    pub fn lookup(&self, v: T) -> Option<T> {
        match self {
            ReclassTable::Continuous { ranges, default } => {
                ranges.iter().find(|r| r.contains(v)).map(|r| r.output).or(*default)
            }
            ReclassTable::Categorical { classes, default } => {
                let f = v.as_f64();
                let hit = if f.fract() == 0.0 { classes.get(&(f as i64)).copied() } else { None };
                hit.or(*default)
            }
        }
    }

    /// Every value the table can emit.
    pub fn outputs(&self) -> Vec<T> {
        match self {
            ReclassTable::Continuous { ranges, default } => {
                ranges.iter().map(|r| r.output).chain(*default).collect()
            }
            ReclassTable::Categorical { classes, default } => {
                classes.values().copied().chain(*default).collect()
            }
        }
    }
}

/// Maps every valid cell through `table`; georeferencing and nodata are
/// kept, unmatched cells get the table default.
pub fn reclassify<T: Scalar>(grid: &Grid<T>, table: &ReclassTable<T>) -> Result<Grid<T>> {
    table.validate()?;
    Ok(grid.map_valid(grid.nodata_value(), |v| table.lookup(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(lo: f64, hi: f64, out: f64) -> ReclassRange<f64> {
        ReclassRange::new(Some(lo), Some(hi), out)
    }

    #[test]
    fn continuous_lookup() {
        let table = ReclassTable::continuous(vec![r(0.0, 5.0, 0.2), r(5.0, 90.0, 1.0)], None);
        let g = Grid::new(3, 1, 0.0, 0.0, 1.0, -9999.0, vec![7.3, 5.0, -9999.0]).unwrap();
        let out = reclassify(&g, &table).unwrap();
        assert_eq!(out.values(), &[1.0, 1.0, -9999.0]);
        assert_eq!(table.lookup(4.999), Some(0.2));
        assert_eq!(table.lookup(90.0), None);
    }

    #[test]
    fn identity_table() {
        let g = Grid::new(4, 1, 0.0, 0.0, 1.0, -9999.0, vec![1.0, 3.0, 2.0, -9999.0]).unwrap();
        let out = reclassify(&g, &ReclassTable::identity(1..=3)).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn categorical_default() {
        let table = ReclassTable::categorical([(1, 0.5)], Some(0.0));
        assert_eq!(table.lookup(1.0), Some(0.5));
        assert_eq!(table.lookup(2.0), Some(0.0));
        assert_eq!(table.lookup(1.5), Some(0.0));
        let strict = ReclassTable::categorical([(1, 0.5)], None);
        assert_eq!(strict.lookup(2.0), None);
    }

    #[test]
    fn rejects_overlap_and_disorder() {
        let overlap = ReclassTable::continuous(vec![r(0.0, 6.0, 0.2), r(5.0, 90.0, 1.0)], None);
        assert_eq!(overlap.validate(), Err(RasterError::OverlappingRanges { index: 1 }));
        let unsorted = ReclassTable::continuous(vec![r(5.0, 9.0, 0.2), r(0.0, 5.0, 1.0)], None);
        assert!(unsorted.validate().is_err());
        let inner_unbounded =
            ReclassTable::continuous(vec![ReclassRange::new(Some(0.0), None, 1.0), r(5.0, 9.0, 0.0)], None);
        assert!(inner_unbounded.validate().is_err());
        let empty = ReclassTable::continuous(vec![r(5.0, 5.0, 0.2)], None);
        assert_eq!(empty.validate(), Err(RasterError::InvalidRange { index: 0 }));
        let g = Grid::filled(1, 1, 0.0, 0.0, 1.0, -9999.0, 1.0).unwrap();
        assert!(reclassify(&g, &overlap).is_err());
    }

    #[test]
    fn json_form() {
        let table = ReclassTable::continuous(
            vec![ReclassRange::new(None, Some(800.0), 1.0), ReclassRange::new(Some(800.0), None, 0.1)],
            None,
        );
        let text = serde_json::to_string(&table).unwrap();
        assert!(text.starts_with(r#"{"continuous":"#));
        let back: ReclassTable<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, table);

        let cat: ReclassTable<f64> =
            serde_json::from_str(r#"{"categorical":{"classes":{"1":1.0,"6":0.0}}}"#).unwrap();
        assert_eq!(cat.lookup(6.0), Some(0.0));
    }
}
