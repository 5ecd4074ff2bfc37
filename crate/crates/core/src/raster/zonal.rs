use std::collections::BTreeMap;

use super::{class_id, Grid, Result};
use crate::Scalar;

/// Summary of the value cells falling in one zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneStats<T> {
    pub count: usize,
    pub sum: T,
    pub mean: T,
    pub min: T,
    pub max: T,
    /// Cells strictly above the threshold passed to [`zonal_stats`].
    pub above: usize,
}

impl<T: Scalar> ZoneStats<T> {
    pub fn fraction_above(&self) -> T {
        T::of(self.above as f64 / self.count as f64)
    }
}

/// Per-zone statistics over cells valid in both grids. Zones without any
/// valid value cell are absent. Accumulation runs in row-major order.
pub fn zonal_stats<T: Scalar>(
    value: &Grid<T>,
    zones: &Grid<T>,
    threshold: T,
) -> Result<BTreeMap<i64, ZoneStats<T>>> {
    value.ensure_aligned(zones)?;
    let mut out: BTreeMap<i64, ZoneStats<T>> = BTreeMap::new();
    for (&v, &z) in value.values().iter().zip(zones.values()) {
        if value.is_nodata(v) || zones.is_nodata(z) {
            continue;
        }
        let above = usize::from(v > threshold);
        out.entry(class_id(z)?)
            .and_modify(|s| {
                s.count += 1;
                s.sum = s.sum + v;
                s.min = s.min.min(v);
                s.max = s.max.max(v);
                s.above += above;
            })
            .or_insert(ZoneStats { count: 1, sum: v, mean: v, min: v, max: v, above });
    }
    for s in out.values_mut() {
        s.mean = s.sum / T::of(s.count as f64);
    }
    Ok(out)
}
