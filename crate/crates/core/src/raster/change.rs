use std::collections::BTreeMap;

use serde::Serialize;

use super::{class_id, Grid, Result};
use crate::Scalar;

/// Class-transition counts between two categorical epochs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangeMatrix {
    pub classes_a: Vec<i64>,
    pub classes_b: Vec<i64>,
    /// `counts[i][j]`: cells in `classes_a[i]` at epoch A and `classes_b[j]` at epoch B.
    pub counts: Vec<Vec<u64>>,
    /// Area of one cell (cellsize²).
    pub cell_area: f64,
}

impl ChangeMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn count(&self, from: i64, to: i64) -> u64 {
        match (self.classes_a.binary_search(&from), self.classes_b.binary_search(&to)) {
            (Ok(i), Ok(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    fn transition_area(&self, from_set: impl Fn(i64) -> bool, to_set: impl Fn(i64) -> bool) -> f64 {
        let mut cells = 0u64;
        for (i, &a) in self.classes_a.iter().enumerate() {
            for (j, &b) in self.classes_b.iter().enumerate() {
                if from_set(a) && to_set(b) {
                    cells += self.counts[i][j];
                }
            }
        }
        cells as f64 * self.cell_area
    }

    /// Area that moved from any `forest` class to a non-forest class.
    pub fn loss_area(&self, forest: &[i64]) -> f64 {
        self.transition_area(|a| forest.contains(&a), |b| !forest.contains(&b))
    }

    /// Area that moved from a non-forest class into any `forest` class.
    pub fn gain_area(&self, forest: &[i64]) -> f64 {
        self.transition_area(|a| !forest.contains(&a), |b| forest.contains(&b))
    }
}

/// Cross-tabulates two aligned categorical grids over cells valid in both.
pub fn change_matrix<T: Scalar>(epoch_a: &Grid<T>, epoch_b: &Grid<T>) -> Result<ChangeMatrix> {
    epoch_a.ensure_aligned(epoch_b)?;
    let mut pairs: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for (&a, &b) in epoch_a.values().iter().zip(epoch_b.values()) {
        if epoch_a.is_nodata(a) || epoch_b.is_nodata(b) {
            continue;
        }
        *pairs.entry((class_id(a)?, class_id(b)?)).or_default() += 1;
    }
    let mut classes_a: Vec<i64> = pairs.keys().map(|k| k.0).collect();
    let mut classes_b: Vec<i64> = pairs.keys().map(|k| k.1).collect();
    classes_a.dedup();
    classes_b.sort_unstable();
    classes_b.dedup();
    let mut counts = vec![vec![0u64; classes_b.len()]; classes_a.len()];
    for ((a, b), n) in pairs {
        let i = classes_a.binary_search(&a).unwrap();
        let j = classes_b.binary_search(&b).unwrap();
        counts[i][j] = n;
    }
    Ok(ChangeMatrix { classes_a, classes_b, counts, cell_area: epoch_a.cell_area() })
}
