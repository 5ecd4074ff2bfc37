use std::cmp::Ordering;

use super::{IndexError, Result, UnitAssessment};
use crate::Scalar;

pub const NUM_CLASSES: u32 = 5;

/// Quantile classes `1..=k`: `1 + floor(k · (r − 1) / n)` with `r` the
/// average 1-based rank of the value (ties share a rank), capped at `k`.
/// Evaluated in integers, so it is exact.
pub fn classify_quantiles<T: Scalar>(values: &[T], k: u32) -> Result<Vec<u32>> {
    if k < 2 {
        return Err(IndexError::TooFewClasses(k));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut classes = vec![0u32; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // twice the average rank minus 2: (start+1) + (end+1) - 2
        let twice_r_minus_2 = (start + end) as u64;
        let class = 1 + (u64::from(k) * twice_r_minus_2) / (2 * n as u64);
        for &i in &order[start..=end] {
            classes[i] = (class as u32).min(k);
        }
        start = end + 1;
    }
    Ok(classes)
}

/// Ranks units by descending VI (ties by unit id) and assigns quantile
/// classes; units without a VI get neither.
pub fn assign_ranks_and_classes<T: Scalar>(units: &mut [UnitAssessment<T>], k: u32) -> Result<()> {
    let mut scored: Vec<usize> = (0..units.len()).filter(|&i| units[i].vi().is_some()).collect();
    let vis: Vec<T> = scored.iter().map(|&i| units[i].vi().unwrap()).collect();
    let classes = classify_quantiles(&vis, k)?;
    for (&i, c) in scored.iter().zip(classes) {
        units[i].class = Some(c);
    }
    scored.sort_by(|&a, &b| {
        let (va, vb) = (units[a].vi().unwrap(), units[b].vi().unwrap());
        vb.partial_cmp(&va).unwrap_or(Ordering::Equal).then_with(|| units[a].unit_id.cmp(&units[b].unit_id))
    });
    for (r, &i) in scored.iter().enumerate() {
        units[i].rank = Some(r as u32 + 1);
    }
    for u in units.iter_mut().filter(|u| u.vi().is_none()) {
        u.class = None;
        u.rank = None;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_per_class() {
        assert_eq!(classify_quantiles(&[0.5, 0.1, 0.9, 0.3, 0.7], 5).unwrap(), vec![3, 1, 5, 2, 4]);
    }

    #[test]
    fn ties_share_a_class() {
        assert_eq!(classify_quantiles(&[2.0; 7], 5).unwrap(), vec![3; 7]);
    }

    #[test]
    fn two_classes_of_ten() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(classify_quantiles(&v, 2).unwrap(), vec![1, 1, 1, 1, 1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn rejects_k_below_two() {
        assert_eq!(classify_quantiles(&[1.0], 1), Err(IndexError::TooFewClasses(1)));
        assert_eq!(classify_quantiles::<f64>(&[], 5).unwrap(), Vec::<u32>::new());
    }

    fn unit(id: &str, vi: Option<f64>) -> UnitAssessment<f64> {
        UnitAssessment { unit_id: id.into(), household_count: 1, values: vec![vi], support: vec![1.0], class: None, rank: None }
    }

    #[test]
    fn ranks_descending_with_id_ties() {
        let mut us = vec![unit("b", Some(0.5)), unit("a", Some(0.5)), unit("c", Some(0.9)), unit("d", None)];
        assign_ranks_and_classes(&mut us, 5).unwrap();
        let ranks: Vec<Option<u32>> = us.iter().map(|u| u.rank).collect();
        assert_eq!(ranks, vec![Some(3), Some(2), Some(1), None]);
        assert_eq!(us[3].class, None);
    }
}
