use std::collections::{BTreeMap, BTreeSet};

use super::{IndexError, Result};
use crate::Scalar;

/// Getis-Ord Gi* z-scores with binary weights, each unit counted as its
/// own neighbor.
///
/// ```text
/// z_i = (Σ_j w_ij x_j − x̄ W_i) / (S · sqrt((n W_i − W_i²) / (n − 1)))
/// ```
///
/// with `W_i = Σ_j w_ij` and `S` the population standard deviation.
/// Constant input, or a unit adjacent to every other unit, gives z = 0.
/// Units absent from `adjacency` have only themselves as neighbors.
pub fn hotspot_gi_star<T: Scalar>(
    values: &BTreeMap<String, T>,
    adjacency: &BTreeMap<String, BTreeSet<String>>,
) -> Result<BTreeMap<String, T>> {
    let n = values.len();
    if n < 3 {
        return Err(IndexError::TooFewUnits { needed: 3, found: n });
    }
    let empty = BTreeSet::new();
    for (a, ns) in adjacency {
        if !values.contains_key(a) {
            return Err(IndexError::UnknownUnit(a.clone()));
        }
        for b in ns.iter().filter(|b| *b != a) {
            if !values.contains_key(b) {
                return Err(IndexError::UnknownUnit(b.clone()));
            }
            if !adjacency.get(b).unwrap_or(&empty).contains(a) {
                return Err(IndexError::AsymmetricAdjacency { from: a.clone(), to: b.clone() });
            }
        }
    }

    let nf = T::of(n as f64);
    let mean = values.values().fold(T::zero(), |s, &x| s + x) / nf;
    let var = values.values().fold(T::zero(), |s, &x| s + (x - mean) * (x - mean)) / nf;
    let s = var.sqrt();
    let first = *values.values().next().expect("n >= 3");
    let constant = values.values().all(|&x| x == first);

    let mut out = BTreeMap::new();
    for (id, &x) in values {
        let neighbors = adjacency.get(id).unwrap_or(&empty);
        let mut lag = x;
        let mut w = T::one();
        for b in neighbors.iter().filter(|b| *b != id) {
            lag = lag + values[b];
            w = w + T::one();
        }
        let spread = ((nf * w - w * w) / (nf - T::one())).sqrt();
        let den = s * spread;
        let z = if constant || den <= T::zero() { T::zero() } else { (lag - mean * w) / den };
        out.insert(id.clone(), z);
    }
    Ok(out)
}
