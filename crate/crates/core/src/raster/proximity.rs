//! Exact Euclidean distance to the nearest feature cell.
//!
//! Two separable passes over squared distances in cell units: a column scan
//! for the vertical offset, then a lower envelope of parabolas per row
//! (Felzenszwalb & Huttenlocher). Squared distances are integers, so the
//! result is exact before the final `sqrt`.

use super::{nodata_outside, Grid};
use crate::Scalar;

/// Distance in map units from every cell center to the nearest cell with a
/// valid non-zero value. Missing mask cells count as background. With no
/// feature cells at all every output cell is nodata.
pub fn proximity<T: Scalar>(mask: &Grid<T>) -> Grid<T> {
    let nodata = nodata_outside(mask.nodata_value(), 0.0, f64::INFINITY);
    let (nrows, ncols) = (mask.nrows(), mask.ncols());
    let is_feature = |r: usize, c: usize| mask.get(r, c).is_some_and(|v| v != T::zero());

    // vertical distance (in cells) to nearest feature in the same column
    let mut vertical: Vec<Option<u64>> = vec![None; nrows * ncols];
    let mut any = false;
    for c in 0..ncols {
        let mut last: Option<usize> = None;
        for r in 0..nrows {
            if is_feature(r, c) {
                last = Some(r);
                any = true;
            }
            vertical[r * ncols + c] = last.map(|l| (r - l) as u64);
        }
        let mut next: Option<usize> = None;
        for r in (0..nrows).rev() {
            if is_feature(r, c) {
                next = Some(r);
            }
            if let Some(n) = next {
                let d = (n - r) as u64;
                let slot = &mut vertical[r * ncols + c];
                *slot = Some(slot.map_or(d, |v| v.min(d)));
            }
        }
    }

    let mut out = mask.like(nodata, nodata);
    if !any {
        return out;
    }

    let cellsize = mask.cellsize();
    let mut sq = vec![0u64; ncols];
    let mut hull: Vec<usize> = Vec::with_capacity(ncols);
    let mut starts: Vec<f64> = Vec::with_capacity(ncols + 1);
    for r in 0..nrows {
        let row = &vertical[r * ncols..(r + 1) * ncols];
        lower_envelope(row, &mut hull, &mut starts);
        let mut k = 0;
        for (x, d2) in sq.iter_mut().enumerate() {
            while k + 1 < hull.len() && starts[k + 1] < x as f64 {
                k += 1;
            }
            let q = hull[k];
            let g = row[q].expect("hull holds finite columns");
            let dx = x.abs_diff(q) as u64;
            *d2 = dx * dx + g * g;
        }
        for (c, &d2) in sq.iter().enumerate() {
            out.set(r, c, T::of((d2 as f64).sqrt() * cellsize));
        }
    }
    out
}

/// Parabolas `(x − q)² + g_q²` over columns with a finite `g_q`; `starts[k]`
/// is where hull parabola `k` becomes the minimum.
fn lower_envelope(row: &[Option<u64>], hull: &mut Vec<usize>, starts: &mut Vec<f64>) {
    hull.clear();
    starts.clear();
    let height = |q: usize| {
        let g = row[q].unwrap() as f64;
        g * g + (q * q) as f64
    };
    for (q, g) in row.iter().enumerate() {
        if g.is_none() {
            continue;
        }
        loop {
            let Some(&p) = hull.last() else {
                hull.push(q);
                starts.push(f64::NEG_INFINITY);
                break;
            };
            // integer-valued numerator/denominator: f64 division is correctly
            // rounded, which is enough to order distinct rationals here
            let s = (height(q) - height(p)) / (2.0 * (q - p) as f64);
            if s <= *starts.last().unwrap() {
                hull.pop();
                starts.pop();
            } else {
                hull.push(q);
                starts.push(s);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(mask: &Grid<f64>) -> Vec<Option<f64>> {
        let cs = mask.cellsize();
        let feats: Vec<(usize, usize)> = (0..mask.nrows())
            .flat_map(|r| (0..mask.ncols()).map(move |c| (r, c)))
            .filter(|&(r, c)| mask.get(r, c).is_some_and(|v| v != 0.0))
            .collect();
        (0..mask.nrows())
            .flat_map(|r| (0..mask.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| {
                feats
                    .iter()
                    .map(|&(fr, fc)| {
                        let dy = (fr as f64 - r as f64) * cs;
                        let dx = (fc as f64 - c as f64) * cs;
                        (dx * dx + dy * dy).sqrt()
                    })
                    .reduce(f64::min)
            })
            .collect()
    }

    #[test]
    fn unit_and_diagonal_steps() {
        let mut mask = Grid::filled(3, 3, 0.0, 0.0, 30.0, -9999.0, 0.0).unwrap();
        mask.set(1, 1, 1.0);
        let d = proximity(&mask);
        assert_eq!(d.get(1, 1), Some(0.0));
        assert_eq!(d.get(0, 1), Some(30.0));
        assert_eq!(d.get(1, 2), Some(30.0));
        assert!((d.get(0, 0).unwrap() - 30.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((d.get(2, 2).unwrap() - 42.4264).abs() < 1e-4);
    }

    #[test]
    fn no_features_gives_nodata() {
        let mask = Grid::new(2, 2, 0.0, 0.0, 1.0, -9999.0, vec![0.0, -9999.0, 0.0, 0.0]).unwrap();
        assert_eq!(proximity(&mask).valid_count(), 0);
    }

    #[test]
    fn nodata_cells_are_background() {
        let mask = Grid::new(3, 1, 0.0, 0.0, 10.0, -9999.0, vec![1.0, -9999.0, 0.0]).unwrap();
        let d = proximity(&mask);
        assert_eq!(d.values(), &[0.0, 10.0, 20.0]);
    }

    #[test]
    fn matches_brute_force_on_patterns() {
        let (nr, nc) = (9, 13);
        let mut mask = Grid::filled(nc, nr, 0.0, 0.0, 7.5, -9999.0, 0.0).unwrap();
        for (r, c) in [(0, 0), (4, 7), (8, 12), (2, 11), (6, 1)] {
            mask.set(r, c, 1.0);
        }
        let fast = proximity(&mask);
        for (i, b) in brute(&mask).into_iter().enumerate() {
            assert!((fast.values()[i] - b.unwrap()).abs() <= 1e-9, "cell {i}");
        }
    }
}
