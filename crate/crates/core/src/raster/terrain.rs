//! Slope and aspect with Horn's 3×3 weighted finite differences.
//!
//! With the window
//!
//! ```text
//! a b c
//! d e f      (row 0 = north)
//! g h i
//! ```
//!
//! `dz/dx = ((c + 2f + i) − (a + 2d + g)) / 8·cellsize` (eastward) and
//! `dz/dy = ((a + 2b + c) − (g + 2h + i)) / 8·cellsize` (northward).
//! Border cells and cells with a missing neighbour are nodata.

use super::{nodata_outside, Grid};
use crate::Scalar;

/// Aspect assigned to cells with no gradient.
pub const FLAT_ASPECT: f64 = -1.0;

/// Gradient magnitude at or below which a cell counts as flat.
const FLAT_TOLERANCE: f64 = 1e-12;

fn horn<T: Scalar>(dem: &Grid<T>, row: usize, col: usize) -> Option<(f64, f64)> {
    let mut w = [0.0f64; 9];
    for dr in 0..3 {
        for dc in 0..3 {
            w[dr * 3 + dc] = dem.get(row + dr - 1, col + dc - 1)?.as_f64();
        }
    }
    let [a, b, c, d, _, f, g, h, i] = w;
    let scale = 8.0 * dem.cellsize();
    let dzdx = ((c + 2.0 * f + i) - (a + 2.0 * d + g)) / scale;
    let dzdy = ((a + 2.0 * b + c) - (g + 2.0 * h + i)) / scale;
    Some((dzdx, dzdy))
}

fn terrain<T: Scalar>(dem: &Grid<T>, lo: f64, hi: f64, f: impl Fn(f64, f64) -> f64) -> Grid<T> {
    let nodata = nodata_outside(dem.nodata_value(), lo, hi);
    let mut out = dem.like(nodata, nodata);
    if dem.nrows() < 3 || dem.ncols() < 3 {
        return out;
    }
    for row in 1..dem.nrows() - 1 {
        for col in 1..dem.ncols() - 1 {
            if let Some((dx, dy)) = horn(dem, row, col) {
                out.set(row, col, T::of(f(dx, dy)));
            }
        }
    }
    out
}

/// Slope in degrees, `[0, 90]`.
pub fn slope<T: Scalar>(dem: &Grid<T>) -> Grid<T> {
    terrain(dem, 0.0, 90.0, |dx, dy| dx.hypot(dy).atan().to_degrees())
}

/// Downslope direction in degrees clockwise from north, `[0, 360)`, or
/// [`FLAT_ASPECT`] where the surface is flat.
pub fn aspect<T: Scalar>(dem: &Grid<T>) -> Grid<T> {
    terrain(dem, FLAT_ASPECT, 360.0, |dx, dy| {
        if dx.hypot(dy) <= FLAT_TOLERANCE {
            return FLAT_ASPECT;
        }
        // downslope vector is (-dx, -dy) in (east, north)
        let mut deg = (-dx).atan2(-dy).to_degrees();
        if deg < 0.0 {
            deg += 360.0;
        }
        if deg >= 360.0 {
            deg -= 360.0;
        }
        deg + 0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(n: usize, cs: f64, f: impl Fn(f64, f64) -> f64) -> Grid<f64> {
        let mut g = Grid::filled(n, n, 500.0, 1000.0, cs, -9999.0, 0.0).unwrap();
        for r in 0..n {
            for c in 0..n {
                let (x, y) = g.cell_center(r, c);
                g.set(r, c, f(x, y));
            }
        }
        g
    }

    #[test]
    fn flat_surface() {
        let dem = plane(5, 30.0, |_, _| 120.0);
        let s = slope(&dem);
        let a = aspect(&dem);
        for r in 1..4 {
            for c in 1..4 {
                assert_eq!(s.get(r, c), Some(0.0));
                assert_eq!(a.get(r, c), Some(FLAT_ASPECT));
            }
        }
        assert_eq!(s.get(0, 2), None);
        assert_eq!(a.get(4, 4), None);
    }

    #[test]
    fn eastward_ramp_faces_west() {
        let dem = plane(6, 30.0, |x, _| 0.1 * x);
        let s = slope(&dem);
        let a = aspect(&dem);
        let expected = 0.1f64.atan().to_degrees();
        assert!((expected - 5.710593).abs() < 1e-6);
        for r in 1..5 {
            for c in 1..5 {
                assert!((s.get(r, c).unwrap() - expected).abs() < 1e-6);
                assert!((a.get(r, c).unwrap() - 270.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn northward_ramp_faces_south() {
        let dem = plane(6, 10.0, |_, y| 0.2 * y);
        let s = slope(&dem);
        let a = aspect(&dem);
        let expected = 0.2f64.atan().to_degrees();
        assert!((expected - 11.309932).abs() < 1e-6);
        assert!((s.get(2, 3).unwrap() - expected).abs() < 1e-6);
        assert!((a.get(2, 3).unwrap() - 180.0).abs() < 1e-9);
    }

    #[test]
    fn nodata_neighbour_and_small_grid() {
        let mut dem = plane(5, 30.0, |x, _| x);
        dem.set(1, 1, -9999.0);
        let s = slope(&dem);
        assert_eq!(s.get(2, 2), None);
        assert!(s.get(3, 3).is_some());

        let tiny = plane(2, 30.0, |x, _| x);
        assert_eq!(slope(&tiny).valid_count(), 0);
        assert_eq!(aspect(&tiny).valid_count(), 0);
    }

    #[test]
    fn nodata_sentinel_moves_out_of_range() {
        let dem = Grid::filled(3, 3, 0.0, 0.0, 1.0, 0.0f64, 5.0).unwrap();
        let s = slope(&dem);
        assert_eq!(s.nodata_value(), -9999.0);
        assert_eq!(s.get(1, 1), Some(0.0));
    }

    #[test]
    fn aspect_quadrants() {
        // z rising towards the south-west: downslope faces north-east
        let dem = plane(5, 1.0, |x, y| -x - y);
        assert!((aspect(&dem).get(2, 2).unwrap() - 45.0).abs() < 1e-9);
        let dem = plane(5, 1.0, |_, y| -y);
        assert_eq!(aspect(&dem).get(2, 2), Some(0.0));
    }
}
