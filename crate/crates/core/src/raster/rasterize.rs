use super::{Grid, Polygon, RasterError, Result};
use crate::Scalar;

/// Burns zone ids into a grid shaped like `template`.
///
/// A cell takes the id of a polygon containing its center (boundary
/// inclusive, even-odd interior); where several do, the lowest id wins.
/// Cells outside every polygon are nodata.
pub fn rasterize_polygons<T: Scalar>(polygons: &[(i64, Polygon)], template: &Grid<T>) -> Result<Grid<T>> {
    for (zone_id, poly) in polygons {
        if !poly.is_valid() {
            return Err(RasterError::DegeneratePolygon { zone_id: *zone_id });
        }
    }
    let mut order: Vec<&(i64, Polygon)> = polygons.iter().collect();
    order.sort_by_key(|(id, _)| *id);

    let nodata = template.nodata_value();
    let mut out = template.like(nodata, nodata);
    let mut assigned = vec![false; template.len()];
    let cs = template.cellsize();
    let (x0, y0) = (template.xllcorner(), template.yllcorner());
    let nrows = template.nrows() as f64;

    for (zone_id, poly) in order {
        let (lo, hi) = poly.bbox();
        // candidate columns/rows whose centers fall in the bbox
        let col_lo = ((lo[0] - x0) / cs - 0.5).ceil().max(0.0) as usize;
        let col_hi = ((hi[0] - x0) / cs - 0.5).floor().min(template.ncols() as f64 - 1.0);
        let row_lo = (nrows - 0.5 - (hi[1] - y0) / cs).ceil().max(0.0) as usize;
        let row_hi = (nrows - 0.5 - (lo[1] - y0) / cs).floor().min(nrows - 1.0);
        if col_hi < 0.0 || row_hi < 0.0 {
            continue;
        }
        let (col_hi, row_hi) = (col_hi as usize, row_hi as usize);
        // widen by one cell: index arithmetic above may round either way
        let (col_lo, row_lo) = (col_lo.saturating_sub(1), row_lo.saturating_sub(1));
        let col_hi = (col_hi + 1).min(template.ncols() - 1);
        let row_hi = (row_hi + 1).min(template.nrows() - 1);
        for r in row_lo..=row_hi {
            for c in col_lo..=col_hi {
                let i = out.index(r, c);
                if assigned[i] {
                    continue;
                }
                let (x, y) = template.cell_center(r, c);
                if poly.contains([x, y]) {
                    assigned[i] = true;
                    out.values_mut()[i] = T::of(*zone_id as f64);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template(n: usize, cs: f64) -> Grid<f64> {
        Grid::filled(n, n, 0.0, 0.0, cs, -9999.0, 0.0).unwrap()
    }

    #[test]
    fn full_cover() {
        let out = rasterize_polygons(&[(4, Polygon::rect(0.0, 0.0, 20.0, 20.0))], &template(2, 10.0)).unwrap();
        assert_eq!(out.values(), &[4.0; 4]);
    }

    #[test]
    fn shared_edge_goes_to_lower_id() {
        // 3 cells wide, cellsize 10: centers at x = 5, 15, 25; edge at x = 15
        let t = Grid::filled(3, 1, 0.0, 0.0, 10.0, -9999.0, 0.0).unwrap();
        let polys = [(9, Polygon::rect(15.0, 0.0, 30.0, 10.0)), (2, Polygon::rect(0.0, 0.0, 15.0, 10.0))];
        let out = rasterize_polygons(&polys, &t).unwrap();
        assert_eq!(out.values(), &[2.0, 2.0, 9.0]);
    }

    #[test]
    fn outside_is_nodata_and_degenerate_rejected() {
        let out = rasterize_polygons(&[(1, Polygon::rect(0.0, 0.0, 10.0, 10.0))], &template(2, 10.0)).unwrap();
        assert_eq!(out.values(), &[-9999.0, -9999.0, 1.0, -9999.0]);
        let bad = Polygon::new(vec![[0.0, 0.0], [1.0, 1.0]]);
        assert_eq!(
            rasterize_polygons(&[(3, bad)], &template(2, 10.0)),
            Err(RasterError::DegeneratePolygon { zone_id: 3 })
        );
    }

    #[test]
    fn l_shape_matches_rectangle_union() {
        // L = [0,4]x[0,1] ∪ [0,1]x[0,4] on a 4x4 grid of unit cells
        let l = Polygon::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 1.0], [1.0, 1.0], [1.0, 4.0], [0.0, 4.0], [0.0, 0.0]]);
        let t = template(4, 1.0);
        let out = rasterize_polygons(&[(1, l)], &t).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let (x, y) = t.cell_center(r, c);
                let inside = (y < 1.0) || (x < 1.0);
                assert_eq!(out.get(r, c).is_some(), inside, "cell ({r},{c})");
            }
        }
    }
}
