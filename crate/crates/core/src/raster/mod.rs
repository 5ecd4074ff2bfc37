//! Single-band georeferenced grids and the raster operations built on them.
//!
//! Rows are stored north-first: row 0 is the northernmost row, so the map
//! coordinate of a cell center is
//! `(xllcorner + (col + 0.5)·cellsize, yllcorner + (nrows − row − 0.5)·cellsize)`.
//! A cell equal to `nodata_value` (or NaN) is missing for every operation.

mod ascii;
mod change;
pub mod geometry;
mod proximity;
mod rasterize;
mod reclass;
mod terrain;
mod zonal;

use thiserror::Error;

use crate::Scalar;

pub use ascii::{parse_ascii_grid, read_ascii_grid, write_ascii_grid};
pub use change::{change_matrix, ChangeMatrix};
pub use geometry::{Point, Polygon};
pub use proximity::proximity;
pub use rasterize::rasterize_polygons;
pub use reclass::{reclassify, ReclassRange, ReclassTable};
pub use terrain::{aspect, slope, FLAT_ASPECT};
pub use zonal::{zonal_stats, ZoneStats};

/// Tolerance on corner coordinates and cellsize when comparing grids.
pub const GEOREF_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterError {
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    ValueCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: `{token}` is not a number")]
    NonNumeric { line: usize, token: String },
    #[error("grid dimensions {ncols}x{nrows} do not match {len} values")]
    Dimensions { ncols: usize, nrows: usize, len: usize },
    #[error("grid must have at least one row and one column")]
    Empty,
    #[error("cellsize must be positive and finite, got {0}")]
    Cellsize(f64),
    #[error("grids are not aligned: {0}")]
    GeorefMismatch(String),
    #[error("reclass table range {index} overlaps or is out of order")]
    OverlappingRanges { index: usize },
    #[error("reclass table range {index} is empty or has non-finite bounds")]
    InvalidRange { index: usize },
    #[error("polygon for zone {zone_id} has a ring with fewer than 3 distinct vertices")]
    DegeneratePolygon { zone_id: i64 },
    #[error("cell value {0} is not an integer class/zone id")]
    NonIntegralClass(f64),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = RasterError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    ncols: usize,
    nrows: usize,
    xllcorner: f64,
    yllcorner: f64,
    cellsize: f64,
    nodata_value: T,
    values: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(
        ncols: usize,
        nrows: usize,
        xllcorner: f64,
        yllcorner: f64,
        cellsize: f64,
        nodata_value: T,
        values: Vec<T>,
    ) -> Result<Self> {
        if ncols == 0 || nrows == 0 {
            return Err(RasterError::Empty);
        }
        if !(cellsize.is_finite() && cellsize > 0.0) {
            return Err(RasterError::Cellsize(cellsize));
        }
        if values.len() != ncols * nrows {
            return Err(RasterError::Dimensions { ncols, nrows, len: values.len() });
        }
        Ok(Self { ncols, nrows, xllcorner, yllcorner, cellsize, nodata_value, values })
    }

    pub fn filled(
        ncols: usize,
        nrows: usize,
        xllcorner: f64,
        yllcorner: f64,
        cellsize: f64,
        nodata_value: T,
        fill: T,
    ) -> Result<Self> {
        Self::new(ncols, nrows, xllcorner, yllcorner, cellsize, nodata_value, vec![fill; ncols * nrows])
    }

    /// Same georeferencing, every cell set to `fill`, with a new nodata value.
    pub fn like<U: Scalar>(&self, nodata_value: U, fill: U) -> Grid<U> {
        Grid {
            ncols: self.ncols,
            nrows: self.nrows,
            xllcorner: self.xllcorner,
            yllcorner: self.yllcorner,
            cellsize: self.cellsize,
            nodata_value,
            values: vec![fill; self.values.len()],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn xllcorner(&self) -> f64 {
        self.xllcorner
    }

    pub fn yllcorner(&self) -> f64 {
        self.yllcorner
    }

    pub fn cellsize(&self) -> f64 {
        self.cellsize
    }

    pub fn nodata_value(&self) -> T {
        self.nodata_value
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_area(&self) -> f64 {
        self.cellsize * self.cellsize
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.ncols + col
    }

    #[inline]
    pub fn is_nodata(&self, v: T) -> bool {
        v == self.nodata_value || v.is_nan()
    }

    /// Raw cell value (possibly the nodata sentinel).
    pub fn raw(&self, row: usize, col: usize) -> T {
        self.values[self.index(row, col)]
    }

    /// Valid cell value, `None` when missing or out of range.
    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        if row >= self.nrows || col >= self.ncols {
            return None;
        }
        let v = self.raw(row, col);
        (!self.is_nodata(v)).then_some(v)
    }

    pub fn set(&mut self, row: usize, col: usize, v: T) {
        let i = self.index(row, col);
        self.values[i] = v;
    }

    /// Map coordinates of a cell center.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.xllcorner + (col as f64 + 0.5) * self.cellsize,
            self.yllcorner + ((self.nrows - row) as f64 - 0.5) * self.cellsize,
        )
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| !self.is_nodata(**v)).count()
    }

    pub fn same_georef<U: Scalar>(&self, other: &Grid<U>) -> bool {
        self.georef_mismatch(other).is_none()
    }

    fn georef_mismatch<U: Scalar>(&self, other: &Grid<U>) -> Option<String> {
        if self.ncols != other.ncols || self.nrows != other.nrows {
            return Some(format!(
                "{}x{} vs {}x{} cells",
                self.ncols, self.nrows, other.ncols, other.nrows
            ));
        }
        let close = |a: f64, b: f64| (a - b).abs() <= GEOREF_TOLERANCE;
        if !close(self.xllcorner, other.xllcorner) || !close(self.yllcorner, other.yllcorner) {
            return Some(format!(
                "corner ({}, {}) vs ({}, {})",
                self.xllcorner, self.yllcorner, other.xllcorner, other.yllcorner
            ));
        }
        if !close(self.cellsize, other.cellsize) {
            return Some(format!("cellsize {} vs {}", self.cellsize, other.cellsize));
        }
        None
    }

    pub fn ensure_aligned<U: Scalar>(&self, other: &Grid<U>) -> Result<()> {
        match self.georef_mismatch(other) {
            Some(msg) => Err(RasterError::GeorefMismatch(msg)),
            None => Ok(()),
        }
    }

    /// Applies `f` to every valid cell; missing cells become `nodata`.
    pub fn map_valid<U: Scalar>(&self, nodata: U, mut f: impl FnMut(T) -> Option<U>) -> Grid<U> {
        let mut out = self.like(nodata, nodata);
        for (o, &v) in out.values.iter_mut().zip(&self.values) {
            if !self.is_nodata(v) {
                if let Some(u) = f(v) {
                    *o = u;
                }
            }
        }
        out
    }
}

/// Picks an output sentinel that cannot collide with valid results in
/// `[lo, hi]`: the input's own nodata when it lies outside, else −9999.
pub(crate) fn nodata_outside<T: Scalar>(nodata: T, lo: f64, hi: f64) -> T {
    let v = nodata.as_f64();
    if v.is_nan() || v < lo || v > hi {
        nodata
    } else {
        T::of(-9999.0)
    }
}

/// Integral class/zone id of a cell value.
pub(crate) fn class_id<T: Scalar>(v: T) -> Result<i64> {
    let f = v.as_f64();
    if f.fract() != 0.0 || !f.is_finite() {
        return Err(RasterError::NonIntegralClass(f));
    }
    Ok(f as i64)
}
