//! ESRI-style ASCII grid text.
//!
//! ```text
//! ncols 2
//! nrows 2
//! xllcorner 0
//! yllcorner 0
//! cellsize 30
//! nodata_value -9999
//! 1 2
//! 3 -9999
//! ```
//!
//! Keys are case-insensitive on read and may appear in any order;
//! `xllcenter`/`yllcenter` are accepted in place of the corner keys.

use std::fmt::Write as _;
use std::io::BufRead;

use super::{Grid, RasterError, Result};
use crate::scalar::parse_scalar;
use crate::Scalar;

const KEYS: [&str; 6] = ["ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"];

#[derive(Default)]
struct Header {
    values: [Option<(String, usize)>; 6],
    x_center: bool,
    y_center: bool,
}

impl Header {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let (slot, center) = match key {
            "xllcenter" => (2, true),
            "yllcenter" => (3, true),
            k => match KEYS.iter().position(|&known| known == k) {
                Some(p) => (p, false),
                None => {
                    return Err(RasterError::Header { line, message: format!("unknown header key `{key}`") })
                }
            },
        };
        if self.values[slot].is_some() {
            return Err(RasterError::Header { line, message: format!("duplicate header key `{}`", KEYS[slot]) });
        }
        if slot == 2 {
            self.x_center = center;
        }
        if slot == 3 {
            self.y_center = center;
        }
        self.values[slot] = Some((value.to_string(), line));
        Ok(())
    }

    fn get(&self, slot: usize, end_line: usize) -> Result<&(String, usize)> {
        self.values[slot].as_ref().ok_or_else(|| RasterError::Header {
            line: end_line,
            message: format!("missing header key `{}`", KEYS[slot]),
        })
    }

    fn usize(&self, slot: usize, end_line: usize) -> Result<usize> {
        let (text, line) = self.get(slot, end_line)?;
        text.parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| RasterError::Header {
                line: *line,
                message: format!("`{}` must be a positive integer, got `{text}`", KEYS[slot]),
            })
    }

    fn f64(&self, slot: usize, end_line: usize) -> Result<f64> {
        let (text, line) = self.get(slot, end_line)?;
        text.parse::<f64>()
            .map_err(|_| RasterError::NonNumeric { line: *line, token: text.clone() })
    }
}

fn is_key(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && parse_scalar::<f64>(token).is_none()
}

/// Parses ASCII grid text.
pub fn parse_ascii_grid<T: Scalar>(text: &str) -> Result<Grid<T>> {
    read_lines(text.lines().map(|l| Ok(l.to_string())))
}

/// Reads an ASCII grid from a buffered byte stream.
pub fn read_ascii_grid<T: Scalar, R: BufRead>(reader: R) -> Result<Grid<T>> {
    read_lines(reader.lines().map(|l| l.map_err(|e| RasterError::Io(e.to_string()))))
}

fn read_lines<T: Scalar>(lines: impl Iterator<Item = Result<String>>) -> Result<Grid<T>> {
    let mut header = Header::default();
    let mut in_body = false;
    let mut values: Vec<T> = Vec::new();
    let mut expected = None;
    let mut last_line = 0;

    for (i, line) in lines.enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = line?;
        let mut tokens = line.split_whitespace().peekable();
        let Some(&first) = tokens.peek() else { continue };

        if !in_body && is_key(first) {
            let key = first.to_ascii_lowercase();
            tokens.next();
            let value = tokens.next().ok_or_else(|| RasterError::Header {
                line: line_no,
                message: format!("header key `{key}` has no value"),
            })?;
            if let Some(extra) = tokens.next() {
                return Err(RasterError::Header {
                    line: line_no,
                    message: format!("unexpected token `{extra}` after `{key}`"),
                });
            }
            header.set(&key, value, line_no)?;
            continue;
        }

        if !in_body {
            in_body = true;
            let n = header.usize(0, line_no)? * header.usize(1, line_no)?;
            values.reserve(n);
            expected = Some(n);
        }
        let n = expected.unwrap_or(0);
        for token in tokens {
            let v = parse_scalar::<T>(token)
                .ok_or_else(|| RasterError::NonNumeric { line: line_no, token: token.to_string() })?;
            values.push(v);
            if values.len() > n {
                return Err(RasterError::ValueCount { line: line_no, expected: n, found: values.len() });
            }
        }
    }

    let end = last_line.max(1);
    let ncols = header.usize(0, end)?;
    let nrows = header.usize(1, end)?;
    let cellsize = header.f64(4, end)?;
    let mut xll = header.f64(2, end)?;
    let mut yll = header.f64(3, end)?;
    let nodata = {
        let (text, line) = header.get(5, end)?;
        parse_scalar::<T>(text).ok_or_else(|| RasterError::NonNumeric { line: *line, token: text.clone() })?
    };
    if header.x_center {
        xll -= cellsize / 2.0;
    }
    if header.y_center {
        yll -= cellsize / 2.0;
    }
    if values.len() != ncols * nrows {
        return Err(RasterError::ValueCount { line: end, expected: ncols * nrows, found: values.len() });
    }
    Grid::new(ncols, nrows, xll, yll, cellsize, nodata, values)
}

/// Canonical text form: fixed header order with lowercase keys, one grid row
/// per line, shortest round-trip decimal for every number. Missing cells are
/// written as the nodata literal.
pub fn write_ascii_grid<T: Scalar>(grid: &Grid<T>) -> String {
    let mut out = String::with_capacity(grid.len() * 6 + 128);
    let _ = writeln!(out, "ncols {}", grid.ncols());
    let _ = writeln!(out, "nrows {}", grid.nrows());
    let _ = writeln!(out, "xllcorner {}", grid.xllcorner());
    let _ = writeln!(out, "yllcorner {}", grid.yllcorner());
    let _ = writeln!(out, "cellsize {}", grid.cellsize());
    let _ = writeln!(out, "nodata_value {}", grid.nodata_value());
    for row in grid.values().chunks(grid.ncols()) {
        for (c, &v) in row.iter().enumerate() {
            if c > 0 {
                out.push(' ');
            }
            let v = if grid.is_nodata(v) { grid.nodata_value() } else { v };
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}
