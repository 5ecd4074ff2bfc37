use std::collections::BTreeSet;

use super::{IndexError, Result};
use crate::scalar::parse_scalar;
use crate::Scalar;

const UNIT_ID: &str = "unit_id";
const HOUSEHOLD_COUNT: &str = "household_count";

/// Units × indicators raw values with a missing mask, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix<T> {
    unit_ids: Vec<String>,
    codes: Vec<String>,
    values: Vec<Option<T>>,
    household_counts: Vec<u64>,
}

fn check_unique(ids: &[String], err: fn(String) -> IndexError) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(err(id.clone()));
        }
    }
    Ok(())
}

impl<T: Scalar> IndicatorMatrix<T> {
    pub fn new(
        unit_ids: Vec<String>,
        codes: Vec<String>,
        values: Vec<Option<T>>,
        household_counts: Vec<u64>,
    ) -> Result<Self> {
        if values.len() != unit_ids.len() * codes.len() {
            return Err(IndexError::Dimensions {
                units: unit_ids.len(),
                indicators: codes.len(),
                values: values.len(),
            });
        }
        if household_counts.len() != unit_ids.len() {
            return Err(IndexError::HouseholdCounts { expected: unit_ids.len(), found: household_counts.len() });
        }
        check_unique(&unit_ids, IndexError::DuplicateUnit)?;
        check_unique(&codes, IndexError::DuplicateIndicator)?;
        for (k, v) in values.iter().enumerate() {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(IndexError::NonFinite {
                    unit: unit_ids[k / codes.len()].clone(),
                    code: codes[k % codes.len()].clone(),
                });
            }
        }
        Ok(Self { unit_ids, codes, values, household_counts })
    }

    /// All-missing matrix.
    pub fn empty(unit_ids: Vec<String>, codes: Vec<String>, household_counts: Vec<u64>) -> Result<Self> {
        let n = unit_ids.len() * codes.len();
        Self::new(unit_ids, codes, vec![None; n], household_counts)
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn household_counts(&self) -> &[u64] {
        &self.household_counts
    }

    pub fn n_units(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn n_indicators(&self) -> usize {
        self.codes.len()
    }

    pub fn unit_position(&self, unit_id: &str) -> Option<usize> {
        self.unit_ids.iter().position(|u| u == unit_id)
    }

    pub fn code_position(&self, code: &str) -> Option<usize> {
        self.codes.iter().position(|c| c == code)
    }

    pub fn get(&self, unit: usize, indicator: usize) -> Option<T> {
        self.values[unit * self.codes.len() + indicator]
    }

    /// Non-finite values are stored as missing.
    pub fn set(&mut self, unit: usize, indicator: usize, v: Option<T>) {
        let n = self.codes.len();
        self.values[unit * n + indicator] = v.filter(|x| x.is_finite());
    }

    pub fn row(&self, unit: usize) -> &[Option<T>] {
        let n = self.codes.len();
        &self.values[unit * n..(unit + 1) * n]
    }

    pub fn column(&self, indicator: usize) -> Vec<Option<T>> {
        (0..self.n_units()).map(|u| self.get(u, indicator)).collect()
    }

    pub fn set_household_count(&mut self, unit: usize, count: u64) {
        self.household_counts[unit] = count;
    }

    pub fn missing_fraction(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|v| v.is_none()).count() as f64 / self.values.len() as f64
    }

    /// `unit_id,household_count,<codes...>`; missing values are empty cells.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = [UNIT_ID, HOUSEHOLD_COUNT].into_iter().map(str::to_string).chain(self.codes.iter().cloned());
        w.write_record(header).expect("in-memory write");
        for (u, id) in self.unit_ids.iter().enumerate() {
            let mut rec = vec![id.clone(), self.household_counts[u].to_string()];
            rec.extend(self.row(u).iter().map(|v| v.map_or_else(String::new, |x| x.to_string())));
            w.write_record(rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let csv_err = |line: u64, message: String| IndexError::Csv { line, message };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
        if headers.get(0) != Some(UNIT_ID) || headers.get(1) != Some(HOUSEHOLD_COUNT) {
            return Err(csv_err(1, format!("header must start with {UNIT_ID},{HOUSEHOLD_COUNT}")));
        }
        let codes: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
        let (mut units, mut counts, mut values) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_err(0, e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            units.push(rec[0].to_string());
            counts.push(rec[1].parse::<u64>().map_err(|_| {
                csv_err(line, format!("household_count `{}` is not a non-negative integer", &rec[1]))
            })?);
            for cell in rec.iter().skip(2) {
                if cell.is_empty() {
                    values.push(None);
                } else {
                    let v = parse_scalar::<T>(cell).ok_or_else(|| csv_err(line, format!("`{cell}` is not a number")))?;
                    values.push(Some(v));
                }
            }
        }
        Self::new(units, codes, values, counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn shape_checks() {
        let err = IndicatorMatrix::<f64>::new(ids(&["a"]), ids(&["x", "y"]), vec![None], vec![1]).unwrap_err();
        assert!(matches!(err, IndexError::Dimensions { .. }));
        let err = IndicatorMatrix::<f64>::new(ids(&["a", "a"]), ids(&["x"]), vec![None; 2], vec![1, 1]).unwrap_err();
        assert_eq!(err, IndexError::DuplicateUnit("a".into()));
        let err = IndicatorMatrix::new(ids(&["a"]), ids(&["x"]), vec![Some(f64::NAN)], vec![1]).unwrap_err();
        assert!(matches!(err, IndexError::NonFinite { .. }));
    }

    #[test]
    fn csv_round_trip() {
        let m = IndicatorMatrix::new(
            ids(&["V01", "V02"]),
            ids(&["A", "B"]),
            vec![Some(0.1), None, Some(2.5), Some(-3.0)],
            vec![10, 0],
        )
        .unwrap();
        let text = m.to_csv();
        assert_eq!(text, "unit_id,household_count,A,B\nV01,10,0.1,\nV02,0,2.5,-3\n");
        assert_eq!(IndicatorMatrix::from_csv(&text).unwrap(), m);
    }
}
