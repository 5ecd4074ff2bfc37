use super::{IndexError, IndicatorMatrix, Result};
use crate::model::{IndicatorCatalog, Polarity};
use crate::Scalar;

/// Min-max scales each catalog indicator over its non-missing units and
/// orients it so that higher means more vulnerable. Constant columns map
/// to 0. The output has the catalog's indicator order; other matrix
/// columns are dropped.
pub fn normalize<T: Scalar>(matrix: &IndicatorMatrix<T>, catalog: &IndicatorCatalog) -> Result<IndicatorMatrix<T>> {
    let codes: Vec<String> = catalog.codes().map(str::to_string).collect();
    let mut out = IndicatorMatrix::empty(matrix.unit_ids().to_vec(), codes, matrix.household_counts().to_vec())?;
    for (j, def) in catalog.indicators().iter().enumerate() {
        let src = matrix.code_position(&def.code).ok_or_else(|| IndexError::MissingIndicator(def.code.clone()))?;
        let col = matrix.column(src);
        let present = col.iter().flatten();
        let lo = present.clone().fold(T::infinity(), |a, &b| a.min(b));
        let hi = present.fold(T::neg_infinity(), |a, &b| a.max(b));
        let range = hi - lo;
        for (u, v) in col.into_iter().enumerate() {
            let Some(x) = v else { continue };
            let scaled = if hi > lo { (x - lo) / range } else { T::zero() };
            let oriented = match def.polarity {
                Polarity::HigherIsMoreVulnerable => scaled,
                Polarity::HigherIsLessVulnerable if hi > lo => T::one() - scaled,
                Polarity::HigherIsLessVulnerable => T::zero(),
            };
            out.set(u, j, Some(oriented));
        }
    }
    Ok(out)
}
