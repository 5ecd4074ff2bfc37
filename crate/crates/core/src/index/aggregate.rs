use super::{
    assessment_columns, assign_ranks_and_classes, normalize, Assessment, IndexError, IndicatorMatrix, Result,
    UnitAssessment, NUM_CLASSES,
};
use crate::model::{validate_weights, AdminLevel, IndicatorCatalog, ModelError, WeightConfig};
use crate::Scalar;

/// Weighted mean of the present values. Weights of missing entries are
/// dropped and the rest renormalized; all missing (or zero remaining
/// weight) gives `None`.
pub fn weighted_index<T: Scalar>(values: &[Option<T>], weights: &[T]) -> Option<T> {
    let mut num = T::zero();
    let mut den = T::zero();
    let mut any = false;
    for (v, &w) in values.iter().zip(weights) {
        if let Some(x) = v {
            num = num + w * *x;
            den = den + w;
            any = true;
        }
    }
    (any && den > T::zero()).then(|| num / den)
}

/// Children (positions in the previous stage) and their weights.
type Group<T> = (Vec<usize>, Vec<T>);

struct Plan<T> {
    subcomponents: Vec<Group<T>>,
    components: Vec<Group<T>>,
    determinants: Vec<Group<T>>,
    vi: Group<T>,
}

fn weight<T>(w: Option<T>, path: impl FnOnce() -> String) -> Result<T> {
    w.ok_or_else(|| IndexError::Weights(ModelError::MissingWeight { path: path() }))
}

fn plan<T: Scalar>(normalized: &IndicatorMatrix<T>, catalog: &IndicatorCatalog, config: &WeightConfig<T>) -> Result<Plan<T>> {
    let mut p = Plan { subcomponents: vec![], components: vec![], determinants: vec![], vi: (vec![], vec![]) };
    for dn in &catalog.tree().determinants {
        let d = dn.determinant;
        let mut det_group: Group<T> = (vec![], vec![]);
        for cn in &dn.components {
            let c = cn.name.as_str();
            let mut comp_group: Group<T> = (vec![], vec![]);
            for sn in &cn.subcomponents {
                let s = sn.name.as_str();
                let mut sub_group: Group<T> = (vec![], vec![]);
                for &i in &sn.indicators {
                    let code = &catalog.indicators()[i].code;
                    let pos = normalized.code_position(code).ok_or_else(|| IndexError::MissingIndicator(code.clone()))?;
                    sub_group.0.push(pos);
                    sub_group.1.push(weight(config.indicator_weight(d, c, s, code), || format!("{d}/{c}/{s}/{code}"))?);
                }
                comp_group.0.push(p.subcomponents.len());
                comp_group.1.push(weight(config.subcomponent_weight(d, c, s), || format!("{d}/{c}/{s}"))?);
                p.subcomponents.push(sub_group);
            }
            det_group.0.push(p.components.len());
            det_group.1.push(weight(config.component_weight(d, c), || format!("{d}/{c}"))?);
            p.components.push(comp_group);
        }
        p.vi.0.push(p.determinants.len());
        p.vi.1.push(weight(config.determinant_weight(d), || d.to_string())?);
        p.determinants.push(det_group);
    }
    Ok(p)
}

fn stage<T: Scalar>(inputs: &[Option<T>], groups: &[Group<T>]) -> Vec<Option<T>> {
    groups
        .iter()
        .map(|(idx, w)| {
            let vals: Vec<Option<T>> = idx.iter().map(|&i| inputs[i]).collect();
            weighted_index(&vals, w)
        })
        .collect()
}

/// Weighted aggregation of an already normalized village matrix:
/// subcomponents, then components, then determinants, then VI.
pub fn aggregate<T: Scalar>(
    normalized: &IndicatorMatrix<T>,
    catalog: &IndicatorCatalog,
    config: &WeightConfig<T>,
) -> Result<Assessment<T>> {
    let plan = plan(normalized, catalog, config)?;
    let columns = assessment_columns(catalog);
    let indicator_pos: Vec<usize> = catalog
        .codes()
        .map(|c| normalized.code_position(c).ok_or_else(|| IndexError::MissingIndicator(c.to_string())))
        .collect::<Result<_>>()?;

    let mut units = Vec::with_capacity(normalized.n_units());
    for (u, unit_id) in normalized.unit_ids().iter().enumerate() {
        let row = normalized.row(u);
        let subs = stage(row, &plan.subcomponents);
        let comps = stage(&subs, &plan.components);
        let dets = stage(&comps, &plan.determinants);
        let vi = stage(&dets, std::slice::from_ref(&plan.vi));

        let mut values: Vec<Option<T>> = indicator_pos.iter().map(|&j| row[j]).collect();
        values.extend(subs);
        values.extend(comps);
        values.extend(dets);
        values.extend(vi);
        debug_assert_eq!(values.len(), columns.len());

        let household_count = normalized.household_counts()[u];
        let mass = T::of(household_count as f64);
        let support = values.iter().map(|v| if v.is_some() { mass } else { T::zero() }).collect();
        units.push(UnitAssessment { unit_id: unit_id.clone(), household_count, values, support, class: None, rank: None });
    }
    assign_ranks_and_classes(&mut units, NUM_CLASSES)?;
    Ok(Assessment { level: AdminLevel::Village, weight_config_id: config.id.clone(), columns, units })
}

/// Validates the weights, normalizes the raw matrix and aggregates it.
pub fn compute_assessment<T: Scalar>(
    matrix: &IndicatorMatrix<T>,
    catalog: &IndicatorCatalog,
    config: &WeightConfig<T>,
) -> Result<Assessment<T>> {
    let config = validate_weights(config.clone(), catalog)?;
    let normalized = normalize(matrix, catalog)?;
    aggregate(&normalized, catalog, &config)
}
