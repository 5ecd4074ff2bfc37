use std::collections::BTreeSet;

use ccvi_core::admin::{build_adjacency, load_admin_units, write_admin_units, Geometry};
use ccvi_core::model::{default_catalog, default_weights, load_catalog, validate_weights, WeightConfig};
use ccvi_core::raster::Polygon;
use ccvi_core::{AdminHierarchy, AdminLevel, AdminUnit, Contiguity};
use proptest::prelude::*;

fn unit(id: String, level: AdminLevel, parent: Option<String>, polys: Vec<Polygon>) -> AdminUnit {
    let geometry = if polys.len() == 1 { Geometry::Polygon(polys[0].clone()) } else { Geometry::MultiPolygon(polys) };
    AdminUnit { unit_id: id.clone(), name: format!("{id} name"), level, parent_id: parent, geometry, household_count: 0 }
}

/// Villages on distinct lattice cells of a 5x5 board, all under one
/// municipality and department.
fn lattice(cells: &BTreeSet<(u8, u8)>) -> AdminHierarchy {
    let mut units = vec![
        unit("D".into(), AdminLevel::Department, None, vec![Polygon::rect(0.0, 0.0, 5.0, 5.0)]),
        unit("M".into(), AdminLevel::Municipality, Some("D".into()), vec![Polygon::rect(0.0, 0.0, 5.0, 5.0)]),
    ];
    for &(x, y) in cells {
        let (x, y) = (f64::from(x), f64::from(y));
        units.push(unit(
            format!("v{x}{y}"),
            AdminLevel::Village,
            Some("M".into()),
            vec![Polygon::rect(x, y, x + 1.0, y + 1.0)],
        ));
    }
    AdminHierarchy::new(units).unwrap()
}

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![-180.0f64..180.0, any::<i16>().prop_map(f64::from)]
}

fn rect() -> impl Strategy<Value = Polygon> {
    (coord(), coord(), 1e-6f64..10.0, 1e-6f64..10.0).prop_map(|(x, y, w, h)| Polygon::rect(x, y, x + w, y + h))
}

proptest! {
    #[test]
    fn adjacency_matches_lattice_oracle(cells in prop::collection::btree_set((0u8..5, 0u8..5), 1..15)) {
        let h = lattice(&cells);
        let queen = build_adjacency(&h, AdminLevel::Village, Contiguity::Queen);
        let rook = build_adjacency(&h, AdminLevel::Village, Contiguity::Rook);
        for &(ax, ay) in &cells {
            let a = format!("v{ax}{ay}");
            prop_assert!(!queen[&a].contains(&a));
            for &(bx, by) in cells.iter().filter(|&&c| c != (ax, ay)) {
                let b = format!("v{bx}{by}");
                let (dx, dy) = (ax.abs_diff(bx), ay.abs_diff(by));
                prop_assert_eq!(queen[&a].contains(&b), dx <= 1 && dy <= 1);
                prop_assert_eq!(queen[&a].contains(&b), queen[&b].contains(&a));
                prop_assert_eq!(rook[&a].contains(&b), dx + dy == 1);
            }
        }
    }

    #[test]
    fn admin_document_round_trips(dept in rect(), munis in prop::collection::vec(prop::collection::vec(rect(), 1..3), 1..4)) {
        let mut units = vec![unit("d1".into(), AdminLevel::Department, None, vec![dept])];
        for (i, polys) in munis.into_iter().enumerate() {
            units.push(unit(format!("m{i}"), AdminLevel::Municipality, Some("d1".into()), polys));
        }
        let h = AdminHierarchy::new(units).unwrap();
        let doc = write_admin_units(&h);
        let back = load_admin_units(&doc).unwrap();
        prop_assert_eq!(back.units(), h.units());
        prop_assert_eq!(write_admin_units(&back), doc);
    }

    #[test]
    fn random_valid_weights_validate_idempotently(raw in prop::collection::vec(0.01f64..1.0, 64)) {
        let cat = default_catalog();
        let mut w: WeightConfig<f64> = default_weights(&cat);
        let mut draws = raw.iter().cycle();
        let mut redraw = |g: &mut std::collections::BTreeMap<String, f64>| {
            g.values_mut().for_each(|v| *v = *draws.next().unwrap());
            let s: f64 = g.values().sum();
            g.values_mut().for_each(|v| *v /= s);
        };
        w.component_weights.values_mut().for_each(&mut redraw);
        w.indicator_weights.values_mut().for_each(&mut redraw);
        let once = validate_weights(w.clone(), &cat).unwrap();
        prop_assert_eq!(&once, &w);
        prop_assert_eq!(validate_weights(once.clone(), &cat).unwrap(), once);
    }
}

#[test]
fn default_weights_validate() {
    let cat = default_catalog();
    let w = default_weights::<f64>(&cat);
    assert_eq!(validate_weights(w.clone(), &cat).unwrap(), w);
    let w32 = default_weights::<f32>(&cat);
    assert_eq!(validate_weights(w32.clone(), &cat).unwrap(), w32);
}

#[test]
fn catalog_round_trips() {
    let cat = default_catalog();
    let back = load_catalog(&cat.to_json()).unwrap();
    assert_eq!(back, cat);
    assert_eq!(back.to_json(), cat.to_json());
}

#[test]
fn weight_document_round_trips() {
    let cat = default_catalog();
    let w = default_weights::<f64>(&cat);
    assert_eq!(WeightConfig::from_json(&w.to_json(), &cat).unwrap(), w);
}
