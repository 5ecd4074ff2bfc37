use std::collections::{BTreeMap, BTreeSet};

use super::{AdminHierarchy, AdminUnit, Contiguity};
use crate::model::AdminLevel;
use crate::raster::geometry::{segments_overlap, segments_touch};
use crate::raster::Point;

fn edges(u: &AdminUnit) -> Vec<(Point, Point)> {
    u.geometry.polygons().iter().flat_map(|p| p.edges()).collect()
}

fn bbox(edges: &[(Point, Point)]) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for (a, b) in edges {
        for p in [a, b] {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    (lo, hi)
}

fn boxes_meet(a: &(Point, Point), b: &(Point, Point)) -> bool {
    (0..2).all(|k| a.0[k] <= b.1[k] && b.0[k] <= a.1[k])
}

/// Neighbors among the units at `level`. Queen: boundaries share at least
/// one point. Rook: boundaries share a segment of positive length. Every
/// unit at the level has an entry.
pub fn build_adjacency(
    h: &AdminHierarchy,
    level: AdminLevel,
    contiguity: Contiguity,
) -> BTreeMap<String, BTreeSet<String>> {
    let units: Vec<&AdminUnit> = h.at_level(level).collect();
    let all_edges: Vec<Vec<(Point, Point)>> = units.iter().map(|u| edges(u)).collect();
    let boxes: Vec<(Point, Point)> = all_edges.iter().map(|e| bbox(e)).collect();
    let mut out: BTreeMap<String, BTreeSet<String>> =
        units.iter().map(|u| (u.unit_id.clone(), BTreeSet::new())).collect();

    for i in 0..units.len() {
        for j in i + 1..units.len() {
            if !boxes_meet(&boxes[i], &boxes[j]) {
                continue;
            }
            let meet = all_edges[i].iter().any(|&(a, b)| {
                all_edges[j].iter().any(|&(c, d)| match contiguity {
                    Contiguity::Queen => segments_touch(a, b, c, d),
                    Contiguity::Rook => segments_overlap(a, b, c, d),
                })
            });
            if meet {
                out.get_mut(&units[i].unit_id).unwrap().insert(units[j].unit_id.clone());
                out.get_mut(&units[j].unit_id).unwrap().insert(units[i].unit_id.clone());
            }
        }
    }
    out
}
