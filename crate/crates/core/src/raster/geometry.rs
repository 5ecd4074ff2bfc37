//! Planar polygon predicates shared by rasterization and adjacency.
//!
//! All tests are exact on the input coordinates: no epsilon snapping.

use serde::{Deserialize, Serialize};

/// `[x, y]` (longitude, latitude for geographic documents).
pub type Point = [f64; 2];

/// Simple polygon: an exterior ring plus optional holes. Rings may repeat
/// their first vertex at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub exterior: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
}

impl Polygon {
    pub fn new(exterior: Vec<Point>) -> Self {
        Self { exterior, holes: Vec::new() }
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]])
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }

    /// True when every ring has at least three distinct vertices.
    pub fn is_valid(&self) -> bool {
        self.rings().all(|r| distinct_vertices(r) >= 3)
    }

    /// Ring edges, including the implicit closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.rings().flat_map(ring_edges)
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.exterior {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Closed containment: boundary points count as inside, the interior is
    /// decided by the even-odd rule over all rings.
    pub fn contains(&self, p: Point) -> bool {
        if self.edges().any(|(a, b)| on_segment(p, a, b)) {
            return true;
        }
        self.edges().filter(|&(a, b)| crosses_ray(p, a, b)).count() % 2 == 1
    }
}

fn distinct_vertices(ring: &[Point]) -> usize {
    let mut seen: Vec<Point> = Vec::with_capacity(ring.len());
    for p in ring {
        if !seen.contains(p) {
            seen.push(*p);
        }
    }
    seen.len()
}

fn ring_edges(ring: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = ring.len();
    let closed = n > 1 && ring[0] == ring[n - 1];
    let m = if closed { n - 1 } else { n };
    (0..m).map(move |i| (ring[i], ring[(i + 1) % n.max(1)]))
        .filter(|(a, b)| a != b)
}

/// Does the rightward horizontal ray from `p` cross edge `ab`?
fn crosses_ray(p: Point, a: Point, b: Point) -> bool {
    if (a[1] > p[1]) == (b[1] > p[1]) {
        return false;
    }
    let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
    p[0] < x
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn within_box(p: Point, a: Point, b: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

pub fn on_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p) == 0.0 && within_box(p, a, b)
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Collinear segments sharing a piece of positive length.
pub fn segments_overlap(a: Point, b: Point, c: Point, d: Point) -> bool {
    if orient(a, b, c) != 0.0 || orient(a, b, d) != 0.0 {
        return false;
    }
    // project onto the dominant axis of ab
    let k = if (b[0] - a[0]).abs() >= (b[1] - a[1]).abs() { 0 } else { 1 };
    let (lo1, hi1) = (a[k].min(b[k]), a[k].max(b[k]));
    let (lo2, hi2) = (c[k].min(d[k]), c[k].max(d[k]));
    lo1.max(lo2) < hi1.min(hi2)
}
