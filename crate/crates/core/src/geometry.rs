//! Exact integer predicates over planar point sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::triangulation::Edge;

/// Largest admissible absolute coordinate. Keeps every orientation
/// determinant within 64-bit range.
pub const COORD_LIMIT: i64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("a point set needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point {id} has coordinate out of range (|x|,|y| must be <= 2^30)")]
    OutOfRange { id: usize },
    #[error("points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("points {0}, {1}, {2} are collinear")]
    Collinear(usize, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub id: usize,
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(id: usize, x: i64, y: i64) -> Self {
        Point { id, x, y }
    }
}

/// Sign of the cross product `(q - p) x (r - p)`: `+1` for a counterclockwise
/// turn, `-1` for clockwise, `0` for collinear.
pub fn orient(p: &Point, q: &Point, r: &Point) -> i8 {
    orient_xy((p.x, p.y), (q.x, q.y), (r.x, r.y))
}

pub(crate) fn orient_xy(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> i8 {
    // i128 keeps the corner case |x|,|y| = 2^30 exact.
    let det = (q.0 - p.0) as i128 * (r.1 - p.1) as i128 - (q.1 - p.1) as i128 * (r.0 - p.0) as i128;
    match det.cmp(&0) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// True iff the quadrilateral `a b c d` (given in cyclic order) is strictly
/// convex: all four consecutive turns have the same nonzero sign.
pub fn strictly_convex_quad(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let s = orient(a, b, c);
    s != 0 && orient(b, c, d) == s && orient(c, d, a) == s && orient(d, a, b) == s
}

/// True iff the open segments `p1-p2` and `q1-q2` intersect. Touching at a
/// shared endpoint does not count.
pub fn segments_properly_cross(e1: (&Point, &Point), e2: (&Point, &Point)) -> bool {
    let (p1, p2) = e1;
    let (q1, q2) = e2;
    let shared = |a: &Point, b: &Point| a.x == b.x && a.y == b.y;
    if shared(p1, q1) || shared(p1, q2) || shared(p2, q1) || shared(p2, q2) {
        return false;
    }
    let d1 = orient(p1, p2, q1);
    let d2 = orient(p1, p2, q2);
    let d3 = orient(q1, q2, p1);
    let d4 = orient(q1, q2, p2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    // Collinear touching (only reachable for degenerate input).
    let on = |a: &Point, b: &Point, c: &Point| {
        c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    (d1 == 0 && on(p1, p2, q1))
        || (d2 == 0 && on(p1, p2, q2))
        || (d3 == 0 && on(q1, q2, p1))
        || (d4 == 0 && on(q1, q2, p2))
}

/// An ordered set of points in general position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    /// Validates and wraps a list of `(x, y)` coordinates; ids are assigned
    /// in order.
    pub fn new(coords: &[(i64, i64)]) -> Result<Self, GeometryError> {
        let n = coords.len();
        if n < 3 {
            return Err(GeometryError::TooFewPoints(n));
        }
        let points: Vec<Point> = coords
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| Point::new(id, x, y))
            .collect();
        for p in &points {
            if p.x.abs() > COORD_LIMIT || p.y.abs() > COORD_LIMIT {
                return Err(GeometryError::OutOfRange { id: p.id });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if points[i].x == points[j].x && points[i].y == points[j].y {
                    return Err(GeometryError::Duplicate(i, j));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if orient(&points[i], &points[j], &points[k]) == 0 {
                        return Err(GeometryError::Collinear(i, j, k));
                    }
                }
            }
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, id: usize) -> &Point {
        &self.points[id]
    }

    pub fn coords(&self) -> Vec<(i64, i64)> {
        self.points.iter().map(|p| (p.x, p.y)).collect()
    }

    /// Point ids of the convex hull in counterclockwise order, starting from
    /// the lexicographically smallest point.
    pub fn hull_cycle(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by_key(|&i| (self.points[i].x, self.points[i].y));
        let turn = |a: usize, b: usize, c: usize| orient(&self.points[a], &self.points[b], &self.points[c]);

        // Andrew's monotone chain.
        let mut lower: Vec<usize> = Vec::new();
        for &i in &idx {
            while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0 {
                lower.pop();
            }
            lower.push(i);
        }
        let mut upper: Vec<usize> = Vec::new();
        for &i in idx.iter().rev() {
            while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0 {
                upper.pop();
            }
            upper.push(i);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }
}

/// Edges of the convex hull, canonical form.
pub fn convex_hull_edges(ps: &PointSet) -> BTreeSet<Edge> {
    let cycle = ps.hull_cycle();
    (0..cycle.len())
        .map(|i| Edge::new(cycle[i], cycle[(i + 1) % cycle.len()]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::new(0, x, y)
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(0, 1)), 1);
        assert_eq!(orient(&p(0, 0), &p(0, 1), &p(1, 0)), -1);
        assert_eq!(orient(&p(0, 0), &p(1, 1), &p(2, 2)), 0);
    }

    #[test]
    fn orient_extreme_coordinates() {
        let m = COORD_LIMIT;
        assert_eq!(orient(&p(-m, -m), &p(m, -m), &p(m, m)), 1);
        assert_eq!(orient(&p(-m, -m), &p(m, m), &p(m, -m)), -1);
        assert_eq!(orient(&p(-m, m), &p(m, -m), &p(0, 0)), 0);
    }

    #[test]
    fn convex_quad_examples() {
        assert!(strictly_convex_quad(&p(0, 0), &p(1, 0), &p(1, 1), &p(0, 1)));
        // orient(a,b,c) = +2 but orient(b,c,d) = -2
        assert!(!strictly_convex_quad(&p(0, 0), &p(2, 0), &p(1, 1), &p(1, 3)));
        assert!(!strictly_convex_quad(&p(0, 0), &p(1, 0), &p(2, 0), &p(0, 1)));
    }

    #[test]
    fn crossing_examples() {
        assert!(segments_properly_cross((&p(0, 0), &p(2, 2)), (&p(0, 2), &p(2, 0))));
        assert!(!segments_properly_cross((&p(0, 0), &p(1, 1)), (&p(1, 1), &p(2, 0))));
        assert!(!segments_properly_cross((&p(0, 0), &p(1, 0)), (&p(3, 0), &p(4, 1))));
    }

    /// Brute-force hull: a pair is a hull edge iff every other point lies
    /// strictly on one side of it.
    fn brute_hull(ps: &PointSet) -> BTreeSet<Edge> {
        let pts = ps.points();
        let mut out = BTreeSet::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let sides: BTreeSet<i8> = (0..pts.len())
                    .filter(|&k| k != i && k != j)
                    .map(|k| orient(&pts[i], &pts[j], &pts[k]))
                    .collect();
                if sides.len() == 1 {
                    out.insert(Edge::new(i, j));
                }
            }
        }
        out
    }

    #[test]
    fn hull_examples() {
        let tri = PointSet::new(&[(0, 0), (4, 0), (1, 3)]).unwrap();
        assert_eq!(convex_hull_edges(&tri).len(), 3);

        let parabola = PointSet::new(&[(0, 0), (1, 1), (2, 4), (3, 9), (4, 16)]).unwrap();
        let expected: BTreeSet<Edge> = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]
            .into_iter()
            .map(|(a, b)| Edge::new(a, b))
            .collect();
        assert_eq!(brute_hull(&parabola), expected);
        assert_eq!(convex_hull_edges(&parabola), expected);

        let square = PointSet::new(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        assert_eq!(convex_hull_edges(&square).len(), 4);

        let with_inner = PointSet::new(&[(0, 0), (10, 0), (5, 9), (5, 3), (4, 2)]).unwrap();
        assert_eq!(convex_hull_edges(&with_inner), brute_hull(&with_inner));
    }

    #[test]
    fn point_set_validation() {
        assert_eq!(PointSet::new(&[(0, 0), (1, 0)]), Err(GeometryError::TooFewPoints(2)));
        assert_eq!(
            PointSet::new(&[(0, 0), (1, 0), (0, 0)]),
            Err(GeometryError::Duplicate(0, 2))
        );
        assert_eq!(
            PointSet::new(&[(0, 0), (1, 1), (5, 0), (2, 2)]),
            Err(GeometryError::Collinear(0, 1, 3))
        );
        assert_eq!(
            PointSet::new(&[(0, 0), (1, 0), (0, COORD_LIMIT + 1)]),
            Err(GeometryError::OutOfRange { id: 2 })
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coord() -> impl Strategy<Value = (i64, i64)> {
            (-COORD_LIMIT..=COORD_LIMIT, -COORD_LIMIT..=COORD_LIMIT)
        }

        proptest! {
            #[test]
            fn orient_antisymmetric(a in coord(), b in coord(), c in coord()) {
                let (a, b, c) = (p(a.0, a.1), p(b.0, b.1), p(c.0, c.1));
                let s = orient(&a, &b, &c);
                prop_assert_eq!(orient(&b, &a, &c), -s);
                prop_assert_eq!(orient(&a, &c, &b), -s);
                prop_assert_eq!(orient(&c, &b, &a), -s);
                prop_assert_eq!(orient(&b, &c, &a), s);
            }

            #[test]
            fn convex_quad_symmetries(q in proptest::array::uniform4((-50i64..50, -50i64..50))) {
                let q: Vec<Point> = q.iter().map(|&(x, y)| p(x, y)).collect();
                let base = strictly_convex_quad(&q[0], &q[1], &q[2], &q[3]);
                prop_assert_eq!(strictly_convex_quad(&q[1], &q[2], &q[3], &q[0]), base);
                prop_assert_eq!(strictly_convex_quad(&q[2], &q[3], &q[0], &q[1]), base);
                prop_assert_eq!(strictly_convex_quad(&q[3], &q[2], &q[1], &q[0]), base);
            }
        }
    }
}
