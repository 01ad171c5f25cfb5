//! Triangulations of a point set and the flip primitive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;
use thiserror::Error;

use crate::geometry::{convex_hull_edges, orient, segments_properly_cross, strictly_convex_quad, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("edge {0} references a point index out of range or is degenerate")]
    BadIndex(Edge),
    #[error("edges {0} and {1} cross")]
    NotPlanar(Edge, Edge),
    #[error("triangulation needs {expected} edges, got {found}")]
    NotMaximal { expected: usize, found: usize },
    #[error("edge {0} has the wrong number of incident triangles")]
    BadIncidence(Edge),
    #[error("edge {0} is not in the triangulation")]
    EdgeAbsent(Edge),
    #[error("edge {0} is not flippable")]
    NotFlippable(Edge),
    #[error("triangulations are over different point sets")]
    PointSetMismatch,
}

/// An undirected edge between two point ids, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    /// Canonicalizes the endpoint order.
    pub fn new(p: usize, q: usize) -> Self {
        if p <= q {
            Edge { a: p, b: q }
        } else {
            Edge { a: q, b: p }
        }
    }

    pub fn has_endpoint(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// A triangle face with `u < v < w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

impl Triangle {
    pub fn new(p: usize, q: usize, r: usize) -> Self {
        let mut t = [p, q, r];
        t.sort_unstable();
        Triangle { u: t[0], v: t[1], w: t[2] }
    }

    pub fn edges(&self) -> [Edge; 3] {
        [Edge::new(self.u, self.v), Edge::new(self.u, self.w), Edge::new(self.v, self.w)]
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        let has = |x: usize| self.u == x || self.v == x || self.w == x;
        has(e.a) && has(e.b)
    }
}

/// One flip: the edge removed and the edge inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlipRecord {
    pub underlying: Edge,
    pub resulting: Edge,
}

impl fmt::Display for FlipRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.underlying, self.resulting)
    }
}

/// Apex vertices of the (one or two) triangles on an edge, ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Apexes {
    first: usize,
    second: Option<usize>,
}

impl Apexes {
    fn one(c: usize) -> Self {
        Apexes { first: c, second: None }
    }

    fn two(c: usize, d: usize) -> Self {
        Apexes { first: c.min(d), second: Some(c.max(d)) }
    }

    fn replace(&mut self, old: usize, new: usize) {
        let (c, d) = match self.second {
            None => {
                debug_assert_eq!(self.first, old);
                *self = Apexes::one(new);
                return;
            }
            Some(d) => (self.first, d),
        };
        *self = if c == old {
            Apexes::two(new, d)
        } else {
            debug_assert_eq!(d, old);
            Apexes::two(c, new)
        };
    }

    fn iter(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.first).chain(self.second)
    }
}

/// A triangulation of a point set: edge set plus triangle incidence.
///
/// Equality compares point sets and edge sets.
#[derive(Debug, Clone)]
pub struct Triangulation {
    points: Arc<PointSet>,
    apexes: BTreeMap<Edge, Apexes>,
    hull_size: usize,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.same_point_set(other) && self.apexes.keys().eq(other.apexes.keys())
    }
}

impl Eq for Triangulation {}

impl Triangulation {
    /// Validates `edges` as a triangulation of `points` and computes the
    /// triangle incidence.
    pub fn build(points: Arc<PointSet>, edges: &[Edge]) -> Result<Self, TriangulationError> {
        let n = points.len();
        let mut set = BTreeSet::new();
        for &e in edges {
            let e = Edge::new(e.a, e.b);
            if e.a == e.b || e.b >= n {
                return Err(TriangulationError::BadIndex(e));
            }
            set.insert(e);
        }
        let list: Vec<Edge> = set.iter().copied().collect();
        let pts = points.points();
        for (i, e) in list.iter().enumerate() {
            for f in &list[i + 1..] {
                if segments_properly_cross((&pts[e.a], &pts[e.b]), (&pts[f.a], &pts[f.b])) {
                    return Err(TriangulationError::NotPlanar(*e, *f));
                }
            }
        }
        let hull = convex_hull_edges(&points);
        let h = hull.len();
        let expected = 3 * n - 3 - h;
        if list.len() != expected {
            return Err(TriangulationError::NotMaximal { expected, found: list.len() });
        }

        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for e in &list {
            adj[e.a].insert(e.b);
            adj[e.b].insert(e.a);
        }
        // Faces are the empty 3-cycles.
        let mut faces = Vec::new();
        for e in &list {
            for &c in adj[e.a].intersection(&adj[e.b]) {
                if c <= e.b {
                    continue;
                }
                if triangle_is_empty(&points, e.a, e.b, c) {
                    faces.push(Triangle::new(e.a, e.b, c));
                }
            }
        }
        let mut apex_lists: BTreeMap<Edge, Vec<usize>> = list.iter().map(|&e| (e, Vec::new())).collect();
        for t in &faces {
            for (e, apex) in [(Edge::new(t.u, t.v), t.w), (Edge::new(t.u, t.w), t.v), (Edge::new(t.v, t.w), t.u)] {
                apex_lists.get_mut(&e).expect("face edges are in the edge set").push(apex);
            }
        }
        let mut apexes = BTreeMap::new();
        for (e, cs) in apex_lists {
            let ok = match cs.as_slice() {
                [c] => hull.contains(&e).then(|| Apexes::one(*c)),
                [c, d] => {
                    let opposite = orient(&pts[e.a], &pts[e.b], &pts[*c]) != orient(&pts[e.a], &pts[e.b], &pts[*d]);
                    (!hull.contains(&e) && opposite).then(|| Apexes::two(*c, *d))
                }
                _ => None,
            };
            match ok {
                Some(a) => {
                    apexes.insert(e, a);
                }
                None => return Err(TriangulationError::BadIncidence(e)),
            }
        }
        Ok(Triangulation { points, apexes, hull_size: h })
    }

    /// Assembles a triangulation from a face list known to be valid.
    pub(crate) fn from_faces(points: Arc<PointSet>, faces: &[Triangle]) -> Self {
        let mut lists: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for t in faces {
            for (e, apex) in [(Edge::new(t.u, t.v), t.w), (Edge::new(t.u, t.w), t.v), (Edge::new(t.v, t.w), t.u)] {
                lists.entry(e).or_default().push(apex);
            }
        }
        let mut hull_size = 0;
        let apexes = lists
            .into_iter()
            .map(|(e, cs)| {
                let a = match cs.as_slice() {
                    [c] => {
                        hull_size += 1;
                        Apexes::one(*c)
                    }
                    [c, d] => Apexes::two(*c, *d),
                    _ => panic!("edge {e} with {} incident faces", cs.len()),
                };
                (e, a)
            })
            .collect();
        Triangulation { points, apexes, hull_size }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn same_point_set(&self, other: &Triangulation) -> bool {
        Arc::ptr_eq(&self.points, &other.points) || self.points == other.points
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.apexes.keys().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.apexes.len()
    }

    pub fn hull_size(&self) -> usize {
        self.hull_size
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.apexes.contains_key(&e)
    }

    pub fn is_hull_edge(&self, e: Edge) -> bool {
        self.apexes.get(&e).is_some_and(|a| a.second.is_none())
    }

    /// All faces, sorted.
    pub fn triangles(&self) -> Vec<Triangle> {
        let mut out: Vec<Triangle> = self
            .apexes
            .iter()
            .flat_map(|(e, ap)| ap.iter().map(move |c| Triangle::new(e.a, e.b, c)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The one or two faces incident to `e`, sorted.
    pub fn triangles_at(&self, e: Edge) -> Result<ArrayVec<Triangle, 2>, TriangulationError> {
        let ap = self.apexes.get(&e).ok_or(TriangulationError::EdgeAbsent(e))?;
        Ok(ap.iter().map(|c| Triangle::new(e.a, e.b, c)).collect())
    }

    /// Apexes `(c, d)` with `c < d` of the two faces at an interior edge;
    /// `None` for a hull edge.
    pub fn quad_around(&self, e: Edge) -> Result<Option<(usize, usize)>, TriangulationError> {
        let ap = self.apexes.get(&e).ok_or(TriangulationError::EdgeAbsent(e))?;
        Ok(ap.second.map(|d| (ap.first, d)))
    }

    pub fn is_flippable(&self, e: Edge) -> Result<bool, TriangulationError> {
        Ok(match self.quad_around(e)? {
            None => false,
            Some((c, d)) => {
                let p = self.points.points();
                strictly_convex_quad(&p[e.a], &p[c], &p[e.b], &p[d])
            }
        })
    }

    /// Flippable edges in ascending order.
    pub fn flippable_edges(&self) -> Vec<Edge> {
        self.edges().filter(|&e| self.is_flippable(e).unwrap_or(false)).collect()
    }

    /// Returns the triangulation with `e` replaced by the other diagonal of
    /// its quadrilateral.
    pub fn flip(&self, e: Edge) -> Result<(Triangulation, FlipRecord), TriangulationError> {
        let mut next = self.clone();
        let rec = next.flip_in_place(e)?;
        Ok((next, rec))
    }

    /// In-place flip. Flipping `rec.resulting` afterwards restores the
    /// previous state exactly.
    pub fn flip_in_place(&mut self, e: Edge) -> Result<FlipRecord, TriangulationError> {
        if !self.is_flippable(e)? {
            return Err(TriangulationError::NotFlippable(e));
        }
        let ap = self.apexes.remove(&e).expect("checked present");
        let (c, d) = (ap.first, ap.second.expect("interior edge"));
        let resulting = Edge::new(c, d);
        // Faces abc, abd become acd, bcd.
        self.apexes.get_mut(&Edge::new(e.a, c)).expect("face edge").replace(e.b, d);
        self.apexes.get_mut(&Edge::new(e.b, c)).expect("face edge").replace(e.a, d);
        self.apexes.get_mut(&Edge::new(e.a, d)).expect("face edge").replace(e.b, c);
        self.apexes.get_mut(&Edge::new(e.b, d)).expect("face edge").replace(e.a, c);
        self.apexes.insert(resulting, Apexes::two(e.a, e.b));
        Ok(FlipRecord { underlying: e, resulting })
    }

    /// Edges sharing a face with `e`: faces in canonical order, and within a
    /// face its two other edges in ascending order. This order gives Move
    /// directions their meaning.
    pub fn edge_neighbors(&self, e: Edge) -> Result<ArrayVec<Edge, 4>, TriangulationError> {
        let ap = self.apexes.get(&e).ok_or(TriangulationError::EdgeAbsent(e))?;
        // Faces share a and b, so their canonical order follows the apex.
        let mut out = ArrayVec::new();
        for c in ap.iter() {
            let (x, y) = (Edge::new(e.a, c), Edge::new(e.b, c));
            if x < y {
                out.push(x);
                out.push(y);
            } else {
                out.push(y);
                out.push(x);
            }
        }
        Ok(out)
    }

    /// The `dir`-th entry of [`Triangulation::edge_neighbors`], if any.
    pub(crate) fn edge_neighbor(&self, e: Edge, dir: usize) -> Option<Edge> {
        let ap = self.apexes.get(&e)?;
        let c = match dir / 2 {
            0 => ap.first,
            1 => ap.second?,
            _ => return None,
        };
        let (x, y) = (Edge::new(e.a, c), Edge::new(e.b, c));
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        Some(if dir.is_multiple_of(2) { lo } else { hi })
    }

    /// Edges of `self` missing from `target`, ascending.
    pub fn necessary_edges(&self, target: &Triangulation) -> Result<Vec<Edge>, TriangulationError> {
        if !self.same_point_set(target) {
            return Err(TriangulationError::PointSetMismatch);
        }
        Ok(self.edges().filter(|e| !target.contains(*e)).collect())
    }

    /// Sorted edge list as little-endian `u32` pairs.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(self.apexes.len() * 8);
        for e in self.apexes.keys() {
            key.extend_from_slice(&(e.a as u32).to_le_bytes());
            key.extend_from_slice(&(e.b as u32).to_le_bytes());
        }
        key
    }
}

fn triangle_is_empty(ps: &PointSet, a: usize, b: usize, c: usize) -> bool {
    let p = ps.points();
    let s = orient(&p[a], &p[b], &p[c]);
    !p.iter().any(|q| {
        q.id != a
            && q.id != b
            && q.id != c
            && orient(&p[a], &p[b], q) == s
            && orient(&p[b], &p[c], q) == s
            && orient(&p[c], &p[a], q) == s
    })
}
