//! Instance generators and the text formats for instances and flip lists.
//!
//! Instance file (UTF-8, line oriented, `#` starts a comment):
//!
//! ```text
//! flipdist 1
//! points <n>
//! <id> <x> <y>        # n lines, ids 0..n-1 in order
//! tstart <m>
//! <a> <b>             # m lines, a < b
//! tend <m>
//! <a> <b>
//! k <value>           # optional
//! ```
//!
//! Flip list: one flip per line, `a-b -> c-d`.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{orient_xy, GeometryError, PointSet, COORD_LIMIT};
use crate::triangulation::{Edge, FlipRecord, Triangle, Triangulation, TriangulationError};

/// Attempts per point before the random generator gives up.
pub const RETRY_BUDGET: usize = 10_000;

/// Largest `n` for which parabola coordinates stay within bounds.
pub const MAX_CONVEX_N: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid point set: {0}")]
    InvalidPoints(#[from] GeometryError),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(#[from] TriangulationError),
    #[error("n = {0} is out of range")]
    BadSize(usize),
    #[error("coordinate bound {0} is out of range")]
    BadBound(i64),
    #[error("no general-position point found within the retry budget")]
    ExhaustedRetries,
    #[error("no flippable edge to walk along")]
    NoFlippableEdge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub points: Arc<PointSet>,
    pub t_start: Triangulation,
    pub t_end: Triangulation,
    pub k: Option<usize>,
}

/// `(i, i^2)` for `i = 0..n`: strictly convex, integral, no three collinear.
pub fn gen_convex(n: usize) -> Result<PointSet, InstanceError> {
    if !(3..=MAX_CONVEX_N).contains(&n) {
        return Err(InstanceError::BadSize(n));
    }
    let coords: Vec<(i64, i64)> = (0..n as i64).map(|i| (i, i * i)).collect();
    Ok(PointSet::new(&coords)?)
}

/// `n` points drawn uniformly from `[0, bound]^2`, redrawing any point that
/// would duplicate an earlier one or be collinear with two earlier ones.
pub fn gen_random_points(n: usize, seed: u64, bound: i64) -> Result<PointSet, InstanceError> {
    if n < 3 {
        return Err(InstanceError::BadSize(n));
    }
    if !(1..=COORD_LIMIT).contains(&bound) {
        return Err(InstanceError::BadBound(bound));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords: Vec<(i64, i64)> = Vec::with_capacity(n);
    while coords.len() < n {
        let mut placed = false;
        for _ in 0..RETRY_BUDGET {
            let p = (rng.gen_range(0..=bound), rng.gen_range(0..=bound));
            if fits_general_position(&coords, p) {
                coords.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(InstanceError::ExhaustedRetries);
        }
    }
    Ok(PointSet::new(&coords)?)
}

fn fits_general_position(existing: &[(i64, i64)], p: (i64, i64)) -> bool {
    for (i, &q) in existing.iter().enumerate() {
        if q == p {
            return false;
        }
        for &r in &existing[i + 1..] {
            if orient_xy(q, r, p) == 0 {
                return false;
            }
        }
    }
    true
}

/// Sweep triangulation: visit points in `(x, y)` order and connect each to
/// every vertex of the current hull it can see.
pub fn initial_triangulation(points: Arc<PointSet>) -> Triangulation {
    let pts = points.points();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by_key(|&i| (pts[i].x, pts[i].y));
    let xy = |i: usize| (pts[i].x, pts[i].y);

    let (a, b, c) = (order[0], order[1], order[2]);
    let mut hull = if orient_xy(xy(a), xy(b), xy(c)) > 0 { vec![a, b, c] } else { vec![a, c, b] };
    let mut faces = vec![Triangle::new(a, b, c)];

    for &p in &order[3..] {
        let h = hull.len();
        // Edge i runs hull[i] -> hull[i+1] counterclockwise; p sees it from outside.
        let visible: Vec<bool> = (0..h).map(|i| orient_xy(xy(hull[i]), xy(hull[(i + 1) % h]), xy(p)) < 0).collect();
        let first = (0..h).find(|&i| visible[i] && !visible[(i + h - 1) % h]).expect("new point lies outside the hull");
        let mut last = first;
        while visible[(last + 1) % h] {
            last = (last + 1) % h;
        }
        let mut i = first;
        loop {
            faces.push(Triangle::new(hull[i], hull[(i + 1) % h], p));
            if i == last {
                break;
            }
            i = (i + 1) % h;
        }
        let mut next_hull = Vec::with_capacity(h + 1);
        let mut j = (last + 1) % h;
        loop {
            next_hull.push(hull[j]);
            if j == first {
                break;
            }
            j = (j + 1) % h;
        }
        next_hull.push(p);
        hull = next_hull;
    }
    Triangulation::from_faces(points, &faces)
}

/// Applies `steps` flips, each chosen uniformly among the flippable edges.
pub fn random_walk_triangulation(t: &Triangulation, steps: usize, seed: u64) -> Result<Triangulation, InstanceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = t.clone();
    for _ in 0..steps {
        let choices = t.flippable_edges();
        if choices.is_empty() {
            return Err(InstanceError::NoFlippableEdge);
        }
        let e = choices[rng.gen_range(0..choices.len())];
        t.flip_in_place(e)?;
    }
    Ok(t)
}

impl Instance {
    pub fn new(t_start: Triangulation, t_end: Triangulation, k: Option<usize>) -> Result<Self, InstanceError> {
        if !t_start.same_point_set(&t_end) {
            return Err(TriangulationError::PointSetMismatch.into());
        }
        Ok(Instance { points: t_start.points().clone(), t_start, t_end, k })
    }

    pub fn serialize(&self) -> String {
        let mut s = String::from("flipdist 1\n");
        let _ = writeln!(s, "points {}", self.points.len());
        for p in self.points.points() {
            let _ = writeln!(s, "{} {} {}", p.id, p.x, p.y);
        }
        for (name, t) in [("tstart", &self.t_start), ("tend", &self.t_end)] {
            let _ = writeln!(s, "{name} {}", t.edge_count());
            for e in t.edges() {
                let _ = writeln!(s, "{} {}", e.a, e.b);
            }
        }
        if let Some(k) = self.k {
            let _ = writeln!(s, "k {k}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut lines = Lines::new(text);

        let (line, toks) = lines.expect("header")?;
        if toks != ["flipdist", "1"] {
            return Err(syntax(line, "expected `flipdist 1`"));
        }
        let n = lines.section("points")?;
        let mut coords = Vec::with_capacity(n);
        for id in 0..n {
            let (line, toks) = lines.expect("point")?;
            let [i, x, y] = toks[..] else {
                return Err(syntax(line, "expected `<id> <x> <y>`"));
            };
            if number::<usize>(line, i)? != id {
                return Err(syntax(line, &format!("expected point id {id}")));
            }
            coords.push((number::<i64>(line, x)?, number::<i64>(line, y)?));
        }
        let points = Arc::new(PointSet::new(&coords)?);
        let start_edges = lines.edges("tstart")?;
        let end_edges = lines.edges("tend")?;
        let k = match lines.next_line() {
            None => None,
            Some((line, toks)) => {
                let ["k", v] = toks[..] else {
                    return Err(syntax(line, "expected `k <value>` or end of file"));
                };
                Some(number::<usize>(line, v)?)
            }
        };
        if let Some((line, _)) = lines.next_line() {
            return Err(syntax(line, "trailing content"));
        }
        let t_start = Triangulation::build(points.clone(), &start_edges)?;
        let t_end = Triangulation::build(points.clone(), &end_edges)?;
        Ok(Instance { points, t_start, t_end, k })
    }
}

fn syntax(line: usize, msg: &str) -> InstanceError {
    InstanceError::Syntax { line, msg: msg.to_string() }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, InstanceError> {
    tok.parse().map_err(|_| syntax(line, &format!("bad number `{tok}`")))
}

/// Non-empty, comment-stripped lines with 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last_line: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last_line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), InstanceError> {
        let last = self.last_line;
        self.next_line().ok_or_else(|| syntax(last + 1, &format!("unexpected end of file, expected {what}")))
    }

    fn section(&mut self, name: &str) -> Result<usize, InstanceError> {
        let (line, toks) = self.expect(name)?;
        match toks[..] {
            [head, count] if head == name => number(line, count),
            _ => Err(syntax(line, &format!("expected `{name} <count>`"))),
        }
    }

    fn edges(&mut self, name: &str) -> Result<Vec<Edge>, InstanceError> {
        let m = self.section(name)?;
        let mut out = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, toks) = self.expect("edge")?;
            let [a, b] = toks[..] else {
                return Err(syntax(line, "expected `<a> <b>`"));
            };
            let (a, b) = (number::<usize>(line, a)?, number::<usize>(line, b)?);
            if a >= b {
                return Err(syntax(line, "edge endpoints must satisfy a < b"));
            }
            out.push(Edge { a, b });
        }
        Ok(out)
    }
}

pub fn format_flip_list(flips: &[FlipRecord]) -> String {
    flips.iter().map(|f| format!("{f}\n")).collect()
}

/// Parses a flip list. Blank lines, `#` comments and `key=value` metadata
/// lines are skipped, so the output of `flipdist solve` parses directly.
pub fn parse_flip_list(text: &str) -> Result<Vec<FlipRecord>, InstanceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() || is_metadata(body) {
            continue;
        }
        let (u, r) = body.split_once("->").ok_or_else(|| syntax(line, "expected `a-b -> c-d`"))?;
        out.push(FlipRecord { underlying: parse_edge(line, u.trim())?, resulting: parse_edge(line, r.trim())? });
    }
    Ok(out)
}

fn is_metadata(body: &str) -> bool {
    body.split_once('=').is_some_and(|(key, _)| !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

fn parse_edge(line: usize, s: &str) -> Result<Edge, InstanceError> {
    let (a, b) = s.split_once('-').ok_or_else(|| syntax(line, &format!("bad edge `{s}`")))?;
    let (a, b) = (number::<usize>(line, a.trim())?, number::<usize>(line, b.trim())?);
    if a >= b {
        return Err(syntax(line, "edge endpoints must satisfy a < b"));
    }
    Ok(Edge { a, b })
}
