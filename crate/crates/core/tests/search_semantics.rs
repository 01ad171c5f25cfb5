//! The pruned depth-first search against a literal enumeration of
//! compositions and iteration shapes, and against breadth-first search.

use std::sync::Arc;

use flipdist::flipdag::FlipSequence;
use flipdist::instances::{gen_convex, gen_random_points, initial_triangulation, random_walk_triangulation};
use flipdist::oracle::{bfs_distance, flip_graph};
use flipdist::solver::{
    compositions, exists_sequence, find_sequence, flip_distance_upto, iteration_shapes, transform, Composition,
    IterationShape, SearchOptions,
};
use flipdist::triangulation::{Edge, FlipRecord, Triangulation};

/// Ordering of necessary edges with a cursor, rebuilt from the current
/// triangulation once exhausted.
#[derive(Clone)]
struct Olex {
    order: Vec<Edge>,
    pos: usize,
}

impl Olex {
    fn pick(&mut self, t: &Triangulation, end: &Triangulation) -> Option<Edge> {
        while self.pos < self.order.len() {
            let e = self.order[self.pos];
            self.pos += 1;
            if t.contains(e) && !end.contains(e) {
                return Some(e);
            }
        }
        self.order = t.edges().filter(|e| !end.contains(*e)).collect();
        self.pos = 1;
        self.order.first().copied()
    }
}

type Run = (Composition, Vec<(Edge, IterationShape)>, Vec<FlipRecord>);

fn enumerate_iterations(
    t: &Triangulation,
    end: &Triangulation,
    parts: &[usize],
    olex: Olex,
    trail: &mut Vec<(Edge, IterationShape)>,
    flips: &mut Vec<FlipRecord>,
) -> bool {
    let Some((&k_i, rest)) = parts.split_first() else {
        return t == end;
    };
    let mut olex = olex;
    let Some(start) = olex.pick(t, end) else {
        return false;
    };
    for shape in iteration_shapes(k_i) {
        if let Some((next, fl)) = transform(t, start, &shape) {
            trail.push((start, shape));
            let before = flips.len();
            flips.extend(fl);
            if enumerate_iterations(&next, end, rest, olex.clone(), trail, flips) {
                return true;
            }
            flips.truncate(before);
            trail.pop();
        }
    }
    false
}

/// Compositions in order, shapes in order, no pruning beyond what
/// `transform` itself rejects.
fn literal_search(start: &Triangulation, end: &Triangulation, k: usize) -> Option<Run> {
    if k == 0 {
        return (start == end).then(|| (Composition { parts: vec![] }, vec![], vec![]));
    }
    for comp in compositions(k) {
        let olex = Olex { order: start.edges().filter(|e| !end.contains(*e)).collect(), pos: 0 };
        let (mut trail, mut flips) = (Vec::new(), Vec::new());
        if enumerate_iterations(start, end, &comp.parts, olex, &mut trail, &mut flips) {
            return Some((comp, trail, flips));
        }
    }
    None
}

fn instances(n: usize, count: u64, max_walk: usize) -> Vec<(Triangulation, Triangulation)> {
    (0..count)
        .map(|seed| {
            let ps = Arc::new(gen_random_points(n, seed, 500).unwrap());
            let t = initial_triangulation(ps);
            let steps = seed as usize % (max_walk + 1);
            let u = random_walk_triangulation(&t, steps, seed + 77).unwrap();
            (t, u)
        })
        .collect()
}

#[test]
fn search_matches_literal_enumeration() {
    let mut pairs = Vec::new();
    let hexagon = flip_graph(&initial_triangulation(Arc::new(gen_convex(6).unwrap()))).nodes;
    for a in hexagon.iter().step_by(3) {
        for b in &hexagon {
            pairs.push((a.clone(), b.clone()));
        }
    }
    pairs.extend(instances(7, 40, 4));
    for (a, b) in &pairs {
        let d = bfs_distance(a, b, 10).unwrap().unwrap().distance;
        // Below, at, and just above the true distance.
        for k in d.saturating_sub(1)..=(d + 1).min(4) {
            let literal = literal_search(a, b, k);
            let dfs = find_sequence(a, b, k, SearchOptions::default()).unwrap();
            assert_eq!(literal.is_some(), dfs.is_some(), "k = {k}, d = {d}");
            if let (Some((comp, trail, flips)), Some(w)) = (literal, dfs) {
                assert_eq!(w.composition(), comp);
                assert_eq!(w.flips, flips);
                let got: Vec<(Edge, IterationShape)> = w.iterations.iter().map(|it| (it.start, it.shape.clone())).collect();
                assert_eq!(got, trail);
            }
        }
    }
}

#[test]
fn parallel_search_returns_sequential_witness() {
    for (a, b) in instances(9, 25, 6) {
        let d = flip_distance_upto(&a, &b, 6).unwrap().unwrap();
        let seq = find_sequence(&a, &b, d, SearchOptions::default()).unwrap();
        for workers in [2, 3, 8] {
            assert_eq!(find_sequence(&a, &b, d, SearchOptions { workers }).unwrap(), seq);
        }
        if d > 0 {
            assert_eq!(find_sequence(&a, &b, d - 1, SearchOptions { workers: 4 }).unwrap(), None);
        }
    }
}

#[test]
fn hexagon_pairs_decide_exactly_at_bfs_distance() {
    let all = flip_graph(&initial_triangulation(Arc::new(gen_convex(6).unwrap()))).nodes;
    for a in &all {
        for b in &all {
            let d = bfs_distance(a, b, 10).unwrap().unwrap().distance;
            assert!(exists_sequence(a, b, d).unwrap());
            for k in 0..d {
                assert!(!exists_sequence(a, b, k).unwrap());
            }
        }
    }
}

#[test]
fn pentagon_distance_two_via_transform() {
    let all = flip_graph(&initial_triangulation(Arc::new(gen_convex(5).unwrap()))).nodes;
    let a = &all[0];
    let b = all.iter().find(|b| bfs_distance(a, b, 5).unwrap().unwrap().distance == 2).unwrap();
    let w = find_sequence(a, b, 2, SearchOptions::default()).unwrap().unwrap();
    // Replaying the accepting iterations through `transform` reaches the target.
    let mut t = a.clone();
    for it in &w.iterations {
        t = transform(&t, it.start, &it.shape).unwrap().0;
    }
    assert_eq!(&t, b);
    assert_eq!(FlipSequence::new(a.clone(), w.flips).replay().unwrap(), *b);
}

/// Every ordered pair of octagon triangulations (17,424 pairs).
#[test]
fn convex_octagon_all_pairs() {
    let all = flip_graph(&initial_triangulation(Arc::new(gen_convex(8).unwrap()))).nodes;
    for a in &all {
        for b in &all {
            let d = bfs_distance(a, b, usize::MAX).unwrap().unwrap().distance;
            assert_eq!(flip_distance_upto(a, b, d).unwrap(), Some(d));
        }
    }
}

/// Longer walks on larger random point sets.
#[test]
fn random_larger_instances() {
    for n in [9, 10, 11] {
        for (a, b) in instances(n, 60, 9) {
            let d = bfs_distance(&a, &b, usize::MAX).unwrap().unwrap().distance;
            assert_eq!(flip_distance_upto(&a, &b, d).unwrap(), Some(d), "n = {n}");
        }
    }
}
