//! Brute-force ground truth over the flip graph.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::flipdag::FlipSequence;
use crate::triangulation::{FlipRecord, Triangulation, TriangulationError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsResult {
    pub distance: usize,
    /// A shortest flip sequence from the start to the end triangulation.
    pub witness: FlipSequence,
}

/// Exact flip distance if it is at most `cap`.
pub fn bfs_distance(start: &Triangulation, end: &Triangulation, cap: usize) -> Result<Option<BfsResult>, TriangulationError> {
    if !start.same_point_set(end) {
        return Err(TriangulationError::PointSetMismatch);
    }
    let goal = end.canonical_key();
    let root = start.canonical_key();
    if root == goal {
        return Ok(Some(BfsResult { distance: 0, witness: FlipSequence::new(start.clone(), Vec::new()) }));
    }
    // node -> (parent index, flip from parent, depth)
    let mut nodes: Vec<(usize, Option<FlipRecord>, usize)> = vec![(usize::MAX, None, 0)];
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::from([(root, 0)]);
    let mut queue: VecDeque<(usize, Triangulation)> = VecDeque::from([(0, start.clone())]);
    while let Some((idx, t)) = queue.pop_front() {
        let depth = nodes[idx].2;
        if depth >= cap {
            continue;
        }
        for e in t.flippable_edges() {
            let (next, rec) = t.flip(e).expect("flippable");
            let key = next.canonical_key();
            if seen.contains_key(&key) {
                continue;
            }
            let id = nodes.len();
            nodes.push((idx, Some(rec), depth + 1));
            if key == goal {
                let mut flips = Vec::with_capacity(depth + 1);
                let mut cur = id;
                while let Some(rec) = nodes[cur].1 {
                    flips.push(rec);
                    cur = nodes[cur].0;
                }
                flips.reverse();
                return Ok(Some(BfsResult { distance: depth + 1, witness: FlipSequence::new(start.clone(), flips) }));
            }
            seen.insert(key, id);
            queue.push_back((id, next));
        }
    }
    Ok(None)
}

/// The flip graph reachable from a seed, as triangulations plus adjacency
/// lists of node indices. Node 0 is the seed; numbering follows BFS order.
#[derive(Debug, Clone)]
pub struct FlipGraph {
    pub nodes: Vec<Triangulation>,
    pub adjacency: Vec<Vec<usize>>,
}

pub fn flip_graph(seed: &Triangulation) -> FlipGraph {
    let mut nodes = vec![seed.clone()];
    let mut index: HashMap<Vec<u8>, usize> = HashMap::from([(seed.canonical_key(), 0)]);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new()];
    let mut head = 0;
    while head < nodes.len() {
        let t = nodes[head].clone();
        for e in t.flippable_edges() {
            let (next, _) = t.flip(e).expect("flippable");
            let key = next.canonical_key();
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    index.insert(key, id);
                    nodes.push(next);
                    adjacency.push(Vec::new());
                    id
                }
            };
            adjacency[head].push(id);
        }
        head += 1;
    }
    FlipGraph { nodes, adjacency }
}

/// Canonical keys of every triangulation reachable from `seed`, sorted.
pub fn enumerate_all(seed: &Triangulation) -> Vec<Vec<u8>> {
    let mut keys: Vec<Vec<u8>> = flip_graph(seed).nodes.iter().map(Triangulation::canonical_key).collect();
    keys.sort_unstable();
    keys
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipGraphStats {
    pub n: usize,
    pub order: usize,
    pub diameter: usize,
    /// Ordered pairs (including each node with itself) per distance.
    pub distance_histogram: BTreeMap<usize, usize>,
}

impl FlipGraphStats {
    /// CSV with header `n,order,diameter,distance,pairs`, one row per
    /// histogram bucket.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,order,diameter,distance,pairs\n");
        for (d, c) in &self.distance_histogram {
            let _ = writeln!(s, "{},{},{},{},{}", self.n, self.order, self.diameter, d, c);
        }
        s
    }
}

/// All-pairs distances over the flip graph reachable from `seed`.
pub fn graph_stats(seed: &Triangulation) -> FlipGraphStats {
    let g = flip_graph(seed);
    let order = g.nodes.len();
    let mut histogram = BTreeMap::new();
    let mut diameter = 0;
    let mut dist = vec![usize::MAX; order];
    let mut queue = VecDeque::new();
    for src in 0..order {
        dist.fill(usize::MAX);
        dist[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &w in &g.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for &d in &dist {
            *histogram.entry(d).or_insert(0) += 1;
            diameter = diameter.max(d);
        }
    }
    FlipGraphStats { n: seed.points().len(), order, diameter, distance_histogram: histogram }
}
