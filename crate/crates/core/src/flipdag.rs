//! Flip sequences and their dependency DAG.
//!
//! Flip `j` depends on an earlier flip `i` when the edge created by `i` is
//! the edge flipped by `j`, or shares a face with it in the triangulation
//! right before `j`, and that created edge survives until `j`. Any
//! topological order of these dependencies is again a valid sequence with
//! the same endpoint.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::triangulation::{FlipRecord, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipDagError {
    #[error("flip {0} of the sequence is invalid")]
    InvalidAt(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipSequence {
    pub start: Triangulation,
    pub flips: Vec<FlipRecord>,
}

impl FlipSequence {
    pub fn new(start: Triangulation, flips: Vec<FlipRecord>) -> Self {
        FlipSequence { start, flips }
    }

    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }

    /// Final triangulation after applying every flip.
    pub fn replay(&self) -> Result<Triangulation, FlipDagError> {
        let mut t = self.start.clone();
        for (i, f) in self.flips.iter().enumerate() {
            apply_checked(&mut t, f).map_err(|_| FlipDagError::InvalidAt(i))?;
        }
        Ok(t)
    }

    /// `T_0, ..., T_r`: the start and every intermediate triangulation.
    pub fn intermediates(&self) -> Result<Vec<Triangulation>, FlipDagError> {
        let mut out = Vec::with_capacity(self.flips.len() + 1);
        let mut t = self.start.clone();
        out.push(t.clone());
        for (i, f) in self.flips.iter().enumerate() {
            apply_checked(&mut t, f).map_err(|_| FlipDagError::InvalidAt(i))?;
            out.push(t.clone());
        }
        Ok(out)
    }
}

fn apply_checked(t: &mut Triangulation, f: &FlipRecord) -> Result<(), ()> {
    if !t.contains(f.underlying) {
        return Err(());
    }
    match t.flip_in_place(f.underlying) {
        Ok(rec) if rec.resulting == f.resulting => Ok(()),
        Ok(rec) => {
            t.flip_in_place(rec.resulting).expect("undo of a flip");
            Err(())
        }
        Err(_) => Err(()),
    }
}

/// Dependency DAG over a flip sequence; arcs `(i, j)` always have `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipDag {
    pub node_count: usize,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl FlipDag {
    pub fn sources(&self) -> Vec<usize> {
        let mut indeg = vec![0usize; self.node_count];
        for &(_, j) in &self.arcs {
            indeg[j] += 1;
        }
        (0..self.node_count).filter(|&v| indeg[v] == 0).collect()
    }

    pub fn is_topological(&self, perm: &[usize]) -> bool {
        let mut pos = vec![usize::MAX; self.node_count];
        if perm.len() != self.node_count {
            return false;
        }
        for (p, &v) in perm.iter().enumerate() {
            if v >= self.node_count || pos[v] != usize::MAX {
                return false;
            }
            pos[v] = p;
        }
        self.arcs.iter().all(|&(i, j)| pos[i] < pos[j])
    }

    /// Graphviz rendering; node labels are sequence indices.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph flipdag {\n");
        for v in 0..self.node_count {
            let _ = writeln!(s, "  {v};");
        }
        for (i, j) in &self.arcs {
            let _ = writeln!(s, "  {i} -> {j};");
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_dag(seq: &FlipSequence) -> Result<FlipDag, FlipDagError> {
    let inter = seq.intermediates()?;
    let flips = &seq.flips;
    let r = flips.len();
    let mut arcs = BTreeSet::new();
    for i in 0..r {
        let created = flips[i].resulting;
        for j in i + 1..r {
            let target = flips[j].underlying;
            let adjacent = created == target
                || inter[j]
                    .triangles_at(target)
                    .map(|ts| ts.iter().any(|t| t.contains_edge(created)))
                    .unwrap_or(false);
            if adjacent {
                arcs.insert((i, j));
            }
            // Once the created edge is flipped away no later flip depends on i.
            if flips[j].underlying == created {
                break;
            }
        }
    }
    Ok(FlipDag { node_count: r, arcs })
}

/// `count` random topological orders, each built by repeatedly taking a
/// uniformly chosen source.
pub fn topological_sorts_sample(dag: &FlipDag, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dag.node_count;
    let mut succ = vec![Vec::new(); n];
    let mut indeg0 = vec![0usize; n];
    for &(i, j) in &dag.arcs {
        succ[i].push(j);
        indeg0[j] += 1;
    }
    (0..count)
        .map(|_| {
            let mut indeg = indeg0.clone();
            let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
            let mut order = Vec::with_capacity(n);
            while !ready.is_empty() {
                ready.sort_unstable();
                let &v = ready.choose(&mut rng).expect("nonempty");
                ready.retain(|&u| u != v);
                order.push(v);
                for &w in &succ[v] {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        ready.push(w);
                    }
                }
            }
            order
        })
        .collect()
}

/// Applies the flips in `perm` order and checks each one is legal, creates
/// the same edge as in the original sequence, and that the end state
/// matches the original endpoint.
pub fn check_reordering(seq: &FlipSequence, perm: &[usize]) -> bool {
    let Ok(target) = seq.replay() else {
        return false;
    };
    let mut seen = vec![false; seq.flips.len()];
    if perm.len() != seq.flips.len() {
        return false;
    }
    let mut t = seq.start.clone();
    for &i in perm {
        if i >= seen.len() || seen[i] {
            return false;
        }
        seen[i] = true;
        if apply_checked(&mut t, &seq.flips[i]).is_err() {
            return false;
        }
    }
    t == target
}
