//! Deterministic FPT search for flip sequences of a given length.
//!
//! A run splits `k` into a composition `(k_1, ..., k_t)`. Iteration `i`
//! starts at the next necessary edge in lexicographic order and executes an
//! action string of length `2 k_i - 1` over a walk stack: `Move(d)` pushes
//! the `d`-th face-sharing neighbour of the current edge, `FlipBack` flips
//! the current edge and pops. Every iteration performs exactly `k_i` flips
//! and ends with an empty stack.
//!
//! The search below is a depth-first walk over that space which extends the
//! action string one symbol at a time and abandons a branch as soon as an
//! action fails. It visits surviving branches in the same order as the plain
//! enumeration (compositions in lexicographic order, shapes in
//! lexicographic order with `Move(0) < .. < Move(3) < FlipBack`), so it
//! accepts on the same witness.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::triangulation::{Edge, FlipRecord, Triangulation, TriangulationError};

/// Maximum number of face-sharing neighbours of an edge.
pub const DIRECTIONS: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    /// Step to the given entry of the current edge's neighbour list.
    Move(u8),
    /// Flip the current edge and return to the previous edge of the walk.
    FlipBack,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move(d) => write!(f, "M{d}"),
            Action::FlipBack => f.write_str("F"),
        }
    }
}

/// Action string of one iteration: `k_i` flips, `k_i - 1` moves, ending in
/// a flip, with no prefix of the first `2 k_i - 2` symbols containing more
/// flips than moves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IterationShape {
    actions: Vec<Action>,
}

impl IterationShape {
    pub fn new(actions: Vec<Action>) -> Option<Self> {
        Self::is_valid(&actions).then_some(IterationShape { actions })
    }

    pub fn is_valid(actions: &[Action]) -> bool {
        if actions.is_empty() || actions.len().is_multiple_of(2) || actions[actions.len() - 1] != Action::FlipBack {
            return false;
        }
        let mut balance: i64 = 0;
        for a in &actions[..actions.len() - 1] {
            match a {
                Action::Move(d) if *d < DIRECTIONS => balance += 1,
                Action::Move(_) => return false,
                Action::FlipBack => balance -= 1,
            }
            if balance < 0 {
                return false;
            }
        }
        balance == 0
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// Number of flips, `k_i`.
    pub fn flips(&self) -> usize {
        self.actions.len().div_ceil(2)
    }
}

impl fmt::Display for IterationShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition {
    pub parts: Vec<usize>,
}

impl Composition {
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// Compositions of `k` in lexicographic order of their parts.
///
/// Composition `c` corresponds to a `(k-1)`-bit cut mask read most
/// significant bit first; descending masks give ascending compositions.
pub struct Compositions {
    k: usize,
    next_mask: Option<u64>,
}

pub fn compositions(k: usize) -> Compositions {
    assert!(k < 64, "compositions of k >= 64 are not enumerable");
    let next_mask = (k >= 1).then(|| (1u64 << (k - 1)) - 1);
    Compositions { k, next_mask }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let mask = self.next_mask?;
        self.next_mask = mask.checked_sub(1);
        let mut parts = Vec::new();
        let mut run = 1;
        for pos in 1..self.k {
            if mask >> (self.k - 1 - pos) & 1 == 1 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        Some(Composition { parts })
    }
}

/// All shapes with `k_i` flips in lexicographic order.
pub struct IterationShapes {
    k: usize,
    current: Option<Vec<Action>>,
    fresh: bool,
}

pub fn iteration_shapes(k_i: usize) -> IterationShapes {
    let current = (k_i >= 1).then(|| smallest_completion(Vec::new(), k_i, 0, 0));
    IterationShapes { k: k_i, current, fresh: true }
}

fn smallest_completion(mut prefix: Vec<Action>, k: usize, moves: usize, flips: usize) -> Vec<Action> {
    prefix.extend(std::iter::repeat_n(Action::Move(0), k - 1 - moves));
    prefix.extend(std::iter::repeat_n(Action::FlipBack, k - flips));
    prefix
}

impl IterationShapes {
    fn advance(&self, cur: &[Action]) -> Option<Vec<Action>> {
        let k = self.k;
        let len = cur.len();
        for j in (0..len).rev() {
            let moves = cur[..j].iter().filter(|a| matches!(a, Action::Move(_))).count();
            let flips = j - moves;
            let mut candidates: Vec<Action> = match cur[j] {
                Action::Move(d) => ((d + 1)..DIRECTIONS).map(Action::Move).collect(),
                Action::FlipBack => Vec::new(),
            };
            if matches!(cur[j], Action::Move(_)) {
                candidates.push(Action::FlipBack);
            }
            for c in candidates {
                let ok = match c {
                    Action::Move(_) => moves < k - 1,
                    Action::FlipBack => flips < moves || (j == len - 1 && moves == k - 1 && flips == k - 1),
                };
                if ok {
                    let mut next = cur[..j].to_vec();
                    next.push(c);
                    let (m, f) = match c {
                        Action::Move(_) => (moves + 1, flips),
                        Action::FlipBack => (moves, flips + 1),
                    };
                    return Some(smallest_completion(next, k, m, f));
                }
            }
        }
        None
    }
}

impl Iterator for IterationShapes {
    type Item = IterationShape;

    fn next(&mut self) -> Option<IterationShape> {
        if self.fresh {
            self.fresh = false;
        } else {
            let cur = self.current.take()?;
            self.current = self.advance(&cur);
        }
        self.current.clone().map(|actions| IterationShape { actions })
    }
}

/// Runs one action string from `start`. Returns the resulting triangulation
/// and the flips performed, or `None` if an action cannot be executed.
pub fn transform(t: &Triangulation, start: Edge, shape: &IterationShape) -> Option<(Triangulation, Vec<FlipRecord>)> {
    if !t.contains(start) {
        return None;
    }
    let mut t = t.clone();
    let mut walk = vec![start];
    let mut flips = Vec::new();
    for action in shape.actions() {
        let cur = *walk.last().expect("walk stack underflow");
        match *action {
            Action::Move(d) => {
                let next = *t.edge_neighbors(cur).ok()?.get(d as usize)?;
                walk.push(next);
            }
            Action::FlipBack => {
                let rec = t.flip_in_place(cur).ok()?;
                flips.push(rec);
                walk.pop();
                if let Some(&top) = walk.last() {
                    if !t.contains(top) {
                        return None;
                    }
                }
            }
        }
    }
    debug_assert!(walk.is_empty());
    Some((t, flips))
}

/// One iteration of an accepting run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub start: Edge,
    pub shape: IterationShape,
}

impl fmt::Display for IterationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "start={} k={} actions={}", self.start, self.shape.flips(), self.shape)
    }
}

/// An accepting run: the flips in execution order and per-iteration actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub flips: Vec<FlipRecord>,
    pub iterations: Vec<IterationTrace>,
}

impl Witness {
    pub fn composition(&self) -> Composition {
        Composition { parts: self.iterations.iter().map(|it| it.shape.flips()).collect() }
    }

    pub fn action_count(&self) -> usize {
        self.iterations.iter().map(|it| it.shape.actions().len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads; `1` runs the search on the calling thread.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { workers: 1 }
    }
}

/// Cooperative cancellation for a task-indexed parallel search.
struct Cancel<'a> {
    best: &'a AtomicUsize,
    index: usize,
}

struct Searcher<'a> {
    t: Triangulation,
    target: &'a Triangulation,
    k: usize,
    /// Number of edges of `t` missing from `target`.
    necessary: usize,
    olex: Vec<Edge>,
    cursor: usize,
    walk: Vec<Edge>,
    flips: Vec<FlipRecord>,
    actions: Vec<Action>,
    /// (start edge, offset into `actions`) per open iteration.
    iterations: Vec<(Edge, usize)>,
    cancel: Option<Cancel<'a>>,
    aborted: bool,
    nodes: u64,
    found: Option<Witness>,
}

enum OlexRestore {
    Cursor(usize),
    Rebuilt(Vec<Edge>, usize),
}

impl<'a> Searcher<'a> {
    fn new(start: &Triangulation, target: &'a Triangulation, k: usize) -> Self {
        let olex = start.necessary_edges(target).expect("point sets checked by caller");
        Searcher {
            t: start.clone(),
            target,
            k,
            necessary: olex.len(),
            olex,
            cursor: 0,
            walk: Vec::with_capacity(2 * k + 1),
            flips: Vec::with_capacity(k),
            actions: Vec::with_capacity(2 * k),
            iterations: Vec::new(),
            cancel: None,
            aborted: false,
            nodes: 0,
            found: None,
        }
    }

    fn should_abort(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(c) = &self.cancel {
                if c.best.load(Ordering::Relaxed) < c.index {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    /// Picks the next necessary edge from the lexicographic ordering,
    /// rebuilding the ordering from the current triangulation when it runs
    /// out.
    fn pick_start(&mut self) -> Option<(Edge, OlexRestore)> {
        let saved_cursor = self.cursor;
        while self.cursor < self.olex.len() {
            let e = self.olex[self.cursor];
            self.cursor += 1;
            if self.t.contains(e) && !self.target.contains(e) {
                return Some((e, OlexRestore::Cursor(saved_cursor)));
            }
        }
        let fresh = self.t.necessary_edges(self.target).expect("same point set");
        let first = *fresh.first()?;
        let old = std::mem::replace(&mut self.olex, fresh);
        self.cursor = 1;
        Some((first, OlexRestore::Rebuilt(old, saved_cursor)))
    }

    fn restore_olex(&mut self, r: OlexRestore) {
        match r {
            OlexRestore::Cursor(c) => self.cursor = c,
            OlexRestore::Rebuilt(old, c) => {
                self.olex = old;
                self.cursor = c;
            }
        }
    }

    fn accept(&mut self) -> bool {
        // Action budget: sum of (2 k_i - 1) <= 2k, and exactly k flips.
        assert!(self.actions.len() <= 2 * self.k, "action budget exceeded");
        assert_eq!(self.flips.len(), self.k, "flip budget mismatch");
        let mut iterations = Vec::with_capacity(self.iterations.len());
        for (i, &(start, off)) in self.iterations.iter().enumerate() {
            let end = self.iterations.get(i + 1).map_or(self.actions.len(), |&(_, o)| o);
            let shape = IterationShape::new(self.actions[off..end].to_vec()).expect("executed shapes are valid");
            iterations.push(IterationTrace { start, shape });
        }
        self.found = Some(Witness { flips: self.flips.clone(), iterations });
        true
    }

    /// Start of an iteration with `remaining` flips left overall.
    fn iteration(&mut self, remaining: usize) -> bool {
        if self.should_abort() {
            return false;
        }
        if remaining == 0 {
            return self.necessary == 0 && self.accept();
        }
        // Every necessary edge must be flipped at least once.
        if self.necessary == 0 || self.necessary > remaining {
            return false;
        }
        let Some((start, restore)) = self.pick_start() else {
            return false;
        };
        for k_i in 1..=remaining {
            if self.run_shape(start, k_i, remaining - k_i, None) {
                return true;
            }
        }
        self.restore_olex(restore);
        false
    }

    fn run_shape(&mut self, start: Edge, k_i: usize, rest: usize, first: Option<Action>) -> bool {
        self.iterations.push((start, self.actions.len()));
        self.walk.push(start);
        let ok = self.step(k_i, 0, 0, rest, first);
        if !ok {
            self.walk.pop();
            self.iterations.pop();
        }
        ok
    }

    /// Extends the current iteration after `moves` moves and `flips` flips.
    fn step(&mut self, k_i: usize, moves: usize, flips: usize, rest: usize, only: Option<Action>) -> bool {
        if self.should_abort() {
            return false;
        }
        let cur = *self.walk.last().expect("walk stack underflow");
        if moves + 1 < k_i {
            for d in 0..DIRECTIONS {
                if only.is_some_and(|a| a != Action::Move(d)) {
                    continue;
                }
                let Some(next) = self.t.edge_neighbor(cur, d as usize) else {
                    break;
                };
                self.walk.push(next);
                self.actions.push(Action::Move(d));
                if self.step(k_i, moves + 1, flips, rest, None) {
                    return true;
                }
                self.actions.pop();
                self.walk.pop();
            }
        }
        let last = moves + 1 == k_i && flips + 1 == k_i;
        if !(flips < moves || last) || only.is_some_and(|a| a != Action::FlipBack) {
            return false;
        }
        if !self.t.is_flippable(cur).unwrap_or(false) {
            return false;
        }
        let rec = self.t.flip_in_place(cur).expect("checked flippable");
        let before = self.necessary;
        self.necessary = self.necessary + usize::from(!self.target.contains(rec.resulting))
            - usize::from(!self.target.contains(rec.underlying));
        self.walk.pop();
        self.actions.push(Action::FlipBack);
        self.flips.push(rec);

        let left = (k_i - flips - 1) + rest;
        let ok = if self.necessary > left {
            false
        } else if last {
            debug_assert!(self.walk.is_empty());
            self.iteration(rest)
        } else {
            let top = *self.walk.last().expect("ballot property keeps the walk nonempty");
            self.t.contains(top) && self.step(k_i, moves, flips + 1, rest, None)
        };
        if ok {
            return true;
        }
        self.flips.pop();
        self.actions.pop();
        self.walk.push(cur);
        self.t.flip_in_place(rec.resulting).expect("undo flip");
        self.necessary = before;
        false
    }

    /// Root of the search: all of `k` remains and no iteration is open.
    fn root(&mut self) -> bool {
        self.iteration(self.k)
    }

    /// One top-level task: first iteration with `k_1` flips whose first
    /// action is `first`.
    fn root_task(&mut self, k1: usize, first: Action) -> bool {
        let Some((start, _)) = self.pick_start() else {
            return false;
        };
        self.run_shape(start, k1, self.k - k1, Some(first))
    }
}

fn top_level_tasks(k: usize) -> Vec<(usize, Action)> {
    let mut tasks = Vec::new();
    for k1 in 1..=k {
        if k1 == 1 {
            tasks.push((1, Action::FlipBack));
        } else {
            tasks.extend((0..DIRECTIONS).map(|d| (k1, Action::Move(d))));
        }
    }
    tasks
}

fn check_same(start: &Triangulation, end: &Triangulation) -> Result<(), TriangulationError> {
    if start.same_point_set(end) {
        Ok(())
    } else {
        Err(TriangulationError::PointSetMismatch)
    }
}

/// Searches for a run with exactly `k` flips and returns the first accepting
/// run in enumeration order.
pub fn find_sequence(
    start: &Triangulation,
    end: &Triangulation,
    k: usize,
    opts: SearchOptions,
) -> Result<Option<Witness>, TriangulationError> {
    check_same(start, end)?;
    let initial_necessary = start.necessary_edges(end)?.len();
    if k == 0 || opts.workers <= 1 || initial_necessary == 0 || initial_necessary > k {
        let mut s = Searcher::new(start, end, k);
        s.root();
        return Ok(s.found);
    }

    let tasks = top_level_tasks(k);
    let best = AtomicUsize::new(usize::MAX);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let results: Mutex<Vec<Option<Witness>>> = Mutex::new(vec![None; tasks.len()]);
    std::thread::scope(|scope| {
        for _ in 0..opts.workers.min(tasks.len()) {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() || best.load(Ordering::Relaxed) < i {
                    stop.store(true, Ordering::Relaxed);
                    break;
                }
                let (k1, first) = tasks[i];
                let mut s = Searcher::new(start, end, k);
                s.cancel = Some(Cancel { best: &best, index: i });
                if s.root_task(k1, first) {
                    best.fetch_min(i, Ordering::Relaxed);
                    results.lock().expect("poisoned")[i] = s.found;
                }
            });
        }
    });
    let best = best.into_inner();
    let mut results = results.into_inner().expect("poisoned");
    Ok(if best == usize::MAX { None } else { results[best].take() })
}

/// True iff the search accepts some run of exactly `k` flips from `start`
/// to `end`.
pub fn exists_sequence(start: &Triangulation, end: &Triangulation, k: usize) -> Result<bool, TriangulationError> {
    Ok(find_sequence(start, end, k, SearchOptions::default())?.is_some())
}

/// Smallest `k <= k_max` accepted by the search, with its witness.
pub fn solve_upto(
    start: &Triangulation,
    end: &Triangulation,
    k_max: usize,
    opts: SearchOptions,
) -> Result<Option<(usize, Witness)>, TriangulationError> {
    check_same(start, end)?;
    for k in 0..=k_max {
        if let Some(w) = find_sequence(start, end, k, opts)? {
            return Ok(Some((k, w)));
        }
    }
    Ok(None)
}

pub fn flip_distance_upto(start: &Triangulation, end: &Triangulation, k_max: usize) -> Result<Option<usize>, TriangulationError> {
    Ok(solve_upto(start, end, k_max, SearchOptions::default())?.map(|(k, _)| k))
}

/// True iff the flip distance is exactly `k`.
pub fn decide_equals(start: &Triangulation, end: &Triangulation, k: usize) -> Result<bool, TriangulationError> {
    Ok(flip_distance_upto(start, end, k)? == Some(k))
}
