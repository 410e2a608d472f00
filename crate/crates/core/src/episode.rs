//! Injective episodes as canonical partially ordered sets of event types.
//!
//! An [`Episode`] stores its event types sorted by alphabet order and the
//! strict partial order between them as a transitively closed adjacency
//! matrix. Rows and columns are `u64` bit masks, which caps episodes at
//! [`MAX_NODES`] nodes.

use std::cmp::Ordering;
use std::fmt;

use crate::alphabet::{Alphabet, EventType};
use crate::error::{Error, Result};

pub const MAX_NODES: usize = 64;

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

#[inline]
pub(crate) fn full_mask(size: usize) -> u64 {
    if size >= 64 {
        u64::MAX
    } else {
        bit(size) - 1
    }
}

/// Iterate the indices of set bits in ascending order.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// A raw square boolean relation. Nothing about it is validated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    size: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn new(size: usize) -> Self {
        assert!(size <= MAX_NODES, "relation larger than {MAX_NODES} nodes");
        Relation {
            size,
            rows: vec![0; size],
        }
    }

    pub fn from_edges(size: usize, edges: &[(usize, usize)]) -> Self {
        let mut r = Relation::new(size);
        for &(i, j) in edges {
            r.set(i, j);
        }
        r
    }

    pub(crate) fn from_rows(rows: Vec<u64>) -> Self {
        Relation {
            size: rows.len(),
            rows,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] & bit(j) != 0
    }

    pub fn set(&mut self, i: usize, j: usize) {
        assert!(i < self.size && j < self.size);
        self.rows[i] |= bit(j);
    }

    pub fn unset(&mut self, i: usize, j: usize) {
        self.rows[i] &= !bit(j);
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &row)| bits(row).map(move |j| (i, j)))
    }

    /// Transitive closure (Warshall over bit rows).
    pub fn closure(&self) -> Relation {
        let mut rows = self.rows.clone();
        for k in 0..self.size {
            let via = rows[k];
            for row in rows.iter_mut() {
                if *row & bit(k) != 0 {
                    *row |= via;
                }
            }
        }
        Relation::from_rows(rows)
    }
}

/// The first defect found by [`validate_partial_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// `(node, node)` is in the relation.
    Reflexive { node: usize },
    /// Both `(a, b)` and `(b, a)` are in the relation.
    Antisymmetric { a: usize, b: usize },
    /// `(a, b)` and `(b, c)` are present but `(a, c)` is missing.
    Intransitive { a: usize, b: usize, c: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Reflexive { node } => write!(f, "node {node} precedes itself"),
            Violation::Antisymmetric { a, b } => {
                write!(f, "nodes {a} and {b} precede each other")
            }
            Violation::Intransitive { a, b, c } => write!(
                f,
                "{a} precedes {b} and {b} precedes {c} but {a} does not precede {c}"
            ),
        }
    }
}

/// Checks irreflexivity, antisymmetry and transitivity, in that order.
pub fn validate_partial_order(r: &Relation) -> std::result::Result<(), Violation> {
    let n = r.size();
    for i in 0..n {
        if r.get(i, i) {
            return Err(Violation::Reflexive { node: i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if r.get(i, j) && r.get(j, i) {
                return Err(Violation::Antisymmetric { a: i, b: j });
            }
        }
    }
    for a in 0..n {
        for b in bits(r.row(a)) {
            let missing = r.row(b) & !r.row(a);
            if missing != 0 {
                let c = missing.trailing_zeros() as usize;
                return Err(Violation::Intransitive { a, b, c });
            }
        }
    }
    Ok(())
}

/// Longest maximal path (in edges) and number of maximal paths of the
/// transitive reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralMetrics {
    pub lmax: usize,
    pub nmax: u64,
}

/// A canonical injective episode.
///
/// `events` is strictly increasing; `succ[i]` has bit `j` set iff node `i`
/// precedes node `j`. `pred` is the transpose, kept for O(1) parent reads.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Episode {
    events: Vec<EventType>,
    succ: Vec<u64>,
    pred: Vec<u64>,
}

impl Episode {
    /// Builds a canonical episode from distinct event types and a strict
    /// partial order over them (indexed like `events`).
    pub fn new(events: &[EventType], order: &Relation) -> Result<Episode> {
        if events.is_empty() {
            return Err(Error::EmptyEpisode);
        }
        if events.len() > MAX_NODES {
            return Err(Error::TooManyNodes(events.len()));
        }
        if order.size() != events.len() {
            return Err(Error::ShapeMismatch {
                events: events.len(),
                relation: order.size(),
            });
        }
        let mut perm: Vec<usize> = (0..events.len()).collect();
        perm.sort_by_key(|&i| events[i]);
        if let Some(w) = perm.windows(2).find(|w| events[w[0]] == events[w[1]]) {
            return Err(Error::DuplicateEventType(events[w[0]].to_string()));
        }
        validate_partial_order(order).map_err(Error::InvalidOrder)?;
        // perm[new] = old
        let mut succ = vec![0u64; events.len()];
        for (ni, &oi) in perm.iter().enumerate() {
            for (nj, &oj) in perm.iter().enumerate() {
                if order.get(oi, oj) {
                    succ[ni] |= bit(nj);
                }
            }
        }
        let sorted = perm.iter().map(|&i| events[i]).collect();
        Ok(Episode::from_closed(sorted, succ))
    }

    /// Like [`Episode::new`] but closes the relation first.
    pub fn with_closure(events: &[EventType], edges: &Relation) -> Result<Episode> {
        Episode::new(events, &edges.closure())
    }

    /// Trusted constructor: `events` sorted and distinct, `succ` a closed
    /// strict partial order.
    pub(crate) fn from_closed(events: Vec<EventType>, succ: Vec<u64>) -> Episode {
        let n = events.len();
        let mut pred = vec![0u64; n];
        for (i, &row) in succ.iter().enumerate() {
            for j in bits(row) {
                pred[j] |= bit(i);
            }
        }
        debug_assert!(events.windows(2).all(|w| w[0] < w[1]));
        Episode { events, succ, pred }
    }

    pub fn singleton(e: EventType) -> Episode {
        Episode::from_closed(vec![e], vec![0])
    }

    /// Parallel episode (empty order) over the given event types.
    pub fn parallel(events: &[EventType]) -> Result<Episode> {
        Episode::new(events, &Relation::new(events.len()))
    }

    /// Serial episode: `events[0]` before `events[1]` before ...
    pub fn serial(events: &[EventType]) -> Result<Episode> {
        let mut r = Relation::new(events.len());
        for i in 0..events.len() {
            for j in (i + 1)..events.len() {
                r.set(i, j);
            }
        }
        Episode::new(events, &r)
    }

    pub fn size(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self) -> &[EventType] {
        &self.events
    }

    pub fn event(&self, i: usize) -> EventType {
        self.events[i]
    }

    pub fn last_event(&self) -> EventType {
        *self.events.last().expect("episodes are non-empty")
    }

    /// Node index holding event type `e`, if any.
    pub fn position(&self, e: EventType) -> Option<usize> {
        self.events.binary_search(&e).ok()
    }

    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.succ[i] & bit(j) != 0
    }

    /// Bit mask of nodes that precede node `j`.
    pub fn parents(&self, j: usize) -> u64 {
        self.pred[j]
    }

    /// Bit mask of nodes that node `i` precedes.
    pub fn children(&self, i: usize) -> u64 {
        self.succ[i]
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.size())
    }

    /// Nodes with no predecessor.
    pub fn minimal_nodes(&self) -> u64 {
        self.pred
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == 0)
            .fold(0, |m, (i, _)| m | bit(i))
    }

    pub fn relation(&self) -> Relation {
        Relation::from_rows(self.succ.clone())
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_parallel(&self) -> bool {
        self.succ.iter().all(|&r| r == 0)
    }

    /// Total order: every pair of nodes is related.
    pub fn is_serial(&self) -> bool {
        let n = self.size();
        self.edge_count() == n * (n - 1) / 2
    }

    /// Restriction of the order to all nodes except `i`.
    pub fn drop_node(&self, i: usize) -> Episode {
        assert!(self.size() >= 2, "cannot drop the only node");
        self.restrict(self.full_mask() & !bit(i))
    }

    /// Restriction of the order to the nodes in `keep` (non-empty).
    pub fn restrict(&self, keep: u64) -> Episode {
        let idx: Vec<usize> = bits(keep & self.full_mask()).collect();
        assert!(!idx.is_empty());
        let events = idx.iter().map(|&i| self.events[i]).collect();
        let succ = idx
            .iter()
            .map(|&i| {
                idx.iter()
                    .enumerate()
                    .filter(|(_, &j)| self.precedes(i, j))
                    .fold(0u64, |m, (nj, _)| m | bit(nj))
            })
            .collect();
        Episode::from_closed(events, succ)
    }

    /// The `l` subepisodes obtained by dropping one node, in node order.
    pub fn maximal_subepisodes(&self) -> Vec<Episode> {
        (0..self.size()).map(|i| self.drop_node(i)).collect()
    }

    /// Whether `self` is a subepisode of `other`: its event types are a
    /// subset and its order is contained in the other's.
    pub fn is_subepisode_of(&self, other: &Episode) -> bool {
        let mut map = Vec::with_capacity(self.size());
        for &e in &self.events {
            match other.position(e) {
                Some(p) => map.push(p),
                None => return false,
            }
        }
        (0..self.size()).all(|i| bits(self.succ[i]).all(|j| other.precedes(map[i], map[j])))
    }

    /// Hasse diagram of the order: the unique minimal relation with the same
    /// closure.
    pub fn transitive_reduction(&self) -> Relation {
        let rows = (0..self.size())
            .map(|i| {
                bits(self.succ[i])
                    .filter(|&j| self.succ[i] & self.pred[j] == 0)
                    .fold(0u64, |m, j| m | bit(j))
            })
            .collect();
        Relation::from_rows(rows)
    }

    /// Path metrics over the transitive reduction.
    pub fn structural_metrics(&self) -> StructuralMetrics {
        let red = self.transitive_reduction();
        let order = self.topological_order();
        let n = self.size();
        // longest path (edges) and path count from each node down to a sink
        let mut height = vec![0usize; n];
        let mut paths = vec![0u64; n];
        for &v in order.iter().rev() {
            let row = red.row(v);
            if row == 0 {
                paths[v] = 1;
            } else {
                height[v] = bits(row).map(|c| height[c] + 1).max().unwrap_or(0);
                paths[v] = bits(row).map(|c| paths[c]).fold(0u64, u64::saturating_add);
            }
        }
        let sources = self.minimal_nodes();
        StructuralMetrics {
            lmax: bits(sources).map(|s| height[s]).max().unwrap_or(0),
            nmax: bits(sources)
                .map(|s| paths[s])
                .fold(0u64, u64::saturating_add),
        }
    }

    /// A linear extension of the order, smallest available index first.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut done = 0u64;
        let mut out = Vec::with_capacity(self.size());
        while out.len() < self.size() {
            let next = (0..self.size())
                .find(|&i| done & bit(i) == 0 && self.pred[i] & !done == 0)
                .expect("acyclic");
            done |= bit(next);
            out.push(next);
        }
        out
    }

    /// Row-major bit sequence comparison used to break ties between
    /// episodes with the same event types. A 0 sorts before a 1.
    fn cmp_order_bits(&self, other: &Episode) -> Ordering {
        for (a, b) in self.succ.iter().zip(&other.succ) {
            let diff = a ^ b;
            if diff != 0 {
                let first = bit(diff.trailing_zeros() as usize);
                return if a & first == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        crate::text::EpisodeDisplay {
            episode: self,
            alphabet,
        }
    }
}

impl Ord for Episode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.events
            .cmp(&other.events)
            .then_with(|| self.cmp_order_bits(other))
    }
}

impl PartialOrd for Episode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free-function form of [`Episode::is_subepisode_of`].
pub fn is_subepisode(beta: &Episode, alpha: &Episode) -> bool {
    beta.is_subepisode_of(alpha)
}
