//! Levelwise candidate generation.
//!
//! Frequent `l`-node episodes are grouped into blocks that share the same
//! `(l-1)`-node prefix (the episode with its last node dropped). Two
//! episodes of one block with different last event types join into up to
//! three `(l+1)`-node candidates: the plain union of their orders (`Y0`),
//! the union plus `x1 < x2` (`Y1`), and the union plus `x2 < x1` (`Y2`),
//! where `x1`, `x2` are the two last nodes. Only unions that are already
//! transitively closed are kept, and a candidate survives only if all its
//! maximal subepisodes were frequent.

use std::collections::HashMap;
use std::fmt;

use crate::alphabet::EventType;
use crate::episode::{bit, full_mask, validate_partial_order, Episode, Relation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ModeKind {
    #[default]
    General,
    /// Only totally ordered episodes.
    Serial,
    /// Only episodes with an empty order.
    Parallel,
}

impl std::str::FromStr for ModeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(ModeKind::General),
            "serial" => Ok(ModeKind::Serial),
            "parallel" => Ok(ModeKind::Parallel),
            _ => Err(Error::InvalidConfig(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeKind::General => "general",
            ModeKind::Serial => "serial",
            ModeKind::Parallel => "parallel",
        })
    }
}

/// Structural class of the episodes to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GenerationMode {
    pub kind: ModeKind,
    /// Upper bound on the longest path (in edges) of the Hasse diagram.
    pub lmax_bound: Option<usize>,
    /// Upper bound on the number of maximal paths of the Hasse diagram.
    pub nmax_bound: Option<u64>,
}

impl GenerationMode {
    pub fn general() -> Self {
        Self::default()
    }

    pub fn serial() -> Self {
        GenerationMode {
            kind: ModeKind::Serial,
            ..Self::default()
        }
    }

    pub fn parallel() -> Self {
        GenerationMode {
            kind: ModeKind::Parallel,
            ..Self::default()
        }
    }

    pub fn allows_join(&self, kind: JoinKind) -> bool {
        match self.kind {
            ModeKind::General => true,
            ModeKind::Serial => kind != JoinKind::Y0,
            ModeKind::Parallel => kind == JoinKind::Y0,
        }
    }

    pub fn within_bounds(&self, e: &Episode) -> bool {
        if self.lmax_bound.is_none() && self.nmax_bound.is_none() {
            return true;
        }
        let m = e.structural_metrics();
        self.lmax_bound.is_none_or(|b| m.lmax <= b) && self.nmax_bound.is_none_or(|b| m.nmax <= b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JoinKind {
    /// Union of the two orders.
    Y0,
    /// Union plus `x1 < x2`.
    Y1,
    /// Union plus `x2 < x1`.
    Y2,
}

/// How a shared prefix node `z` relates to the two last nodes `x1`, `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeType {
    /// `x1 < z < x2`
    T1,
    /// `x2 < z < x1`
    T1p,
    /// `x1 < z`, unrelated to `x2`
    T2,
    /// `z < x1`, unrelated to `x2`
    T2p,
    /// `x2 < z`, unrelated to `x1`
    T3,
    /// `z < x2`, unrelated to `x1`
    T3p,
    /// below both
    T4,
    /// above both
    T4p,
    /// unrelated to both
    T4pp,
}

/// Checks that `a1` and `a2` can be joined: same size, same prefix
/// events and prefix order, and `a1`'s last event type before `a2`'s.
pub fn check_combinable(a1: &Episode, a2: &Episode) -> Result<()> {
    let l = a1.size();
    if a2.size() != l {
        return Err(Error::NotCombinable("episodes differ in size"));
    }
    if a1.events()[..l - 1] != a2.events()[..l - 1] {
        return Err(Error::NotCombinable("prefix event types differ"));
    }
    if a1.last_event() >= a2.last_event() {
        return Err(Error::NotCombinable(
            "last event type of the first episode must precede the second's",
        ));
    }
    let pm = full_mask(l - 1);
    if (0..l - 1).any(|i| a1.children(i) & pm != a2.children(i) & pm) {
        return Err(Error::NotCombinable("prefix orders differ"));
    }
    Ok(())
}

/// Joined event types and the union relation (`Y0`), unchecked.
pub fn simple_join(a1: &Episode, a2: &Episode) -> Result<(Vec<EventType>, Relation)> {
    check_combinable(a1, a2)?;
    let (events, rows) = join_rows(a1, a2);
    Ok((events, Relation::from_rows(rows)))
}

fn join_rows(a1: &Episode, a2: &Episode) -> (Vec<EventType>, Vec<u64>) {
    let l = a1.size();
    let (x1, x2) = (l - 1, l);
    let pm = full_mask(l - 1);
    let mut rows = Vec::with_capacity(l + 1);
    for i in 0..l - 1 {
        let mut r = a1.children(i) & (pm | bit(x1));
        if a2.children(i) & bit(x1) != 0 {
            r |= bit(x2);
        }
        rows.push(r);
    }
    rows.push(a1.children(x1) & pm);
    rows.push(a2.children(x1) & pm);
    let mut events = a1.events().to_vec();
    events.push(a2.last_event());
    (events, rows)
}

/// Classifies prefix node `z` of a combinable pair.
pub fn classify_node(a1: &Episode, a2: &Episode, z: usize) -> NodeType {
    let x = a1.size() - 1;
    let x1_z = a1.precedes(x, z);
    let z_x1 = a1.precedes(z, x);
    let x2_z = a2.precedes(x, z);
    let z_x2 = a2.precedes(z, x);
    match ((x1_z, z_x1), (x2_z, z_x2)) {
        ((true, _), (_, true)) => NodeType::T1,
        ((_, true), (true, _)) => NodeType::T1p,
        ((true, _), (true, _)) => NodeType::T4p,
        ((_, true), (_, true)) => NodeType::T4,
        ((true, _), _) => NodeType::T2,
        ((_, true), _) => NodeType::T2p,
        (_, (true, _)) => NodeType::T3,
        (_, (_, true)) => NodeType::T3p,
        _ => NodeType::T4pp,
    }
}

/// Which of `Y0`, `Y1`, `Y2` are strict partial orders, decided from the
/// node types of the shared prefix alone.
pub fn potential_kinds(a1: &Episode, a2: &Episode) -> Result<Vec<JoinKind>> {
    check_combinable(a1, a2)?;
    let (mut y1_blocked, mut y2_blocked) = (false, false);
    for z in 0..a1.size() - 1 {
        match classify_node(a1, a2, z) {
            NodeType::T1 => return Ok(vec![JoinKind::Y1]),
            NodeType::T1p => return Ok(vec![JoinKind::Y2]),
            NodeType::T2p | NodeType::T3 => y1_blocked = true,
            NodeType::T2 | NodeType::T3p => y2_blocked = true,
            NodeType::T4 | NodeType::T4p | NodeType::T4pp => {}
        }
    }
    let mut out = vec![JoinKind::Y0];
    if !y1_blocked {
        out.push(JoinKind::Y1);
    }
    if !y2_blocked {
        out.push(JoinKind::Y2);
    }
    Ok(out)
}

fn build(events: &[EventType], rows: &[u64], kind: JoinKind) -> (Vec<EventType>, Vec<u64>) {
    let l = events.len() - 1;
    let mut rows = rows.to_vec();
    match kind {
        JoinKind::Y0 => {}
        JoinKind::Y1 => rows[l - 1] |= bit(l),
        JoinKind::Y2 => rows[l] |= bit(l - 1),
    }
    (events.to_vec(), rows)
}

/// The potential candidates of a combinable pair, via [`potential_kinds`].
pub fn get_potential_candidates(a1: &Episode, a2: &Episode) -> Result<Vec<(JoinKind, Episode)>> {
    let kinds = potential_kinds(a1, a2)?;
    let (events, rows) = join_rows(a1, a2);
    Ok(kinds
        .into_iter()
        .map(|k| {
            let (e, r) = build(&events, &rows, k);
            (k, Episode::from_closed(e, r))
        })
        .collect())
}

/// Reference version of [`get_potential_candidates`]: builds all three
/// unions and keeps those that pass full validation.
pub fn naive_potential_candidates(a1: &Episode, a2: &Episode) -> Result<Vec<(JoinKind, Episode)>> {
    check_combinable(a1, a2)?;
    let (events, rows) = join_rows(a1, a2);
    Ok([JoinKind::Y0, JoinKind::Y1, JoinKind::Y2]
        .into_iter()
        .filter_map(|k| {
            let (e, r) = build(&events, &rows, k);
            let rel = Relation::from_rows(r.clone());
            validate_partial_order(&rel)
                .ok()
                .map(|_| (k, Episode::from_closed(e, r)))
        })
        .collect())
}

/// Prefix identity used to group episodes into blocks.
type PrefixKey = (Vec<EventType>, Vec<u64>);

fn prefix_key(e: &Episode) -> PrefixKey {
    let l = e.size();
    let pm = full_mask(l - 1);
    (
        e.events()[..l - 1].to_vec(),
        (0..l - 1).map(|i| e.children(i) & pm).collect(),
    )
}

/// One level's episodes in block order, with per-episode counts once known.
#[derive(Debug, Clone, Default)]
pub struct CandidateBook {
    episodes: Vec<Episode>,
    /// Index of the first episode of each episode's block.
    blockstart: Vec<usize>,
    pub freq: Vec<u64>,
    pub h: Vec<f64>,
    index: HashMap<PrefixKey, (usize, usize)>,
}

impl CandidateBook {
    /// Builds a book from episodes in block order: consecutive episodes
    /// with the same prefix form one block and must already be sorted.
    pub fn from_blocks(episodes: Vec<Episode>, blockstart: Vec<usize>) -> Result<Self> {
        let mut book = CandidateBook {
            freq: vec![0; episodes.len()],
            h: vec![1.0; episodes.len()],
            episodes,
            blockstart,
            index: HashMap::new(),
        };
        book.validate()?;
        book.build_index();
        Ok(book)
    }

    /// Groups arbitrary episodes of one size into sorted blocks.
    pub fn from_episodes(mut episodes: Vec<Episode>) -> Result<Self> {
        if let Some(first) = episodes.first() {
            let l = first.size();
            if let Some(index) = episodes.iter().position(|e| e.size() != l) {
                return Err(Error::SizeMismatch {
                    index,
                    expected: l,
                    found: episodes[index].size(),
                });
            }
        }
        episodes.sort_by(|a, b| prefix_key(a).cmp(&prefix_key(b)).then_with(|| a.cmp(b)));
        episodes.dedup();
        let mut blockstart = Vec::with_capacity(episodes.len());
        for i in 0..episodes.len() {
            if i > 0 && prefix_key(&episodes[i]) == prefix_key(&episodes[i - 1]) {
                blockstart.push(blockstart[i - 1]);
            } else {
                blockstart.push(i);
            }
        }
        Self::from_blocks(episodes, blockstart)
    }

    /// Level one: every given event type as a singleton, one block.
    pub fn singletons(types: &[EventType]) -> Self {
        let mut types = types.to_vec();
        types.sort();
        types.dedup();
        let episodes: Vec<Episode> = types.into_iter().map(Episode::singleton).collect();
        let n = episodes.len();
        Self::from_blocks(episodes, vec![0; n]).expect("singletons form one block")
    }

    fn build_index(&mut self) {
        self.index.clear();
        let mut i = 0;
        while i < self.episodes.len() {
            let end = self.block_end(i);
            self.index.insert(prefix_key(&self.episodes[i]), (i, end));
            i = end;
        }
    }

    fn block_end(&self, start: usize) -> usize {
        let mut end = start + 1;
        while end < self.episodes.len() && self.blockstart[end] == start {
            end += 1;
        }
        end
    }

    /// Checks the block structure; the error carries the first bad index.
    pub fn validate(&self) -> Result<()> {
        if self.blockstart.len() != self.episodes.len() {
            return Err(Error::MalformedBlocks(
                self.blockstart.len().min(self.episodes.len()),
            ));
        }
        let l = self.episodes.first().map_or(0, Episode::size);
        let mut seen = std::collections::HashSet::new();
        for i in 0..self.episodes.len() {
            let e = &self.episodes[i];
            let bs = self.blockstart[i];
            if e.size() != l || bs > i {
                return Err(Error::MalformedBlocks(i));
            }
            let starts_block = i == 0 || prefix_key(e) != prefix_key(&self.episodes[i - 1]);
            if starts_block {
                if bs != i || !seen.insert(prefix_key(e)) {
                    return Err(Error::MalformedBlocks(i));
                }
            } else if bs != self.blockstart[i - 1] || self.episodes[i - 1] >= *e {
                return Err(Error::MalformedBlocks(i));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn episodes(&self) -> &[Episode] {
        &self.episodes
    }

    pub fn blockstart(&self) -> &[usize] {
        &self.blockstart
    }

    /// Episode size, or 0 for an empty book.
    pub fn level(&self) -> usize {
        self.episodes.first().map_or(0, Episode::size)
    }

    /// Index of `e` in the book: hash to its block, then binary search.
    pub fn position(&self, e: &Episode) -> Option<usize> {
        let &(start, end) = self.index.get(&prefix_key(e))?;
        self.episodes[start..end]
            .binary_search(e)
            .ok()
            .map(|k| start + k)
    }

    pub fn contains(&self, e: &Episode) -> bool {
        self.position(e).is_some()
    }

    /// Sub-book of the episodes with `keep[i]`; block order is preserved.
    pub fn retain(&self, keep: &[bool]) -> CandidateBook {
        let mut episodes = Vec::new();
        let mut blockstart = Vec::new();
        let mut freq = Vec::new();
        let mut h = Vec::new();
        let mut last_block = usize::MAX;
        for i in (0..self.len()).filter(|&i| keep[i]) {
            if self.blockstart[i] != last_block {
                last_block = self.blockstart[i];
                blockstart.push(episodes.len());
            } else {
                blockstart.push(*blockstart.last().unwrap());
            }
            episodes.push(self.episodes[i].clone());
            freq.push(self.freq[i]);
            h.push(self.h[i]);
        }
        let mut book = CandidateBook {
            episodes,
            blockstart,
            freq,
            h,
            index: HashMap::new(),
        };
        book.build_index();
        book
    }

    /// Candidates of the next level.
    pub fn generate(&self, mode: &GenerationMode) -> Result<CandidateBook> {
        generate_candidates(self, mode)
    }
}

/// Joins every in-block pair, keeps the transitively closed unions that
/// fit `mode`, and drops candidates with an infrequent maximal subepisode.
/// Candidates generated from the same first parent form one output block.
pub fn generate_candidates(freq: &CandidateBook, mode: &GenerationMode) -> Result<CandidateBook> {
    freq.validate()?;
    let l = freq.level();
    let mut episodes = Vec::new();
    let mut blockstart = Vec::new();
    let mut block: Vec<Episode> = Vec::new();
    let mut i = 0;
    while i < freq.len() {
        let end = freq.block_end(i);
        for a in i..end {
            block.clear();
            let a1 = &freq.episodes[a];
            for a2 in &freq.episodes[a + 1..end] {
                if a1.last_event() == a2.last_event() {
                    continue;
                }
                let kinds = potential_kinds(a1, a2)?;
                let (events, rows) = join_rows(a1, a2);
                for k in kinds.into_iter().filter(|&k| mode.allows_join(k)) {
                    let (e, r) = build(&events, &rows, k);
                    let cand = Episode::from_closed(e, r);
                    if !mode.within_bounds(&cand) {
                        continue;
                    }
                    // Dropping node l or l-1 gives back a2 or a1.
                    if (0..l - 1).all(|r| freq.contains(&cand.drop_node(r))) {
                        block.push(cand);
                    }
                }
            }
            block.sort();
            let start = episodes.len();
            for cand in block.drain(..) {
                blockstart.push(start);
                episodes.push(cand);
            }
        }
        i = end;
    }
    let mut book = CandidateBook {
        freq: vec![0; episodes.len()],
        h: vec![1.0; episodes.len()],
        episodes,
        blockstart,
        index: HashMap::new(),
    };
    book.build_index();
    debug_assert!(book.validate().is_ok());
    Ok(book)
}
