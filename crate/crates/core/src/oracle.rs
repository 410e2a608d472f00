//! Brute-force reference implementations used to check the counter and the
//! candidate generator. Nothing here is meant to be fast.

use std::collections::HashMap;

use crate::alphabet::EventType;
use crate::counter::Expiry;
use crate::episode::{validate_partial_order, Episode, Relation};
use crate::error::{Error, Result};
use crate::stream::{EventSequence, Tick};

/// Largest episode the enumerator accepts.
pub const MAX_ENUM_NODES: usize = 6;
/// Enumeration stops with an error beyond this many occurrences.
pub const MAX_ENUM_OCCURRENCES: usize = 1_000_000;

/// One occurrence: the stream position mapped to each node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub by_node: Vec<usize>,
}

impl Occurrence {
    /// Positions in ascending order; occurrences are ordered by this vector.
    pub fn positions(&self) -> Vec<usize> {
        let mut v = self.by_node.clone();
        v.sort_unstable();
        v
    }

    pub fn start_tick(&self, stream: &EventSequence) -> Tick {
        self.by_node
            .iter()
            .map(|&i| stream.get(i).tick)
            .min()
            .unwrap_or(0)
    }

    pub fn end_tick(&self, stream: &EventSequence) -> Tick {
        self.by_node
            .iter()
            .map(|&i| stream.get(i).tick)
            .max()
            .unwrap_or(0)
    }
}

fn positions_by_type(stream: &EventSequence) -> HashMap<EventType, Vec<usize>> {
    let mut m: HashMap<EventType, Vec<usize>> = HashMap::new();
    for (i, e) in stream.events().iter().enumerate() {
        m.entry(e.event).or_default().push(i);
    }
    m
}

/// Whether `by_node` is an occurrence of `alpha` in `stream`: event types
/// match and every ordered pair is strictly increasing in time.
pub fn is_occurrence(alpha: &Episode, stream: &EventSequence, by_node: &[usize]) -> bool {
    by_node.len() == alpha.size()
        && by_node
            .iter()
            .enumerate()
            .all(|(i, &p)| p < stream.len() && stream.get(p).event == alpha.event(i))
        && (0..alpha.size()).all(|i| {
            (0..alpha.size()).all(|j| {
                !alpha.precedes(i, j) || stream.get(by_node[i]).tick < stream.get(by_node[j]).tick
            })
        })
}

/// Every occurrence with span within `expiry`, sorted by position vector.
pub fn enumerate_occurrences(
    alpha: &Episode,
    stream: &EventSequence,
    expiry: Expiry,
) -> Result<Vec<Occurrence>> {
    if alpha.size() > MAX_ENUM_NODES {
        return Err(Error::TooLarge(format!(
            "occurrence enumeration supports at most {MAX_ENUM_NODES} nodes"
        )));
    }
    let by_type = positions_by_type(stream);
    let empty = Vec::new();
    let cands: Vec<&Vec<usize>> = alpha
        .events()
        .iter()
        .map(|e| by_type.get(e).unwrap_or(&empty))
        .collect();
    let order = alpha.topological_order();
    let mut out = Vec::new();
    let mut assign = vec![usize::MAX; alpha.size()];
    dfs(
        alpha,
        stream,
        expiry,
        &order,
        &cands,
        0,
        None,
        &mut assign,
        &mut out,
    )?;
    out.sort_by_cached_key(Occurrence::positions);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    alpha: &Episode,
    stream: &EventSequence,
    expiry: Expiry,
    order: &[usize],
    cands: &[&Vec<usize>],
    depth: usize,
    range: Option<(Tick, Tick)>,
    assign: &mut [usize],
    out: &mut Vec<Occurrence>,
) -> Result<()> {
    if depth == order.len() {
        if out.len() >= MAX_ENUM_OCCURRENCES {
            return Err(Error::TooLarge(format!(
                "more than {MAX_ENUM_OCCURRENCES} occurrences"
            )));
        }
        out.push(Occurrence {
            by_node: assign.to_vec(),
        });
        return Ok(());
    }
    let v = order[depth];
    let after = crate::episode::bits(alpha.parents(v))
        .map(|p| stream.get(assign[p]).tick)
        .max();
    for &pos in cands[v] {
        let t = stream.get(pos).tick;
        if after.is_some_and(|a| t <= a) {
            continue;
        }
        let (lo, hi) = match range {
            Some((lo, hi)) => (lo.min(t), hi.max(t)),
            None => (t, t),
        };
        if !expiry.allows(hi - lo) {
            continue;
        }
        assign[v] = pos;
        dfs(
            alpha,
            stream,
            expiry,
            order,
            cands,
            depth + 1,
            Some((lo, hi)),
            assign,
            out,
        )?;
    }
    assign[v] = usize::MAX;
    Ok(())
}

/// Greedy maximum over an explicit occurrence list. Occurrences are closed
/// tick intervals; two are non-overlapped when one ends strictly before the
/// other starts. Taking the earliest-ending compatible interval each time is
/// optimal: any optimal schedule can swap its first interval for the
/// greedy's without conflict, and induction finishes the argument.
pub fn greedy_over(occs: &[Occurrence], stream: &EventSequence) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..occs.len()).collect();
    idx.sort_by_key(|&i| (occs[i].end_tick(stream), occs[i].start_tick(stream)));
    let mut chosen = Vec::new();
    let mut last_end: Option<Tick> = None;
    for i in idx {
        let s = occs[i].start_tick(stream);
        if last_end.is_none_or(|e| s > e) {
            last_end = Some(occs[i].end_tick(stream));
            chosen.push(i);
        }
    }
    chosen
}

/// Maximum non-overlapped count computed from the full occurrence list.
pub fn max_nonoverlapped_enumerated(
    alpha: &Episode,
    stream: &EventSequence,
    expiry: Expiry,
) -> Result<u64> {
    let occs = enumerate_occurrences(alpha, stream, expiry)?;
    Ok(greedy_over(&occs, stream).len() as u64)
}

/// Exhaustive search for the largest pairwise non-overlapped subset.
/// Exponential; refuses more than 16 occurrences.
pub fn max_nonoverlapped_exhaustive(occs: &[Occurrence], stream: &EventSequence) -> Result<u64> {
    if occs.len() > 16 {
        return Err(Error::TooLarge(
            "exhaustive search over >16 occurrences".into(),
        ));
    }
    let spans: Vec<(Tick, Tick)> = occs
        .iter()
        .map(|o| (o.start_tick(stream), o.end_tick(stream)))
        .collect();
    let disjoint = |a: (Tick, Tick), b: (Tick, Tick)| a.1 < b.0 || b.1 < a.0;
    let mut best = 0u32;
    for mask in 0u32..(1 << occs.len()) {
        if mask.count_ones() <= best {
            continue;
        }
        let set: Vec<usize> = crate::episode::bits(mask as u64).collect();
        let ok = set
            .iter()
            .enumerate()
            .all(|(k, &a)| set[k + 1..].iter().all(|&b| disjoint(spans[a], spans[b])));
        if ok {
            best = mask.count_ones();
        }
    }
    Ok(best as u64)
}

/// Earliest possible completion tick of an occurrence that uses only
/// events with tick ≥ `from`. Nodes are placed in topological order, each
/// at the first event of its type strictly after all its parents; because
/// node types are distinct, placing every node as early as possible never
/// hurts a later node.
fn earliest_end(
    alpha: &Episode,
    stream: &EventSequence,
    by_type: &[&[usize]],
    order: &[usize],
    from: Tick,
) -> Option<Tick> {
    let mut tick = vec![0 as Tick; alpha.size()];
    let mut end = 0;
    for &v in order {
        let after = crate::episode::bits(alpha.parents(v))
            .map(|p| tick[p])
            .max();
        let positions = by_type[v];
        let k = positions.partition_point(|&p| {
            let t = stream.get(p).tick;
            t < from || after.is_some_and(|a| t <= a)
        });
        let &p = positions.get(k)?;
        tick[v] = stream.get(p).tick;
        end = end.max(tick[v]);
    }
    Some(end)
}

/// Maximum number of non-overlapped occurrences with span within `expiry`.
///
/// Greedy by completion time, without materialising occurrences: after the
/// last chosen occurrence ended at `e`, the next one is the occurrence with
/// start > `e` that ends first. For each admissible start tick `s` the
/// earliest completion from `s` is found by [`earliest_end`]; an occurrence
/// that starts at `s0` and fits the expiry shows `earliest_end(s0)` does too,
/// so minimising over start ticks gives the greedy's choice.
pub fn max_nonoverlapped(alpha: &Episode, stream: &EventSequence, expiry: Expiry) -> u64 {
    let map = positions_by_type(stream);
    let empty = Vec::new();
    let by_type: Vec<&[usize]> = alpha
        .events()
        .iter()
        .map(|e| map.get(e).unwrap_or(&empty).as_slice())
        .collect();
    if by_type.iter().any(|v| v.is_empty()) {
        return 0;
    }
    let order = alpha.topological_order();
    let mut starts: Vec<Tick> = stream.events().iter().map(|e| e.tick).collect();
    starts.dedup();

    let mut count = 0;
    let mut lo: Tick = 0;
    let mut k = 0;
    loop {
        while k < starts.len() && starts[k] < lo {
            k += 1;
        }
        let mut best: Option<Tick> = None;
        for &s in &starts[k..] {
            if best.is_some_and(|b| s > b) {
                break;
            }
            if let Some(e) = earliest_end(alpha, stream, &by_type, &order, s) {
                if expiry.allows(e - s) && best.is_none_or(|b| e < b) {
                    best = Some(e);
                }
            }
        }
        match best {
            Some(e) => {
                count += 1;
                lo = e + 1;
            }
            None => return count,
        }
    }
}

/// Every labeled strict partial order on `k ≤ 4` elements.
pub fn enumerate_posets(k: usize) -> Result<Vec<Relation>> {
    if k > 4 {
        return Err(Error::TooLarge("poset enumeration supports k ≤ 4".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let mut r = Relation::new(k);
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << b) != 0 {
                r.set(i, j);
            }
        }
        if validate_partial_order(&r).is_ok() {
            out.push(r);
        }
    }
    Ok(out)
}

/// Every canonical episode of size `k` over the given event types.
pub fn enumerate_all_episodes(symbols: &[EventType], k: usize) -> Result<Vec<Episode>> {
    if symbols.len() > 5 {
        return Err(Error::TooLarge(
            "episode enumeration supports ≤ 5 symbols".into(),
        ));
    }
    let mut syms = symbols.to_vec();
    syms.sort();
    syms.dedup();
    let posets = enumerate_posets(k)?;
    let mut out = Vec::new();
    for mask in 0u64..(1 << syms.len()) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let events: Vec<EventType> = crate::episode::bits(mask).map(|i| syms[i]).collect();
        for r in &posets {
            out.push(Episode::new(&events, r)?);
        }
    }
    out.sort();
    Ok(out)
}
