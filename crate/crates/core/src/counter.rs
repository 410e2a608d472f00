//! Single-pass non-overlapped frequency counting with an expiry constraint.
//!
//! Every candidate owns a small set of live automata. An automaton is stored
//! in a slab slot; `waits[E]` lists the `(slot, node)` pairs currently
//! waiting for event type `E`. Entries carry the slot generation so that
//! killing an automaton is O(1): its stale entries are dropped the next time
//! their list is scanned (or by an occasional sweep).
//!
//! Events that share a tick are processed as one batch: each automaton
//! accepts every waited-for type in the batch at once, and nodes enabled by
//! those acceptances only become active at the next tick. A stream with
//! distinct ticks is just a sequence of one-event batches.

use crate::alphabet::EventType;
use crate::automaton::{initial_state, AutomatonState};
use crate::episode::{bit, bits, Episode};
use crate::error::{Error, Result};
use crate::stream::{Event, EventSequence, Tick};

/// Maximum allowed span (last tick minus first tick) of a counted
/// occurrence. The bound is inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Expiry {
    #[default]
    Unlimited,
    Ticks(Tick),
}

impl Expiry {
    pub fn allows(self, span: Tick) -> bool {
        match self {
            Expiry::Unlimited => true,
            Expiry::Ticks(t) => span <= t,
        }
    }
}

impl From<Option<Tick>> for Expiry {
    fn from(t: Option<Tick>) -> Self {
        t.map_or(Expiry::Unlimited, Expiry::Ticks)
    }
}

/// Frequency of one candidate plus, for every ordered node pair `(i, j)`,
/// how many counted occurrences had node `i` strictly before node `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub freq: u64,
    size: usize,
    fij: Vec<u64>,
}

impl CountResult {
    pub fn new(size: usize) -> Self {
        CountResult {
            freq: 0,
            size,
            fij: vec![0; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn fij(&self, i: usize, j: usize) -> u64 {
        self.fij[i * self.size + j]
    }

    /// Adds one occurrence given the tick at which each node was accepted.
    pub fn record(&mut self, ticks: &[Tick]) {
        debug_assert_eq!(ticks.len(), self.size);
        self.freq += 1;
        for (i, &ti) in ticks.iter().enumerate() {
            for (j, &tj) in ticks.iter().enumerate() {
                if ti < tj {
                    self.fij[i * self.size + j] += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountStats {
    /// Largest number of simultaneously live non-start automata seen for
    /// any single candidate.
    pub max_live: usize,
    /// Batches after which some candidate had more than `l` non-start
    /// automata or non-nested accepted sets. Should always be zero.
    pub invariant_violations: u64,
    pub batches: u64,
}

impl CountStats {
    fn merge(&mut self, other: &CountStats) {
        self.max_live = self.max_live.max(other.max_live);
        self.invariant_violations += other.invariant_violations;
        self.batches = self.batches.max(other.batches);
    }
}

#[derive(Debug, Clone)]
struct Slot {
    ep: u32,
    gen: u32,
    alive: bool,
    state: AutomatonState,
    t_init: Tick,
}

#[derive(Debug, Clone, Copy)]
struct WaitEntry {
    slot: u32,
    gen: u32,
    node: u8,
}

/// Incremental counter; feed it tick batches in stream order.
#[derive(Debug)]
pub struct FrequencyCounter<'a> {
    episodes: &'a [Episode],
    l: usize,
    expiry: Expiry,
    slots: Vec<Slot>,
    /// Stream position and tick at which each node of each slot was
    /// accepted, `l` entries per slot.
    accepted_at: Vec<u32>,
    accepted_tick: Vec<Tick>,
    free: Vec<u32>,
    live: Vec<Vec<u32>>,
    waits: Vec<Vec<WaitEntry>>,
    wait_entries: usize,
    results: Vec<CountResult>,
    occurrences: Option<Vec<Vec<Vec<usize>>>>,
    stats: CountStats,
    // scratch
    type_stamp: Vec<u64>,
    ep_stamp: Vec<u64>,
    touched: Vec<u32>,
    pending: Vec<(EventType, WaitEntry)>,
    batch_types: Vec<(EventType, u32)>,
}

impl<'a> FrequencyCounter<'a> {
    /// All candidates must have the same number of nodes. `n_types` bounds
    /// the event-type ids that will be fed.
    pub fn new(episodes: &'a [Episode], n_types: usize, expiry: Expiry) -> Result<Self> {
        let l = episodes.first().map_or(0, Episode::size);
        for (index, e) in episodes.iter().enumerate() {
            if e.size() != l {
                return Err(Error::SizeMismatch {
                    index,
                    expected: l,
                    found: e.size(),
                });
            }
        }
        let n_types = episodes
            .iter()
            .map(|e| e.last_event().index() + 1)
            .max()
            .unwrap_or(0)
            .max(n_types);
        let mut c = FrequencyCounter {
            episodes,
            l,
            expiry,
            slots: Vec::with_capacity(episodes.len() * 2),
            accepted_at: Vec::with_capacity(episodes.len() * 2 * l),
            accepted_tick: Vec::with_capacity(episodes.len() * 2 * l),
            free: Vec::new(),
            live: vec![Vec::new(); episodes.len()],
            waits: vec![Vec::new(); n_types],
            wait_entries: 0,
            results: episodes
                .iter()
                .map(|e| CountResult::new(e.size()))
                .collect(),
            occurrences: None,
            stats: CountStats::default(),
            type_stamp: vec![0; n_types],
            ep_stamp: vec![0; episodes.len()],
            touched: Vec::new(),
            pending: Vec::new(),
            batch_types: Vec::new(),
        };
        for ep in 0..episodes.len() {
            c.spawn(ep as u32);
        }
        Ok(c)
    }

    /// Keep the stream positions of every counted occurrence.
    pub fn record_occurrences(&mut self) {
        self.occurrences = Some(vec![Vec::new(); self.episodes.len()]);
    }

    fn spawn(&mut self, ep: u32) {
        let alpha = &self.episodes[ep as usize];
        let state = initial_state(alpha);
        let slot = match self.free.pop() {
            Some(s) => {
                let sl = &mut self.slots[s as usize];
                sl.ep = ep;
                sl.alive = true;
                sl.state = state;
                sl.t_init = 0;
                s
            }
            None => {
                self.slots.push(Slot {
                    ep,
                    gen: 0,
                    alive: true,
                    state,
                    t_init: 0,
                });
                self.accepted_at.extend(std::iter::repeat_n(0, self.l));
                self.accepted_tick.extend(std::iter::repeat_n(0, self.l));
                (self.slots.len() - 1) as u32
            }
        };
        let gen = self.slots[slot as usize].gen;
        for node in bits(state.w) {
            self.waits[alpha.event(node).index()].push(WaitEntry {
                slot,
                gen,
                node: node as u8,
            });
            self.wait_entries += 1;
        }
        self.live[ep as usize].push(slot);
    }

    fn kill(&mut self, slot: u32) {
        let s = &mut self.slots[slot as usize];
        s.alive = false;
        s.gen = s.gen.wrapping_add(1);
        self.free.push(slot);
    }

    fn entry_valid(&self, e: &WaitEntry) -> bool {
        let s = &self.slots[e.slot as usize];
        s.alive && s.gen == e.gen
    }

    /// Processes all events sharing one tick. `first_index` is the stream
    /// position of `batch[0]`.
    pub fn process_batch(&mut self, first_index: usize, batch: &[Event]) {
        let Some(first) = batch.first() else { return };
        let t = first.tick;
        self.stats.batches += 1;
        let stamp = self.stats.batches;

        self.batch_types.clear();
        for (k, ev) in batch.iter().enumerate() {
            debug_assert_eq!(ev.tick, t);
            let ty = ev.event.index();
            if ty < self.type_stamp.len() && self.type_stamp[ty] != stamp {
                self.type_stamp[ty] = stamp;
                self.batch_types.push((ev.event, (first_index + k) as u32));
            }
        }

        self.touched.clear();
        for bi in 0..self.batch_types.len() {
            let (ty, pos) = self.batch_types[bi];
            let list = std::mem::take(&mut self.waits[ty.index()]);
            self.wait_entries -= list.len();
            for entry in &list {
                if !self.entry_valid(entry) {
                    continue;
                }
                self.accept(entry, t, pos, stamp);
            }
            // Hand the allocation back for reuse.
            let mut list = list;
            list.clear();
            let slot_list = &mut self.waits[ty.index()];
            if slot_list.is_empty() {
                *slot_list = list;
            }
        }

        for ti in 0..self.touched.len() {
            let ep = self.touched[ti];
            self.settle(ep, t);
        }

        for (ty, entry) in std::mem::take(&mut self.pending) {
            if self.entry_valid(&entry) {
                self.waits[ty.index()].push(entry);
                self.wait_entries += 1;
            }
        }

        if self.wait_entries > 64 + 8 * self.live_slot_count() {
            self.sweep();
        }
    }

    fn accept(&mut self, entry: &WaitEntry, t: Tick, pos: u32, stamp: u64) {
        let l = self.l;
        let slot = &mut self.slots[entry.slot as usize];
        let alpha = &self.episodes[slot.ep as usize];
        let node = entry.node as usize;
        debug_assert!(slot.state.w & bit(node) != 0);
        if slot.state.q == 0 {
            slot.t_init = t;
        }
        slot.state.q |= bit(node);
        slot.state.w &= !bit(node);
        for c in bits(alpha.children(node)) {
            if alpha.parents(c) & !slot.state.q == 0 {
                slot.state.w |= bit(c);
                self.pending.push((
                    alpha.event(c),
                    WaitEntry {
                        slot: entry.slot,
                        gen: entry.gen,
                        node: c as u8,
                    },
                ));
            }
        }
        self.accepted_at[entry.slot as usize * l + node] = pos;
        self.accepted_tick[entry.slot as usize * l + node] = t;
        let ep = slot.ep as usize;
        if self.ep_stamp[ep] != stamp {
            self.ep_stamp[ep] = stamp;
            self.touched.push(ep as u32);
        }
    }

    /// Post-batch bookkeeping for one candidate whose automata moved:
    /// collision pruning, completion, and start-state respawn.
    fn settle(&mut self, ep: u32, t: Tick) {
        let epu = ep as usize;
        let full = self.episodes[epu].full_mask();
        let mut live = std::mem::take(&mut self.live[epu]);

        // Same state reached by two automata: keep the most recent start.
        let mut k = 0;
        while k < live.len() {
            let sk = &self.slots[live[k] as usize];
            let dup = (0..live.len()).find(|&m| {
                m != k && {
                    let sm = &self.slots[live[m] as usize];
                    sm.state.q == sk.state.q && sm.t_init > sk.t_init
                }
            });
            if dup.is_some() {
                let dead = live.swap_remove(k);
                self.kill(dead);
            } else {
                k += 1;
            }
        }

        if let Some(k) = live
            .iter()
            .position(|&s| self.slots[s as usize].state.q == full)
        {
            let slot = live[k];
            let span = t - self.slots[slot as usize].t_init;
            if self.expiry.allows(span) {
                self.complete(epu, slot);
                for s in live.drain(..) {
                    self.kill(s);
                }
            } else {
                live.swap_remove(k);
                self.kill(slot);
            }
        }

        let live_nonstart = live
            .iter()
            .filter(|&&s| self.slots[s as usize].state.q != 0)
            .count();
        self.stats.max_live = self.stats.max_live.max(live_nonstart);
        if live_nonstart > self.l || !self.nested(&live) {
            self.stats.invariant_violations += 1;
        }

        let has_start = live.iter().any(|&s| self.slots[s as usize].state.q == 0);
        self.live[epu] = live;
        if !has_start {
            self.spawn(ep);
        }
    }

    /// Non-start automata must have strictly nested accepted sets.
    fn nested(&self, live: &[u32]) -> bool {
        let q = |s: u32| self.slots[s as usize].state.q;
        live.iter().enumerate().all(|(i, &a)| {
            live[i + 1..].iter().all(|&b| {
                let (qa, qb) = (q(a), q(b));
                qa == 0 || qb == 0 || (qa != qb && (qa & !qb == 0 || qb & !qa == 0))
            })
        })
    }

    fn complete(&mut self, ep: usize, slot: u32) {
        let base = slot as usize * self.l;
        if let Some(occ) = &mut self.occurrences {
            let positions = &self.accepted_at[base..base + self.l];
            occ[ep].push(positions.iter().map(|&p| p as usize).collect());
        }
        self.results[ep].record(&self.accepted_tick[base..base + self.l]);
    }

    fn live_slot_count(&self) -> usize {
        self.slots.len() - self.free.len()
    }

    fn sweep(&mut self) {
        let slots = &self.slots;
        let mut total = 0;
        for list in &mut self.waits {
            list.retain(|e| {
                let s = &slots[e.slot as usize];
                s.alive && s.gen == e.gen
            });
            total += list.len();
        }
        self.wait_entries = total;
    }
}

impl FrequencyCounter<'_> {
    /// Feeds a whole stream, batch by batch.
    pub fn process_stream(&mut self, stream: &EventSequence) {
        let mut index = 0;
        for batch in stream.batches() {
            self.process_batch(index, batch);
            index += batch.len();
        }
    }

    pub fn stats(&self) -> CountStats {
        self.stats
    }

    /// Stream positions (one per node) of each counted occurrence, if
    /// recording was enabled.
    pub fn occurrences(&self) -> Option<&[Vec<Vec<usize>>]> {
        self.occurrences.as_deref()
    }

    pub fn results(&self) -> &[CountResult] {
        &self.results
    }

    pub fn into_results(self) -> (Vec<CountResult>, CountStats) {
        (self.results, self.stats)
    }
}

/// Counts every candidate over `stream`. All candidates must share a size.
pub fn count_frequencies(
    candidates: &[Episode],
    stream: &EventSequence,
    expiry: Expiry,
) -> Result<Vec<CountResult>> {
    Ok(count_with_stats(candidates, stream, expiry)?.0)
}

pub fn count_with_stats(
    candidates: &[Episode],
    stream: &EventSequence,
    expiry: Expiry,
) -> Result<(Vec<CountResult>, CountStats)> {
    let mut c = FrequencyCounter::new(candidates, stream.n_types(), expiry)?;
    c.process_stream(stream);
    Ok(c.into_results())
}

/// Like [`count_with_stats`] but splits the candidates into `workers`
/// contiguous chunks, each scanned on its own thread with private state.
pub fn count_partitioned(
    candidates: &[Episode],
    stream: &EventSequence,
    expiry: Expiry,
    workers: usize,
) -> Result<(Vec<CountResult>, CountStats)> {
    let workers = workers.max(1);
    if workers == 1 || candidates.len() < 2 * workers {
        return count_with_stats(candidates, stream, expiry);
    }
    if let Some(first) = candidates.first() {
        if let Some(index) = candidates.iter().position(|e| e.size() != first.size()) {
            return Err(Error::SizeMismatch {
                index,
                expected: first.size(),
                found: candidates[index].size(),
            });
        }
    }
    let chunk = candidates.len().div_ceil(workers);
    let parts: Vec<Result<(Vec<CountResult>, CountStats)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = candidates
            .chunks(chunk)
            .map(|part| scope.spawn(move || count_with_stats(part, stream, expiry)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("counting worker panicked"))
            .collect()
    });
    let mut results = Vec::with_capacity(candidates.len());
    let mut stats = CountStats::default();
    for part in parts {
        let (r, s) = part?;
        results.extend(r);
        stats.merge(&s);
    }
    Ok((results, stats))
}
