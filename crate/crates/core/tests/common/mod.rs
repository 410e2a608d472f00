//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use posetmine::episode::Relation;
use posetmine::stream::Tick;
use posetmine::{Alphabet, Episode, EventSequence, EventType};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn letters(n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| ((b'A' + i as u8) as char).to_string())).unwrap()
}

/// ⟨(A,2),(B,3),(A,3),(A,7),(C,8),(B,9),(D,11),(C,12),(A,13),(B,14),(C,15)⟩
pub fn sequence_one() -> (Alphabet, EventSequence) {
    let a = letters(4);
    let s = EventSequence::from_symbols(
        &[
            ("A", 2),
            ("B", 3),
            ("A", 3),
            ("A", 7),
            ("C", 8),
            ("B", 9),
            ("D", 11),
            ("C", 12),
            ("A", 13),
            ("B", 14),
            ("C", 15),
        ],
        &a,
    )
    .unwrap();
    (a, s)
}

/// ⟨(A,1),(B,2),(A,3),(D,4),(E,5),(C,6),(D,7),(A,8),(B,9),(B,10),(C,12),(D,14)⟩
pub fn sequence_three() -> (Alphabet, EventSequence) {
    let a = letters(5);
    let s = EventSequence::from_symbols(
        &[
            ("A", 1),
            ("B", 2),
            ("A", 3),
            ("D", 4),
            ("E", 5),
            ("C", 6),
            ("D", 7),
            ("A", 8),
            ("B", 9),
            ("B", 10),
            ("C", 12),
            ("D", 14),
        ],
        &a,
    )
    .unwrap();
    (a, s)
}

/// A → (B C) → (D E) → F
pub const ALPHA1: &str = "A B C D E F | A<B A<C B<D B<E C<D C<E D<F E<F";
/// G → ((H → (J K)) (I → L))
pub const ALPHA2: &str = "G H I J K L | G<H G<I H<J H<K I<L";

/// Random episode over `k` distinct types drawn from `types`.
pub fn random_episode<R: Rng>(rng: &mut R, types: &[EventType], k: usize, edge_p: f64) -> Episode {
    let mut pool = types.to_vec();
    pool.shuffle(rng);
    let events = &pool[..k];
    // Edges only go forward in a random permutation, so the result is acyclic.
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(rng);
    let mut r = Relation::new(k);
    for a in 0..k {
        for b in (a + 1)..k {
            if rng.random_bool(edge_p) {
                r.set(perm[a], perm[b]);
            }
        }
    }
    Episode::with_closure(events, &r).unwrap()
}

/// Random stream of `len` events over `n_types` types; each step advances
/// the tick with probability `1 - tie_p`.
pub fn random_stream<R: Rng>(rng: &mut R, n_types: usize, len: usize, tie_p: f64) -> EventSequence {
    let mut t: Tick = 1;
    let mut ev = Vec::with_capacity(len);
    for i in 0..len {
        if i > 0 && !rng.random_bool(tie_p) {
            t += rng.random_range(1..=3);
        }
        ev.push((EventType::new(rng.random_range(0..n_types) as u32), t));
    }
    EventSequence::new(ev, n_types).unwrap()
}

use posetmine::automaton::{
    accepted_from_wait, initial_state, is_final, is_valid_accepted_set, is_valid_wait_set,
    transition, wait_set_of, AutomatonState,
};
use std::collections::{BTreeSet, HashSet, VecDeque};

/// Checks the automaton's state-space properties for one episode by BFS
/// over all reachable states; returns a description of each failure.
pub fn fsa_violations(alpha: &Episode) -> Vec<String> {
    let mut bad = Vec::new();
    let n = alpha.size();
    let full = alpha.full_mask();
    let start = initial_state(alpha);
    let mut seen: HashSet<AutomatonState> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for &e in alpha.events() {
            let t = transition(alpha, s, e);
            if transition(alpha, s, e) != t {
                bad.push("transition is not deterministic".into());
            }
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    let qs: BTreeSet<u64> = seen.iter().map(|s| s.q).collect();
    let ws: BTreeSet<u64> = seen.iter().map(|s| s.w).collect();
    if qs.len() != seen.len() || ws.len() != seen.len() {
        bad.push("two reachable states share q or w".into());
    }
    for s in &seen {
        if s.w != wait_set_of(alpha, s.q) {
            bad.push(format!(
                "w is not the least elements of the rest for q={:#b}",
                s.q
            ));
        }
        if s.q & s.w != 0 {
            bad.push("q and w overlap".into());
        }
        if (s.w == 0) != (s.q == full) || (s.q == full) != is_final(alpha, *s) {
            bad.push("empty wait set does not coincide with the final state".into());
        }
        if s.w != 0 && accepted_from_wait(alpha, s.w) != Some(s.q) {
            bad.push(format!("q not recoverable from w={:#b}", s.w));
        }
    }
    for m in 0..=full {
        if is_valid_accepted_set(alpha, m) != qs.contains(&m) {
            bad.push(format!(
                "accepted-set predicate disagrees with reachability at {m:#b}"
            ));
        }
        if is_valid_wait_set(alpha, m) != ws.contains(&m) {
            bad.push(format!(
                "wait-set predicate disagrees with reachability at {m:#b}"
            ));
        }
    }
    // Any valid q_i ⊊ q_j is connected by |q_j \ q_i| least-element steps.
    let by_q: std::collections::HashMap<u64, AutomatonState> =
        seen.iter().map(|s| (s.q, *s)).collect();
    for &qi in &qs {
        for &qj in &qs {
            if qi & !qj != 0 || qi == qj {
                continue;
            }
            let mut s = by_q[&qi];
            let mut steps = 0;
            while s.q != qj {
                let Some(node) = (0..n).find(|&k| (s.w & !s.q & qj) >> k & 1 == 1) else {
                    bad.push("no least element available on the way up".into());
                    break;
                };
                s = transition(alpha, s, alpha.event(node));
                steps += 1;
            }
            if s.q == qj && steps != (qj & !qi).count_ones() {
                bad.push("path length differs from the set difference".into());
            }
        }
    }
    // Every linear extension drives the start state to the final state.
    let mut ext = Vec::new();
    linear_extensions(alpha, 0, &mut ext, &mut |order| {
        let mut s = start;
        for &k in order {
            s = transition(alpha, s, alpha.event(k));
        }
        if !is_final(alpha, s) {
            bad.push("a serial extension does not reach the final state".into());
        }
    });
    bad
}

/// Calls `f` with each linear extension (as node lists) of the order.
pub fn linear_extensions(
    alpha: &Episode,
    done: u64,
    prefix: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if prefix.len() == alpha.size() {
        f(prefix);
        return;
    }
    for k in 0..alpha.size() {
        if done >> k & 1 == 0 && alpha.parents(k) & !done == 0 {
            prefix.push(k);
            linear_extensions(alpha, done | 1 << k, prefix, f);
            prefix.pop();
        }
    }
}

use posetmine::candidates::{CandidateBook, GenerationMode};
use posetmine::oracle::{enumerate_all_episodes, max_nonoverlapped};
use posetmine::{count_frequencies, mine, Expiry, MiningConfig};

fn expiry_of(k: u8) -> Expiry {
    match k {
        0 => Expiry::Ticks(2),
        1 => Expiry::Ticks(5),
        _ => Expiry::Unlimited,
    }
}

/// A random counting instance: 3–6 types, four episodes of 2–5 nodes, a
/// 20–60 event stream with tied ticks, and one of three expiries.
pub fn counting_instance(seed: u64) -> (Vec<Episode>, EventSequence, Expiry) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n_types = rng.random_range(3..=6);
    let a = letters(n_types);
    let types: Vec<_> = a.event_types().collect();
    let k = rng.random_range(2..=n_types.min(5));
    let eps = (0..4)
        .map(|_| {
            let edge_p = rng.random_range(0.0..0.8);
            random_episode(&mut rng, &types, k, edge_p)
        })
        .collect();
    let len = rng.random_range(20..=60);
    let stream = random_stream(&mut rng, n_types, len, 0.3);
    (eps, stream, expiry_of(rng.random_range(0..3)))
}

/// Runs the levelwise loop by hand up to `max_k` nodes and compares each
/// level with brute force: candidates must be distinct, and the frequent
/// set must equal the oracle's over every episode of that size. Returns
/// the frequent count per level.
pub fn levelwise_matches_oracle(
    stream: &EventSequence,
    symbols: &[EventType],
    f_th: u64,
    expiry: Expiry,
    max_k: usize,
) -> Result<Vec<usize>, String> {
    let mut book = CandidateBook::singletons(&stream.observed_types());
    let mut mined_by_level = Vec::new();
    for k in 1..=max_k {
        let eps = book.episodes();
        let distinct: HashSet<&Episode> = eps.iter().collect();
        if distinct.len() != eps.len() {
            return Err(format!("level {k}: duplicate candidates"));
        }
        let res = count_frequencies(eps, stream, expiry).map_err(|e| e.to_string())?;
        let keep: Vec<bool> = res.iter().map(|r| r.freq > f_th).collect();
        let mined: BTreeSet<Episode> = eps
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(e, _)| e.clone())
            .collect();
        let truth: BTreeSet<Episode> = enumerate_all_episodes(symbols, k)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|e| max_nonoverlapped(e, stream, expiry) > f_th)
            .collect();
        if mined != truth {
            return Err(format!(
                "level {k}: mined {} frequent, oracle {} ({} missing, {} spurious)",
                mined.len(),
                truth.len(),
                truth.difference(&mined).count(),
                mined.difference(&truth).count()
            ));
        }
        mined_by_level.push(mined);
        book = book
            .retain(&keep)
            .generate(&GenerationMode::general())
            .map_err(|e| e.to_string())?;
    }
    // The driver must report the same sets.
    let cfg = MiningConfig {
        f_th,
        expiry,
        max_level: max_k,
        ..MiningConfig::default()
    };
    let reports = mine(stream, &cfg).map_err(|e| e.to_string())?;
    for (k, want) in mined_by_level.iter().enumerate() {
        let got: BTreeSet<Episode> = reports
            .get(k)
            .map(|r| r.survivors.iter().map(|x| x.episode.clone()).collect())
            .unwrap_or_default();
        if &got != want {
            return Err(format!("level {}: driver disagrees with the loop", k + 1));
        }
    }
    Ok(mined_by_level.iter().map(BTreeSet::len).collect())
}

use posetmine::synth::{extend_alphabet, generate_stream, GenConfig};
use posetmine::text::parse_episode;

/// Builds an alphabet of `m` symbols around the patterns' own, then
/// generates a stream embedding them.
pub fn embedded_stream(
    patterns: &[&str],
    m: usize,
    eta: f64,
    p: f64,
    rho: f64,
    horizon: Tick,
    seed: u64,
) -> (EventSequence, Vec<Episode>, Alphabet) {
    let mut symbols: Vec<&str> = patterns
        .iter()
        .flat_map(|p| p.split('|').next().unwrap().split_whitespace())
        .collect();
    symbols.sort();
    symbols.dedup();
    let alphabet = extend_alphabet(&symbols, m).unwrap();
    let pats: Vec<Episode> = patterns
        .iter()
        .map(|p| parse_episode(p, &alphabet).unwrap())
        .collect();
    let cfg = GenConfig {
        alphabet: alphabet.clone(),
        patterns: pats.clone(),
        eta,
        p,
        rho,
        horizon,
        seed,
    };
    (generate_stream(&cfg).unwrap(), pats, alphabet)
}

/// α1 and α2 over 60 types, 10 000 ticks.
pub fn two_pattern_stream(seed: u64) -> (EventSequence, Vec<Episode>, Alphabet) {
    embedded_stream(&[ALPHA1, ALPHA2], 60, 0.7, 0.068, 0.055, 10_000, seed)
}
