//! The occurrence-tracking automaton of an injective episode.
//!
//! A state is the set `q` of accepted nodes and the set `w` of nodes the
//! automaton is ready to accept next. For any downward-closed `q`, `w` is
//! exactly the least elements of the remaining nodes, so states are never
//! materialized ahead of time.

use crate::alphabet::EventType;
use crate::episode::{bit, bits, Episode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AutomatonState {
    pub q: u64,
    pub w: u64,
}

impl AutomatonState {
    pub fn is_start(&self) -> bool {
        self.q == 0
    }
}

pub fn initial_state(alpha: &Episode) -> AutomatonState {
    AutomatonState {
        q: 0,
        w: alpha.minimal_nodes(),
    }
}

pub fn is_final(alpha: &Episode, s: AutomatonState) -> bool {
    s.q == alpha.full_mask()
}

/// Least elements of the nodes outside `q`, assuming `q` is downward closed.
pub fn wait_set_of(alpha: &Episode, q: u64) -> u64 {
    bits(alpha.full_mask() & !q)
        .filter(|&j| alpha.parents(j) & !q == 0)
        .fold(0, |m, j| m | bit(j))
}

/// Accepts the nodes in `accept ∩ w` in one step. Newly enabled nodes are
/// only waited on afterwards, so a same-tick batch never chains.
pub fn accept_nodes(alpha: &Episode, s: AutomatonState, accept: u64) -> AutomatonState {
    let taken = accept & s.w;
    if taken == 0 {
        return s;
    }
    let q = s.q | taken;
    let mut w = s.w & !taken;
    for i in bits(taken) {
        for c in bits(alpha.children(i)) {
            if alpha.parents(c) & !q == 0 {
                w |= bit(c);
            }
        }
    }
    AutomatonState { q, w }
}

/// Single-symbol transition. Symbols outside the episode, or not waited
/// on, leave the state unchanged.
pub fn transition(alpha: &Episode, s: AutomatonState, e: EventType) -> AutomatonState {
    match alpha.position(e) {
        Some(i) => accept_nodes(alpha, s, bit(i)),
        None => s,
    }
}

/// Downward closed under the order.
pub fn is_valid_accepted_set(alpha: &Episode, q: u64) -> bool {
    q & !alpha.full_mask() == 0 && bits(q).all(|i| alpha.parents(i) & !q == 0)
}

/// An antichain.
pub fn is_valid_wait_set(alpha: &Episode, w: u64) -> bool {
    w & !alpha.full_mask() == 0 && bits(w).all(|i| alpha.parents(i) & w == 0)
}

/// Recovers the accepted set from a non-empty valid wait set: everything
/// not waited on and not above a waited node. `None` for invalid or empty
/// `w` (an empty wait set belongs only to the final state, but then `q` is
/// simply full; callers that need it can ask [`is_final`]).
pub fn accepted_from_wait(alpha: &Episode, w: u64) -> Option<u64> {
    if w == 0 || !is_valid_wait_set(alpha, w) {
        return None;
    }
    Some(
        bits(alpha.full_mask() & !w)
            .filter(|&i| alpha.parents(i) & w == 0)
            .fold(0, |m, i| m | bit(i)),
    )
}
