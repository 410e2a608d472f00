//! Bidirectional evidence: how evenly the unordered node pairs of an episode
//! showed up in both orders among its counted occurrences.

use crate::counter::CountResult;
use crate::episode::Episode;
use crate::error::{Error, Result};

/// Binary entropy (base 2) of the split `cnt_ij : cnt_ji`. An empty split
/// scores 1 so that pairs without evidence never suppress an episode.
pub fn pair_evidence(cnt_ij: u64, cnt_ji: u64) -> f64 {
    let m = cnt_ij + cnt_ji;
    if m == 0 || cnt_ij == cnt_ji {
        return 1.0;
    }
    if cnt_ij == 0 || cnt_ji == 0 {
        return 0.0;
    }
    let p = cnt_ij as f64 / m as f64;
    let q = cnt_ji as f64 / m as f64;
    -(p * p.log2() + q * q.log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEvidence {
    pub i: usize,
    pub j: usize,
    /// Share of the pair's strictly ordered occurrences with `i` first.
    pub p_ij: f64,
    pub h_ij: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceReport {
    pub h: f64,
    /// Pair attaining the minimum; absent when every pair is ordered.
    pub argmin: Option<(usize, usize)>,
    pub pairs: Vec<PairEvidence>,
}

/// Minimum pair evidence over node pairs the episode leaves unordered; 1
/// when there are none.
pub fn bidirectional_evidence(alpha: &Episode, result: &CountResult) -> Result<EvidenceReport> {
    if result.size() != alpha.size() {
        return Err(Error::SizeMismatch {
            index: 0,
            expected: alpha.size(),
            found: result.size(),
        });
    }
    let mut pairs = Vec::new();
    for i in 0..alpha.size() {
        for j in (i + 1)..alpha.size() {
            if alpha.precedes(i, j) || alpha.precedes(j, i) {
                continue;
            }
            let (a, b) = (result.fij(i, j), result.fij(j, i));
            let p_ij = if a + b == 0 {
                0.5
            } else {
                a as f64 / (a + b) as f64
            };
            pairs.push(PairEvidence {
                i,
                j,
                p_ij,
                h_ij: pair_evidence(a, b),
            });
        }
    }
    let best = pairs.iter().min_by(|x, y| x.h_ij.total_cmp(&y.h_ij));
    Ok(EvidenceReport {
        h: best.map_or(1.0, |p| p.h_ij),
        argmin: best.map(|p| (p.i, p.j)),
        pairs,
    })
}

/// Shorthand for the `h` of [`bidirectional_evidence`].
pub fn episode_evidence(alpha: &Episode, result: &CountResult) -> f64 {
    bidirectional_evidence(alpha, result).map_or(1.0, |r| r.h)
}
