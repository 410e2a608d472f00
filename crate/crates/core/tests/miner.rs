mod common;

use common::*;
use posetmine::candidates::{GenerationMode, ModeKind};
use posetmine::miner::{mine_with_stats, write_report};
use posetmine::{count_frequencies, mine, EventSequence, EvidenceMode, Expiry, MiningConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn small_stream(seed: u64) -> EventSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_stream(&mut rng, 4, 40, 0.2)
}

#[test]
fn levelwise_is_complete_and_unique_against_oracle() {
    let types: Vec<_> = letters(4).event_types().collect();
    for seed in 0..6 {
        let s = small_stream(seed);
        for x in [Expiry::Unlimited, Expiry::Ticks(6)] {
            levelwise_matches_oracle(&s, &types, 0, x, 4).unwrap();
            levelwise_matches_oracle(&s, &types, 1, x, 4).unwrap();
        }
    }
}

#[test]
fn reported_frequencies_recount_exactly() {
    let s = small_stream(11);
    let cfg = MiningConfig {
        f_th: 1,
        expiry: Expiry::Ticks(8),
        max_level: 4,
        ..MiningConfig::default()
    };
    let (reports, stats) = mine_with_stats(&s, &cfg).unwrap();
    assert_eq!(stats.invariant_violations, 0);
    for r in &reports {
        assert!(r.survivors.iter().all(|x| x.episode.size() == r.level));
        let eps: Vec<_> = r.survivors.iter().map(|x| x.episode.clone()).collect();
        let recount = count_frequencies(&eps, &s, cfg.expiry).unwrap();
        for (x, c) in r.survivors.iter().zip(&recount) {
            assert_eq!(x.freq, c.freq);
            assert!(x.freq > cfg.f_th);
        }
    }
}

#[test]
fn reported_episodes_are_downward_closed() {
    let s = small_stream(12);
    let cfg = MiningConfig {
        f_th: 1,
        expiry: Expiry::Ticks(8),
        max_level: 4,
        ..MiningConfig::default()
    };
    let reports = mine(&s, &cfg).unwrap();
    for w in reports.windows(2) {
        let below: HashSet<_> = w[0].survivors.iter().map(|x| &x.episode).collect();
        for x in &w[1].survivors {
            for sub in x.episode.maximal_subepisodes() {
                assert!(below.contains(&sub));
            }
        }
    }
}

#[test]
fn levelwise_evidence_recovers_embedded_patterns() {
    let (s, pats, _) = two_pattern_stream(1);
    let base = MiningConfig {
        f_th: 350,
        h_th: Some(0.4),
        expiry: Expiry::Ticks(15),
        max_level: 6,
        ..MiningConfig::default()
    };
    let lw = mine(
        &s,
        &MiningConfig {
            h_mode: EvidenceMode::Levelwise,
            ..base.clone()
        },
    )
    .unwrap();
    let top = lw.last().unwrap();
    assert_eq!(top.level, 6);
    for p in &pats {
        assert!(top.survivors.iter().any(|x| &x.episode == p));
    }
    assert!(top.frequent() <= 12);

    // Postfilter sees every frequent episode but reports only those with
    // enough evidence, so it reports at least as much as levelwise.
    let pf = mine(
        &s,
        &MiningConfig {
            h_mode: EvidenceMode::Postfilter,
            ..base
        },
    )
    .unwrap();
    assert_eq!(pf.len(), 6);
    for (a, b) in lw.iter().zip(&pf) {
        assert!(b.above_threshold >= a.above_threshold);
        assert!(b.survivors.iter().all(|x| x.h >= 0.4));
        let pfs: HashSet<_> = b.survivors.iter().map(|x| &x.episode).collect();
        assert!(a.survivors.iter().all(|x| pfs.contains(&x.episode)));
    }
}

#[test]
fn serial_mode_reports_only_total_orders() {
    let (s, _, _) = two_pattern_stream(4);
    let cfg = MiningConfig {
        f_th: 350,
        expiry: Expiry::Ticks(15),
        mode: GenerationMode::serial(),
        max_level: 4,
        ..MiningConfig::default()
    };
    let reports = mine(&s, &cfg).unwrap();
    assert!(reports.len() >= 3);
    for r in reports.iter().skip(1) {
        assert!(r.survivors.iter().all(|x| x.episode.is_serial()));
    }
    assert_eq!(cfg.mode.kind, ModeKind::Serial);
}

#[test]
fn report_lists_levels_in_order() {
    let s = small_stream(13);
    let a = letters(4);
    let cfg = MiningConfig {
        f_th: 2,
        expiry: Expiry::Ticks(6),
        max_level: 3,
        ..MiningConfig::default()
    };
    let reports = mine(&s, &cfg).unwrap();
    let mut out = Vec::new();
    write_report(&reports, &a, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let headers: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    assert_eq!(headers.len(), reports.len());
    for (h, r) in headers.iter().zip(&reports) {
        assert!(h.starts_with(&format!("# level={} ", r.level)));
    }
    let body = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(body, reports.iter().map(|r| r.frequent()).sum::<usize>());
}
