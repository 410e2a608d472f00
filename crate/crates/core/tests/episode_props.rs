mod common;

use common::*;
use posetmine::episode::{is_subepisode, validate_partial_order, Relation, Violation};
use posetmine::oracle::enumerate_all_episodes;
use posetmine::text::{format_episode, parse_episode};
use posetmine::{Episode, EventType};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(seed: u64, max_k: usize) -> Episode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = letters(10);
    let types: Vec<EventType> = a.event_types().collect();
    let k = rng.random_range(1..=max_k);
    let p = rng.random_range(0.0..0.9);
    random_episode(&mut rng, &types, k, p)
}

fn brute_force_valid(r: &Relation) -> bool {
    let n = r.size();
    (0..n).all(|i| !r.get(i, i))
        && (0..n).all(|i| (0..n).all(|j| !(r.get(i, j) && r.get(j, i))))
        && (0..n)
            .all(|i| (0..n).all(|j| (0..n).all(|k| !(r.get(i, j) && r.get(j, k)) || r.get(i, k))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn validation_matches_definition(n in 1usize..=5, bits in any::<u32>()) {
        let mut r = Relation::new(n);
        let mut b = bits;
        for i in 0..n {
            for j in 0..n {
                if b & 1 == 1 && (i != j || bits % 7 == 0) {
                    r.set(i, j);
                }
                b = b.rotate_right(1);
            }
        }
        let v = validate_partial_order(&r);
        prop_assert_eq!(v.is_ok(), brute_force_valid(&r));
        if let Err(Violation::Intransitive { a, b, c }) = v {
            prop_assert!(r.get(a, b) && r.get(b, c) && !r.get(a, c));
        }
    }

    #[test]
    fn canonical_form_ignores_node_order(seed in any::<u64>()) {
        let e = random(seed, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut perm: Vec<usize> = (0..e.size()).collect();
        perm.shuffle(&mut rng);
        let events: Vec<EventType> = perm.iter().map(|&i| e.event(i)).collect();
        let mut r = Relation::new(e.size());
        for (ni, &oi) in perm.iter().enumerate() {
            for (nj, &oj) in perm.iter().enumerate() {
                if e.precedes(oi, oj) {
                    r.set(ni, nj);
                }
            }
        }
        prop_assert_eq!(Episode::new(&events, &r).unwrap(), e);
    }

    #[test]
    fn reduction_is_minimal_and_generates_order(seed in any::<u64>()) {
        let e = random(seed, 8);
        let red = e.transitive_reduction();
        prop_assert_eq!(red.closure(), e.relation());
        prop_assert_eq!(e.relation().closure(), e.relation());
        for (i, j) in red.edges().collect::<Vec<_>>() {
            let mut smaller = red.clone();
            smaller.unset(i, j);
            prop_assert_ne!(smaller.closure(), e.relation());
        }
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let a = letters(10);
        let e = random(seed, 8);
        let text = format_episode(&e, &a);
        prop_assert_eq!(parse_episode(&text, &a).unwrap(), e);
    }

    #[test]
    fn metrics_are_bounded(seed in any::<u64>()) {
        let e = random(seed, 8);
        let m = e.structural_metrics();
        prop_assert!(m.lmax < e.size());
        prop_assert!(m.nmax >= 1);
        if e.is_serial() {
            prop_assert_eq!((m.lmax, m.nmax), (e.size() - 1, 1));
        }
        if e.is_parallel() {
            prop_assert_eq!((m.lmax, m.nmax), (0, e.size() as u64));
        }
    }

    #[test]
    fn maximal_subepisodes_are_subepisodes(seed in any::<u64>()) {
        let e = random(seed, 8);
        if e.size() >= 2 {
            for s in e.maximal_subepisodes() {
                prop_assert!(is_subepisode(&s, &e));
                prop_assert_eq!(s.size(), e.size() - 1);
            }
        }
    }
}

#[test]
fn every_subepisode_sits_under_a_maximal_one() {
    let a = letters(4);
    let types: Vec<EventType> = a.event_types().collect();
    for alpha in enumerate_all_episodes(&types, 4).unwrap() {
        let maximal = alpha.maximal_subepisodes();
        for beta in enumerate_all_episodes(&types, 3).unwrap() {
            if beta.is_subepisode_of(&alpha) {
                assert!(maximal.iter().any(|m| beta.is_subepisode_of(m)));
            }
        }
    }
}

#[test]
fn reference_shapes() {
    let a = letters(8);
    let m = |s: &str| parse_episode(s, &a).unwrap().structural_metrics();
    // (A B) → (C D E) → (F G H)
    let iii = m("A B C D E F G H | A<C A<D A<E B<C B<D B<E C<F C<G C<H D<F D<G D<H E<F E<G E<H");
    assert_eq!((iii.lmax, iii.nmax), (2, 18));
    // A → (B C D E) → F
    let four = m("A B C D E F | A<B A<C A<D A<E B<F C<F D<F E<F");
    assert_eq!((four.lmax, four.nmax), (2, 4));
}
