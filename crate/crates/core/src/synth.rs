//! Synthetic streams with embedded episodes.
//!
//! Each embedded pattern gets its own stream of back-to-back occurrences:
//! an occurrence is a random serial extension of the pattern with
//! geometric(η) gaps between its events, and the next occurrence starts a
//! geometric(p) gap after the previous one ended. Every alphabet symbol
//! also gets an independent noise stream with geometric(ρ) inter-arrival
//! times (ρ/5 for symbols used by a pattern). All streams stop at the
//! horizon `T` and are merged by tick.
//!
//! Geometric gaps take values in `{1, 2, ...}` with mean `1/q`; each stream
//! starts at its own geometric offset from tick 0.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::alphabet::{Alphabet, EventType};
use crate::episode::{bit, bits, Episode};
use crate::error::{Error, Result};
use crate::stream::{EventSequence, Tick};

/// Name of the serial-extension sampler, recorded in manifests.
pub const SAMPLER: &str = "uniform-minimal-element";

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Full alphabet; its size is the number of event types `M`.
    pub alphabet: Alphabet,
    pub patterns: Vec<Episode>,
    pub eta: f64,
    pub p: f64,
    /// Noise rate; 0 disables noise.
    pub rho: f64,
    pub horizon: Tick,
    pub seed: u64,
}

/// Adds filler symbols `n000`, `n001`, ... (skipping names already taken)
/// until the alphabet has `m` symbols.
pub fn extend_alphabet<S: AsRef<str>>(symbols: &[S], m: usize) -> Result<Alphabet> {
    let mut all: Vec<String> = symbols.iter().map(|s| s.as_ref().to_string()).collect();
    all.sort();
    all.dedup();
    if all.len() > m {
        return Err(Error::InvalidConfig(format!(
            "patterns use {} event types but the alphabet size is {m}",
            all.len()
        )));
    }
    let taken: std::collections::HashSet<String> = all.iter().cloned().collect();
    let mut k = 0;
    while all.len() < m {
        let name = format!("n{k:03}");
        if !taken.contains(&name) {
            all.push(name);
        }
        k += 1;
    }
    Alphabet::new(all)
}

/// Re-expresses an episode over another alphabet that contains its symbols.
pub fn remap_episode(e: &Episode, from: &Alphabet, to: &Alphabet) -> Result<Episode> {
    let events = e
        .events()
        .iter()
        .map(|&x| to.lookup(from.symbol(x)))
        .collect::<Result<Vec<_>>>()?;
    Episode::new(&events, &e.relation())
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64, zero_ok: bool| {
            let ok = if zero_ok {
                (0.0..=1.0).contains(&v)
            } else {
                v > 0.0 && v <= 1.0
            };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name}={v} out of range")))
            }
        };
        prob("eta", self.eta, false)?;
        prob("p", self.p, false)?;
        prob("rho", self.rho, true)?;
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        for e in &self.patterns {
            if e.last_event().index() >= self.alphabet.len() {
                return Err(Error::EventOutOfRange(e.last_event().id()));
            }
        }
        Ok(())
    }

    /// Event types used by some pattern.
    pub fn embedded_types(&self) -> Vec<EventType> {
        let mut v: Vec<EventType> = self
            .patterns
            .iter()
            .flat_map(|e| e.events().iter().copied())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Expected number of pattern events: `T·Σ l / ((l-1)/η + 1/p)`.
    pub fn expected_signal_events(&self) -> f64 {
        self.patterns
            .iter()
            .map(|e| {
                let l = e.size() as f64;
                self.horizon as f64 * l / ((l - 1.0) / self.eta + 1.0 / self.p)
            })
            .sum()
    }

    /// Expected number of noise events.
    pub fn expected_noise_events(&self) -> f64 {
        let e1 = self.embedded_types().len() as f64;
        let other = self.alphabet.len() as f64 - e1;
        (other * self.rho + e1 * self.rho / 5.0) * self.horizon as f64
    }

    /// Share of noise among all events, from the expected counts.
    pub fn noise_level(&self) -> f64 {
        let ns = self.expected_noise_events();
        let sig = self.expected_signal_events();
        if ns + sig == 0.0 {
            0.0
        } else {
            ns / (ns + sig)
        }
    }

    pub fn write_manifest<W: Write>(&self, mut out: W, events: usize) -> io::Result<()> {
        writeln!(out, "seed={}", self.seed)?;
        writeln!(out, "eta={}", self.eta)?;
        writeln!(out, "p={}", self.p)?;
        writeln!(out, "rho={}", self.rho)?;
        writeln!(out, "alphabet_size={}", self.alphabet.len())?;
        writeln!(out, "ticks={}", self.horizon)?;
        writeln!(out, "sampler={SAMPLER}")?;
        writeln!(out, "patterns={}", self.patterns.len())?;
        for (i, e) in self.patterns.iter().enumerate() {
            writeln!(out, "pattern.{i}={}", e.display(&self.alphabet))?;
        }
        writeln!(out, "alphabet={}", self.alphabet.symbols().join(" "))?;
        writeln!(out, "events={events}")?;
        writeln!(
            out,
            "expected_events={:.1}",
            self.expected_noise_events() + self.expected_signal_events()
        )?;
        writeln!(out, "noise_level={:.6}", self.noise_level())?;
        Ok(())
    }
}

/// Noise level for `n_emb` patterns of `l` nodes each over distinct event
/// types, in an alphabet of `m` types. The horizon cancels out.
pub fn noise_level(m: usize, l: usize, n_emb: usize, eta: f64, p: f64, rho: f64) -> f64 {
    let e1 = (l * n_emb) as f64;
    let ns = (m as f64 - e1) * rho + e1 * rho / 5.0;
    let sig = (l * n_emb) as f64 / ((l as f64 - 1.0) / eta + 1.0 / p);
    if ns + sig == 0.0 {
        0.0
    } else {
        ns / (ns + sig)
    }
}

/// A linear extension of the episode's order, built by repeatedly taking a
/// uniformly chosen minimal element of what is left.
pub fn random_serial_extension<R: Rng + ?Sized>(alpha: &Episode, rng: &mut R) -> Vec<EventType> {
    let mut done = 0u64;
    let mut out = Vec::with_capacity(alpha.size());
    while out.len() < alpha.size() {
        let ready: Vec<usize> = bits(alpha.full_mask() & !done)
            .filter(|&i| alpha.parents(i) & !done == 0)
            .collect();
        let pick = ready[rng.random_range(0..ready.len())];
        done |= bit(pick);
        out.push(alpha.event(pick));
    }
    out
}

struct Gaps(Geometric);

impl Gaps {
    fn new(q: f64) -> Self {
        Gaps(Geometric::new(q).expect("probability validated"))
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Tick {
        self.0.sample(rng).saturating_add(1)
    }
}

/// Generates the merged stream. Deterministic for a given config.
pub fn generate_stream(cfg: &GenConfig) -> Result<EventSequence> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // (tick, stream id, seq, event)
    let mut all: Vec<(Tick, usize, usize, EventType)> = Vec::new();
    let horizon = cfg.horizon;

    let intra = Gaps::new(cfg.eta);
    let inter = Gaps::new(cfg.p);
    for (sid, pat) in cfg.patterns.iter().enumerate() {
        let mut seq = 0;
        let mut start = inter.draw(&mut rng);
        'occurrences: while start <= horizon {
            let order = random_serial_extension(pat, &mut rng);
            let mut t = start;
            for (k, &e) in order.iter().enumerate() {
                if k > 0 {
                    t = t.saturating_add(intra.draw(&mut rng));
                }
                if t > horizon {
                    break 'occurrences;
                }
                all.push((t, sid, seq, e));
                seq += 1;
            }
            start = t.saturating_add(inter.draw(&mut rng));
        }
    }

    let embedded = cfg.embedded_types();
    for e in cfg.alphabet.event_types() {
        let rate = if embedded.binary_search(&e).is_ok() {
            cfg.rho / 5.0
        } else {
            cfg.rho
        };
        if rate <= 0.0 {
            continue;
        }
        let sid = cfg.patterns.len() + e.index();
        let gaps = Gaps::new(rate);
        let mut t = gaps.draw(&mut rng);
        let mut seq = 0;
        while t <= horizon {
            all.push((t, sid, seq, e));
            seq += 1;
            t = t.saturating_add(gaps.draw(&mut rng));
        }
    }

    all.sort_unstable_by_key(|&(t, sid, seq, _)| (t, sid, seq));
    EventSequence::new(
        all.into_iter().map(|(t, _, _, e)| (e, t)).collect(),
        cfg.alphabet.len(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_episode;

    fn cfg(patterns: &[&str], syms: &[&str], m: usize) -> GenConfig {
        let alphabet = extend_alphabet(syms, m).unwrap();
        let patterns = patterns
            .iter()
            .map(|p| parse_episode(p, &alphabet).unwrap())
            .collect();
        GenConfig {
            alphabet,
            patterns,
            eta: 0.7,
            p: 0.1,
            rho: 0.05,
            horizon: 1000,
            seed: 7,
        }
    }

    #[test]
    fn deterministic_serial_pattern() {
        let c = GenConfig {
            eta: 1.0,
            p: 1.0,
            rho: 0.0,
            horizon: 6,
            ..cfg(&["A B | A<B"], &["A", "B"], 2)
        };
        let s = generate_stream(&c).unwrap();
        let mut out = Vec::new();
        s.write_to(&c.alphabet, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "1\tA\n2\tB\n3\tA\n4\tB\n5\tA\n6\tB\n"
        );
    }

    #[test]
    fn dense_noise() {
        let c = GenConfig {
            rho: 1.0,
            horizon: 5,
            ..cfg(&[], &[], 4)
        };
        let s = generate_stream(&c).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.batches().all(|b| b.len() == 4));
    }

    #[test]
    fn same_seed_same_stream() {
        let c = cfg(&["A B C | A<C B<C"], &["A", "B", "C"], 10);
        assert_eq!(generate_stream(&c).unwrap(), generate_stream(&c).unwrap());
        let d = GenConfig {
            seed: 8,
            ..c.clone()
        };
        assert_ne!(generate_stream(&c).unwrap(), generate_stream(&d).unwrap());
    }

    #[test]
    fn filler_names_skip_collisions() {
        let a = extend_alphabet(&["n001", "A"], 4).unwrap();
        assert_eq!(a.symbols(), &["A", "n000", "n001", "n002"]);
        assert!(extend_alphabet(&["A", "B"], 1).is_err());
    }

    #[test]
    fn noise_level_splits() {
        let expect = [
            (0.045, 0.87),
            (0.05, 0.885),
            (0.03, 0.82),
            (0.02, 0.75),
            (0.005, 0.43),
        ];
        for (rho, want) in expect {
            let got = noise_level(100, 8, 2, 0.7, 0.055, rho);
            assert!((got - want).abs() < 0.01, "rho={rho}: {got}");
        }
        assert_eq!(noise_level(100, 8, 2, 0.7, 0.055, 0.0), 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let c = cfg(&[], &[], 3);
        assert!(generate_stream(&GenConfig {
            eta: 0.0,
            ..c.clone()
        })
        .is_err());
        assert!(generate_stream(&GenConfig {
            rho: 1.5,
            ..c.clone()
        })
        .is_err());
        assert!(generate_stream(&GenConfig { horizon: 0, ..c }).is_err());
    }
}
