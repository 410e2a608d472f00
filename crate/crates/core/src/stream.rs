//! Time-ordered event streams and their text file format.
//!
//! One event per line: `<tick><TAB><symbol>`. Ticks are unsigned and
//! non-decreasing; equal ticks are allowed. Lines starting with `#` and blank
//! lines are ignored.

use std::io::{self, BufRead, Write};
use std::path::Path;

use crate::alphabet::{Alphabet, EventType};
use crate::error::{Error, Result};

pub type Tick = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub event: EventType,
    pub tick: Tick,
}

/// A validated, tick-sorted event stream over an alphabet of `n_types`
/// event types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventSequence {
    events: Vec<Event>,
    n_types: usize,
}

impl EventSequence {
    pub fn new(events: Vec<(EventType, Tick)>, n_types: usize) -> Result<Self> {
        let events: Vec<Event> = events
            .into_iter()
            .map(|(event, tick)| Event { event, tick })
            .collect();
        for (i, e) in events.iter().enumerate() {
            if e.event.index() >= n_types {
                return Err(Error::EventOutOfRange(e.event.id()));
            }
            if i > 0 && e.tick < events[i - 1].tick {
                return Err(Error::UnsortedStream {
                    index: i,
                    tick: e.tick,
                    prev: events[i - 1].tick,
                });
            }
        }
        Ok(EventSequence { events, n_types })
    }

    /// Builds a stream from symbol/tick pairs, interning against `alphabet`.
    pub fn from_symbols<S: AsRef<str>>(pairs: &[(S, Tick)], alphabet: &Alphabet) -> Result<Self> {
        let events = pairs
            .iter()
            .map(|(s, t)| Ok((alphabet.lookup(s.as_ref())?, *t)))
            .collect::<Result<Vec<_>>>()?;
        EventSequence::new(events, alphabet.len())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn get(&self, i: usize) -> Event {
        self.events[i]
    }

    /// Whether any tick occurs more than once.
    pub fn has_ties(&self) -> bool {
        self.events.windows(2).any(|w| w[0].tick == w[1].tick)
    }

    /// Maximal runs of events sharing a tick, in stream order.
    pub fn batches(&self) -> impl Iterator<Item = &[Event]> {
        self.events.chunk_by(|a, b| a.tick == b.tick)
    }

    /// Event types that occur at least once, ascending.
    pub fn observed_types(&self) -> Vec<EventType> {
        let mut seen = vec![false; self.n_types];
        for e in &self.events {
            seen[e.event.index()] = true;
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| EventType::new(i as u32))
            .collect()
    }

    pub fn write_to<W: Write>(&self, alphabet: &Alphabet, mut out: W) -> io::Result<()> {
        for e in &self.events {
            writeln!(out, "{}\t{}", e.tick, alphabet.symbol(e.event))?;
        }
        Ok(())
    }
}

/// A parsed stream file before interning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawStream {
    pub events: Vec<(String, Tick)>,
}

impl RawStream {
    pub fn parse<R: BufRead>(reader: R) -> Result<RawStream> {
        let mut events = Vec::new();
        let mut prev: Option<Tick> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let text = line.trim_end_matches('\r');
            if text.trim().is_empty() || text.starts_with('#') {
                continue;
            }
            let syntax = |msg: String| Error::Syntax { line: lineno, msg };
            let (tick, symbol) = text
                .split_once('\t')
                .ok_or_else(|| syntax("expected `<tick><TAB><symbol>`".into()))?;
            let tick: Tick = tick
                .trim()
                .parse()
                .map_err(|_| syntax(format!("bad tick `{tick}`")))?;
            let symbol = symbol.trim();
            if !crate::alphabet::is_valid_symbol(symbol) {
                return Err(syntax(format!("bad symbol `{symbol}`")));
            }
            if let Some(p) = prev {
                if tick < p {
                    return Err(Error::UnsortedStream {
                        index: events.len(),
                        tick,
                        prev: p,
                    });
                }
            }
            prev = Some(tick);
            events.push((symbol.to_string(), tick));
        }
        Ok(RawStream { events })
    }

    pub fn read(path: &Path) -> Result<RawStream> {
        let f = std::fs::File::open(path)?;
        RawStream::parse(io::BufReader::new(f))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.events.iter().map(|(s, _)| s.as_str())
    }

    pub fn intern(&self, alphabet: &Alphabet) -> Result<EventSequence> {
        EventSequence::from_symbols(&self.events, alphabet)
    }
}
